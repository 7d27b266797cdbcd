#pragma once

#include <array>
#include <complex>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "ctc/controller.hpp"
#include "ctc/curve.hpp"
#include "ctc/dynamics.hpp"

namespace ctc {

enum class ControllerMode { FullState, OutputFeedback };
enum class CurveType { Line, Circle, Helix };

struct CurveSpec {
    CurveType type = CurveType::Helix;
    double radius = 1.0;
    double pitch = 6.283185307179586;             // helix rise per turn
    Eigen::Vector3d origin = Eigen::Vector3d::Zero();      // line
    Eigen::Vector3d direction = Eigen::Vector3d::UnitX();  // line
    double half_length = 1000.0;                  // line extent
    std::optional<double> s_min;                  // helix range override
    std::optional<double> s_max;

    std::shared_ptr<Curve> build() const;
};

/// Initial pose relative to the curve. When explicit position/velocity/
/// attitude/rates are all given they win over the deviation fields.
struct InitSpec {
    double s = 0.0;
    double e1 = 0.0;
    double e2 = 0.0;
    double delta_phi = 0.0;
    double theta = 0.0;
    double psi = 0.0;
    std::optional<double> speed;  // along the tangent; defaults to v_star
    std::optional<Eigen::Vector3d> position;
    std::optional<Eigen::Vector3d> velocity;
    std::optional<Eigen::Vector3d> attitude;
    std::optional<Eigen::Vector3d> rates;
};

struct Tolerances {
    double v_tilde_max = 0.025;  // m/s; parse defaults this to 0.05 v* when omitted
    double theta_tilde_max = 0.02;
    double e_max = 1e-3;
};

struct ScenarioConfig {
    std::string name = "scenario";
    CurveSpec curve;
    MassGeometryParams params;
    InitSpec init;
    ReferenceSpec reference;
    std::array<std::complex<double>, 4> controller_poles{-2.0, -2.0, -2.0, -2.0};
    std::array<std::complex<double>, 5> observer_poles{-1.0, -1.0, -1.0, -1.0, -1.0};
    double observer_k = 20.0;
    double observer_n = 98.1;  // control saturation level; default 10 g
    double sat_l = 0.9;        // thrust saturation fraction of g
    ControllerMode mode = ControllerMode::FullState;
    double dt = 1e-3;
    double t_end = 20.0;
    double tail_fraction = 0.2;
    Tolerances tol;

    double sat_level() const { return sat_l * params.g; }
    ControllerGains controller_gains() const;
    ObserverGains observer_gains() const;
    std::shared_ptr<Curve> build_curve() const { return curve.build(); }
    QuadState initial_state(const Curve& c) const;
    std::optional<double> alpha_override() const;

    /// Field-level sanity; throws ConfigError naming the offending field.
    void validate() const;
};

bool operator==(const ScenarioConfig& a, const ScenarioConfig& b);

/// Parses a scenario file. Unknown keys, duplicates, malformed values and
/// invalid field combinations raise ConfigError with the offending line.
ScenarioConfig parse_config(const std::string& path);
ScenarioConfig parse_config_text(std::string_view text,
                                 const std::string& origin = "<config>");

/// Re-applies a single key=value pair on a parsed config (sweeps, CLI
/// overrides). The key set is the same as the file format's.
void apply_override(ScenarioConfig& cfg, const std::string& key, const std::string& value);

/// Canonical text form; parsing it reproduces the config exactly.
std::string canonical_config(const ScenarioConfig& cfg);

}  // namespace ctc
