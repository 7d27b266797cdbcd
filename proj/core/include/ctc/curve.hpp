#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <string>

#include "ctc/jet.hpp"

namespace ctc {

struct SRange {
    double min = 0.0;
    double max = 0.0;
    bool periodic = false;

    double length() const { return max - min; }
};

/// Point of a parametric curve with derivatives w.r.t. the path coordinate.
struct CurveSample {
    Eigen::Vector3d p;   // eta(s)
    Eigen::Vector3d d1;  // d eta / ds
    Eigen::Vector3d d2;
    Eigen::Vector3d d3;
};

/// Local frame data at a path coordinate: the two rotation angles of the
/// deviation planes, the horizontal-projection curvature, and the
/// s-derivatives the higher chain coordinates need.
struct CurveFrame {
    double s = 0.0;
    Eigen::Vector3d point = Eigen::Vector3d::Zero();
    Eigen::Vector3d tangent = Eigen::Vector3d::Zero();  // unit
    double alpha = 0.0;    // rad, rotation about Z (branch of atan2 unless tracked)
    double beta = 0.0;     // rad, rotation about Y, in (-pi/2, pi/2]
    double epsilon = 0.0;  // 1/m, d(alpha)/ds
    double alpha_prime = 0.0;    // = epsilon
    double beta_prime = 0.0;     // d(beta)/ds
    double epsilon_prime = 0.0;  // d(epsilon)/ds
    bool vertical = false;       // horizontal tangent projection below tolerance
};

/// Smooth regular parametric curve. Implementations provide the position
/// and its first two s-derivatives as order-4 jets, which yields both the
/// plain derivative data (via an identity jet) and exact composition with
/// a time signal s(t).
class Curve {
public:
    virtual ~Curve() = default;

    virtual void eval_jets(const Jet& s, JetVec3& eta, JetVec3& d_eta,
                           JetVec3& dd_eta) const = 0;
    virtual SRange s_range() const = 0;
    virtual const std::string& name() const = 0;

    /// Position and s-derivatives up to order 3 at a scalar coordinate.
    CurveSample at(double s) const;
};

std::shared_ptr<Curve> make_line(const Eigen::Vector3d& origin,
                                 const Eigen::Vector3d& direction,
                                 double half_length = 1000.0);
std::shared_ptr<Curve> make_circle(double radius);
std::shared_ptr<Curve> make_helix(double radius, double pitch_per_turn,
                                  std::optional<double> s_min = {},
                                  std::optional<double> s_max = {});

/// Threshold on the horizontal tangent norm below which the yaw reference
/// is undefined and must come from the designer.
inline constexpr double kVerticalTangentTol = 1e-9;

/// Frame at s. On a vertical-tangent arc, alpha comes from fixed_alpha when
/// provided; otherwise the frame is returned with vertical = true and
/// alpha/epsilon unusable (callers decide policy).
CurveFrame frame_at(const Curve& curve, double s, std::optional<double> fixed_alpha = {});

struct ProjectionResult {
    double s_star = 0.0;
    double distance = 0.0;
    bool converged = false;
    int iterations = 0;
};

struct ProjectionOptions {
    int max_iterations = 50;
    double g_tol = 1e-10;     // stationarity |(P - eta) . eta'|
    double step_tol = 1e-12;  // Newton step size
    int grid_samples = 512;   // coarse seed when no hint is given
};

/// Closest point on the curve. Damped Newton on the stationarity equation,
/// seeded by s_hint or by a coarse grid scan. Throws
/// ProjectionAmbiguousError when the grid scan finds several equally good
/// separated minima (e.g. the center of a circle).
ProjectionResult project_closest(const Curve& curve, const Eigen::Vector3d& p,
                                 std::optional<double> s_hint = {},
                                 const ProjectionOptions& opts = {});

/// Deviation coordinates (s, e1, e2, dphi, dtheta, dpsi).
struct DeviationState {
    double s = 0.0;
    double e1 = 0.0;
    double e2 = 0.0;
    double delta_phi = 0.0;
    double delta_theta = 0.0;
    double delta_psi = 0.0;
};

double wrap_angle(double a);  // into (-pi, pi]

/// Deviations of a pose from the curve. delta_phi = wrap(phi - alpha(s));
/// pitch and roll references are zero. fixed_alpha supplies the designer
/// yaw reference on vertical-tangent arcs.
DeviationState deviations(const Curve& curve, const Eigen::Vector3d& p, double phi,
                          double theta, double psi, std::optional<double> s_hint = {},
                          std::optional<double> fixed_alpha = {});

/// Per-run projection/unwrap cache: keeps the previous projection as the
/// Newton seed and accumulates alpha continuously. One owner per
/// simulation; curves themselves stay immutable and shareable.
class PathTracker {
public:
    explicit PathTracker(std::shared_ptr<const Curve> curve,
                         std::optional<double> alpha_override = {},
                         ProjectionOptions opts = {});

    ProjectionResult project(const Eigen::Vector3d& p);
    CurveFrame frame(double s);  // alpha unwrapped against the running anchor
    DeviationState deviations(const Eigen::Vector3d& p, double phi, double theta, double psi);

    const Curve& curve() const { return *curve_; }
    std::optional<double> hint() const { return hint_; }
    std::optional<double> alpha_override() const { return alpha_override_; }
    const ProjectionResult& last_projection() const { return last_projection_; }

private:
    std::shared_ptr<const Curve> curve_;
    std::optional<double> alpha_override_;
    ProjectionOptions opts_;
    std::optional<double> hint_;
    std::optional<double> alpha_anchor_;
    std::optional<double> held_alpha_;  // last well-defined alpha (vertical arcs)
    ProjectionResult last_projection_;
};

}  // namespace ctc
