#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "ctc/errors.hpp"
#include "ctc/scenario.hpp"

namespace ctc {

namespace detail {
inline void check_finite(const Eigen::VectorXd& v, const char* what) {
    for (int i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i])) {
            throw IntegrationError(std::string(what) + ": non-finite value in component " +
                                       std::to_string(i),
                                   i);
        }
    }
}
}  // namespace detail

/// Classical fixed-step 4th-order Runge-Kutta step; deterministic, throws
/// IntegrationError (with the offending component) on non-finite
/// derivatives.
template <class F>
Eigen::VectorXd rk4_step(F&& f, const Eigen::VectorXd& x, double t, double dt) {
    const Eigen::VectorXd k1 = f(t, x);
    detail::check_finite(k1, "rk4_step k1");
    const Eigen::VectorXd k2 = f(t + 0.5 * dt, x + (0.5 * dt) * k1);
    detail::check_finite(k2, "rk4_step k2");
    const Eigen::VectorXd k3 = f(t + 0.5 * dt, x + (0.5 * dt) * k2);
    detail::check_finite(k3, "rk4_step k3");
    const Eigen::VectorXd k4 = f(t + dt, x + dt * k3);
    detail::check_finite(k4, "rk4_step k4");
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Uniformly sampled closed-loop time series; one entry per step including
/// t = 0. Observer entries only in output-feedback mode.
struct SimLog {
    bool output_mode = false;
    double dt = 0.0;
    std::vector<double> t;
    std::vector<QuadState> quad;
    std::vector<DeviationState> dev;
    std::vector<double> dist;
    std::vector<NormalFormState> xi;
    std::vector<VirtualControls> controls;  // applied (u1 saturated)
    std::vector<RotorForces> forces;
    std::vector<ObserverState> observer;

    size_t size() const { return t.size(); }
};

/// Tail-window tracking metrics against the three objective tolerances.
struct Metrics {
    double v_err_max = 0.0;                        // max |s_dot - v*|
    double dist_max = 0.0;                         // max distance to the curve
    std::array<double, 3> att_err_max{0, 0, 0};    // max |dphi|, |theta|, |psi|
    bool velocity_ok = false;
    bool distance_ok = false;
    bool attitude_ok = false;
    double settling_time = std::numeric_limits<double>::infinity();
    int negative_thrust_steps = 0;                 // whole run, diagnostic

    bool all_ok() const { return velocity_ok && distance_ok && attitude_ok; }
};

struct RunResult {
    SimLog log;
    Metrics metrics;
    bool aborted = false;
    std::string diagnostic;
};

/// Integrates plant + extension (+ observer) under the configured
/// controller, re-evaluating the controller inside every RK4 stage.
/// Deterministic for a given config. On projection ambiguity, frame
/// degeneracy, decoupling singularity or non-finite values the run aborts
/// with the last good log and a diagnostic.
RunResult run_scenario(const ScenarioConfig& cfg);

Metrics compute_metrics(const SimLog& log, const ScenarioConfig& cfg);

}  // namespace ctc
