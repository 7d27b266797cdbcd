#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <span>

#include "ctc/normal_form.hpp"

namespace ctc {

/// Coefficients of gamma(p) = p^4 + gamma4 p^3 + gamma3 p^2 + gamma2 p + gamma1.
struct ControllerGains {
    double gamma1 = 0.0;
    double gamma2 = 0.0;
    double gamma3 = 0.0;
    double gamma4 = 0.0;
};

/// Expands a conjugate-closed set of four stable poles into the monic
/// quartic coefficients. Throws std::invalid_argument on unstable or
/// non-conjugate-closed sets.
ControllerGains gains_from_poles(const std::array<std::complex<double>, 4>& poles);

/// Quintic analog for the observer: a(p) = p^5 + a1 p^4 + ... + a5,
/// returned as (a1..a5).
std::array<double, 5> observer_coeffs_from_poles(
    const std::array<std::complex<double>, 5>& poles);

/// All roots of the monic polynomial strictly in the open left half plane.
/// coeffs are (c_{n-1}, ..., c_0) after the leading one.
bool is_hurwitz(std::span<const double> coeffs);

double smooth_sat(double x, double level);  // level * tanh(x / level)
Eigen::Vector4d smooth_sat(const Eigen::Vector4d& x, double level);

struct ObserverGains {
    std::array<double, 5> a{5.0, 10.0, 10.0, 5.0, 1.0};  // (p+1)^5
    double k = 20.0;
    double N = 98.1;  // control saturation level
};

struct ObserverState {
    std::array<Eigen::Vector4d, 4> xi_hat{Eigen::Vector4d::Zero(), Eigen::Vector4d::Zero(),
                                          Eigen::Vector4d::Zero(), Eigen::Vector4d::Zero()};
    Eigen::Vector4d sigma_hat = Eigen::Vector4d::Zero();
};

struct ObserverRates {
    std::array<Eigen::Vector4d, 4> xi_hat_dot;
    Eigen::Vector4d sigma_hat_dot;
};

struct ReferenceSpec {
    enum class PhiStarMode { FromTangent, Constant };

    double v_star = 0.5;  // m/s, prescribed path speed
    double s0 = 0.0;
    PhiStarMode phi_star_mode = PhiStarMode::FromTangent;
    double phi_star_value = 0.0;  // used by Constant (vertical-tangent arcs)
};

/// Ramp reference on the path coordinate, zero elsewhere.
Eigen::Vector4d reference_xi1(double t, const ReferenceSpec& ref);

/// (s - s0 - v* t, e1, e2, dphi).
Eigen::Vector4d error_xi1(const Eigen::Vector4d& xi1, double t, const ReferenceSpec& ref);

/// Full error coordinates: shifts xi1 by the ramp and xi2 by (v*, 0, 0, 0).
NormalFormState error_state(const NormalFormState& xi, double t, const ReferenceSpec& ref);

/// Exact-cancellation state feedback:
/// Ubar = b^-1 (-q - gamma1 xt1 - gamma2 xt2 - gamma3 xt3 - gamma4 xt4).
Eigen::Vector4d full_state_law(const NormalFormState& xi_tilde, const DecouplingData& dec,
                               const ControllerGains& gains);

/// Extended observer: a chain estimator driven by the measured xi_tilde1
/// with injection gains k^i a_i and an extra drift state sigma_hat.
ObserverRates observer_derivative(const ObserverState& obs,
                                  const Eigen::Vector4d& xi_tilde1_meas,
                                  const Eigen::Vector4d& u_bar, const Eigen::Matrix4d& b0,
                                  const ObserverGains& og);

/// Saturated output feedback; the gamma1 term uses the measured xi_tilde1,
/// everything else the observer estimates.
Eigen::Vector4d output_feedback_law(const ObserverState& obs,
                                    const Eigen::Vector4d& xi_tilde1_meas,
                                    const Eigen::Matrix4d& b0, const ControllerGains& gains,
                                    double N);

struct ExtensionRates {
    double u1_bar_dot = 0.0;
    double rho1_dot = 0.0;
    double u2_dot = 0.0;
    double rho2_dot = 0.0;
};

struct ExtensionOutput {
    ExtensionRates rates;
    VirtualControls applied;
};

/// Integrator-chain rates for the thrust/yaw channels plus the controls
/// applied to the plant: u1 saturated, u3/u4 direct.
ExtensionOutput extension_derivative(const ExtensionState& ext, const Eigen::Vector4d& u_bar,
                                     double sat_level);

}  // namespace ctc
