#include "ctc/controller.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace ctc {

namespace {

/// Monic polynomial coefficients (after the leading one, descending) from
/// roots; validates stability and conjugate closure.
std::vector<double> expand_stable_poles(std::span<const std::complex<double>> poles) {
    for (const auto& p : poles) {
        if (!(p.real() < 0.0)) {
            throw std::invalid_argument("pole set must lie strictly in the left half plane");
        }
    }
    // Conjugate closure: every pole with nonzero imaginary part needs an
    // unconsumed conjugate partner.
    std::vector<bool> used(poles.size(), false);
    constexpr double kTol = 1e-9;
    for (size_t i = 0; i < poles.size(); ++i) {
        if (used[i] || std::abs(poles[i].imag()) <= kTol) continue;
        bool found = false;
        for (size_t j = i + 1; j < poles.size(); ++j) {
            if (used[j]) continue;
            if (std::abs(poles[j].real() - poles[i].real()) <= kTol &&
                std::abs(poles[j].imag() + poles[i].imag()) <= kTol) {
                used[i] = used[j] = true;
                found = true;
                break;
            }
        }
        if (!found) {
            throw std::invalid_argument("pole set must be closed under conjugation");
        }
    }

    std::vector<std::complex<double>> coeffs{1.0};
    for (const auto& p : poles) {
        std::vector<std::complex<double>> next(coeffs.size() + 1, 0.0);
        for (size_t i = 0; i < coeffs.size(); ++i) {
            next[i] += coeffs[i];
            next[i + 1] -= coeffs[i] * p;
        }
        coeffs = std::move(next);
    }
    std::vector<double> out;
    out.reserve(poles.size());
    for (size_t i = 1; i < coeffs.size(); ++i) {
        if (std::abs(coeffs[i].imag()) > 1e-9 * (1.0 + std::abs(coeffs[i].real()))) {
            throw std::invalid_argument("pole expansion produced complex coefficients");
        }
        out.push_back(coeffs[i].real());
    }
    return out;
}

}  // namespace

ControllerGains gains_from_poles(const std::array<std::complex<double>, 4>& poles) {
    const auto c = expand_stable_poles(poles);  // (c3, c2, c1, c0)
    ControllerGains g;
    g.gamma4 = c[0];
    g.gamma3 = c[1];
    g.gamma2 = c[2];
    g.gamma1 = c[3];
    if (!(g.gamma1 > 0 && g.gamma2 > 0 && g.gamma3 > 0 && g.gamma4 > 0)) {
        throw std::invalid_argument("controller gains must be positive");
    }
    return g;
}

std::array<double, 5> observer_coeffs_from_poles(
    const std::array<std::complex<double>, 5>& poles) {
    const auto c = expand_stable_poles(poles);
    std::array<double, 5> a{};
    std::copy(c.begin(), c.end(), a.begin());
    for (double v : a) {
        if (!(v > 0.0)) throw std::invalid_argument("observer coefficients must be positive");
    }
    return a;
}

bool is_hurwitz(std::span<const double> coeffs) {
    const int n = static_cast<int>(coeffs.size());
    if (n == 0) return true;
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i + 1 < n; ++i) companion(i, i + 1) = 1.0;
    for (int j = 0; j < n; ++j) companion(n - 1, j) = -coeffs[n - 1 - j];
    const Eigen::VectorXcd eig = companion.eigenvalues();
    for (int i = 0; i < n; ++i) {
        if (!(eig[i].real() < 0.0)) return false;
    }
    return true;
}

double smooth_sat(double x, double level) { return level * std::tanh(x / level); }

Eigen::Vector4d smooth_sat(const Eigen::Vector4d& x, double level) {
    Eigen::Vector4d out;
    for (int i = 0; i < 4; ++i) out[i] = smooth_sat(x[i], level);
    return out;
}

Eigen::Vector4d reference_xi1(double t, const ReferenceSpec& ref) {
    return {ref.s0 + ref.v_star * t, 0.0, 0.0, 0.0};
}

Eigen::Vector4d error_xi1(const Eigen::Vector4d& xi1, double t, const ReferenceSpec& ref) {
    return xi1 - reference_xi1(t, ref);
}

NormalFormState error_state(const NormalFormState& xi, double t, const ReferenceSpec& ref) {
    NormalFormState e = xi;
    e.xi1 = error_xi1(xi.xi1, t, ref);
    e.xi2[0] -= ref.v_star;
    return e;
}

Eigen::Vector4d full_state_law(const NormalFormState& xt, const DecouplingData& dec,
                               const ControllerGains& gains) {
    const Eigen::Vector4d rhs = -dec.q - gains.gamma1 * xt.xi1 - gains.gamma2 * xt.xi2 -
                                gains.gamma3 * xt.xi3 - gains.gamma4 * xt.xi4;
    return dec.b.partialPivLu().solve(rhs);
}

ObserverRates observer_derivative(const ObserverState& obs,
                                  const Eigen::Vector4d& xi_tilde1_meas,
                                  const Eigen::Vector4d& u_bar, const Eigen::Matrix4d& b0,
                                  const ObserverGains& og) {
    const Eigen::Vector4d e = xi_tilde1_meas - obs.xi_hat[0];
    const double k = og.k;
    ObserverRates d;
    d.xi_hat_dot[0] = obs.xi_hat[1] + k * og.a[0] * e;
    d.xi_hat_dot[1] = obs.xi_hat[2] + k * k * og.a[1] * e;
    d.xi_hat_dot[2] = obs.xi_hat[3] + k * k * k * og.a[2] * e;
    d.xi_hat_dot[3] = obs.sigma_hat + b0 * u_bar + k * k * k * k * og.a[3] * e;
    d.sigma_hat_dot = k * k * k * k * k * og.a[4] * e;
    return d;
}

Eigen::Vector4d output_feedback_law(const ObserverState& obs,
                                    const Eigen::Vector4d& xi_tilde1_meas,
                                    const Eigen::Matrix4d& b0, const ControllerGains& gains,
                                    double N) {
    const Eigen::Vector4d rhs = -obs.sigma_hat - gains.gamma1 * xi_tilde1_meas -
                                gains.gamma2 * obs.xi_hat[1] - gains.gamma3 * obs.xi_hat[2] -
                                gains.gamma4 * obs.xi_hat[3];
    return smooth_sat(b0.partialPivLu().solve(rhs).eval(), N);
}

ExtensionOutput extension_derivative(const ExtensionState& ext, const Eigen::Vector4d& u_bar,
                                     double sat_level) {
    ExtensionOutput out;
    out.rates.u1_bar_dot = ext.rho1;
    out.rates.rho1_dot = u_bar[0];
    out.rates.u2_dot = ext.rho2;
    out.rates.rho2_dot = u_bar[1];
    out.applied.u[0] = smooth_sat(ext.u1_bar, sat_level);
    out.applied.u[1] = ext.u2;
    out.applied.u[2] = u_bar[2];
    out.applied.u[3] = u_bar[3];
    return out;
}

}  // namespace ctc
