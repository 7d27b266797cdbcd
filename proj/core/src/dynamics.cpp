#include "ctc/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace ctc {

namespace {

// Signs of the rotor mixing: rows map (F1..F4) onto the thrust sum and the
// three angular channels.
const Eigen::Matrix4d& mixing_signs() {
    static const Eigen::Matrix4d b = [] {
        Eigen::Matrix4d m;
        m << 1, 1, 1, 1,
             1, -1, 1, -1,
             -1, -1, 1, 1,
             -1, 1, 1, -1;
        return m;
    }();
    return b;
}

// Inverse signs; (1/4) * inv_signs * signs = I.
const Eigen::Matrix4d& inverse_mixing_signs() {
    static const Eigen::Matrix4d b = [] {
        Eigen::Matrix4d m;
        m << 1, 1, -1, -1,
             1, -1, -1, 1,
             1, 1, 1, 1,
             1, -1, 1, -1;
        return m;
    }();
    return b;
}

}  // namespace

Eigen::Matrix4d MassGeometryParams::mixing_scale() const {
    return Eigen::Vector4d(1.0 / m, C / rho, ell / J0, ell / Jpsi).asDiagonal();
}

void MassGeometryParams::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0)) {
            throw std::invalid_argument(std::string("MassGeometryParams: ") + name +
                                        " must be strictly positive");
        }
    };
    positive(m, "m");
    positive(C, "C");
    positive(rho, "rho");
    positive(ell, "ell");
    positive(J0, "J0");
    positive(Jpsi, "Jpsi");
    positive(g, "g");
}

Eigen::Vector3d thrust_direction(const Eigen::Vector3d& attitude) {
    const double cphi = std::cos(attitude[0]), sphi = std::sin(attitude[0]);
    const double cth = std::cos(attitude[1]), sth = std::sin(attitude[1]);
    const double cpsi = std::cos(attitude[2]), spsi = std::sin(attitude[2]);
    return {cphi * sth * cpsi + sphi * spsi,
            sphi * sth * cpsi - cphi * spsi,
            cth * cpsi};
}

VirtualControls mix_forces(const RotorForces& f, const MassGeometryParams& p) {
    VirtualControls u;
    u.u = p.mixing_scale() * (mixing_signs() * f.f);
    u.u[0] -= p.g;
    return u;
}

RotorForces allocate_forces(const VirtualControls& u, const MassGeometryParams& p) {
    Eigen::Vector4d rhs = u.u;
    rhs[0] += p.g;
    const Eigen::Vector4d scaled = p.mixing_scale().diagonal().cwiseInverse().asDiagonal() * rhs;
    RotorForces f;
    f.f = 0.25 * (inverse_mixing_signs() * scaled);
    return f;
}

QuadStateRates plant_derivative(const QuadState& x, const VirtualControls& u,
                                const MassGeometryParams& p) {
    QuadStateRates d;
    d.position_dot = x.velocity;
    d.velocity_dot = thrust_direction(x.attitude) * (u.u[0] + p.g) -
                     Eigen::Vector3d(0.0, 0.0, p.g);
    d.attitude_dot = x.attitude_rate;
    d.attitude_rate_dot = Eigen::Vector3d(u.u[1], u.u[2], u.u[3]);
    return d;
}

}  // namespace ctc
