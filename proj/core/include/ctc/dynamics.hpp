#pragma once

#include <Eigen/Dense>

namespace ctc {

/// Mass and geometry constants of the vehicle. The diagonal scaling
/// diag(1/m, C/rho, ell/J0, ell/Jpsi) maps mixed rotor forces to the
/// virtual controls.
struct MassGeometryParams {
    double m = 1.0;     // kg
    double C = 1.0;     // rotational constant
    double rho = 1.0;
    double ell = 1.0;   // arm length, m
    double J0 = 1.0;    // kg m^2
    double Jpsi = 1.0;  // kg m^2
    double g = 9.81;    // m/s^2

    Eigen::Matrix4d mixing_scale() const;  // M
    void validate() const;                 // throws std::invalid_argument
};

/// Full rigid-body state. Attitude is (phi, theta, psi) = yaw, pitch, roll.
struct QuadState {
    Eigen::Vector3d position = Eigen::Vector3d::Zero();       // m
    Eigen::Vector3d velocity = Eigen::Vector3d::Zero();       // m/s
    Eigen::Vector3d attitude = Eigen::Vector3d::Zero();       // rad
    Eigen::Vector3d attitude_rate = Eigen::Vector3d::Zero();  // rad/s
};

/// Componentwise time derivative of QuadState.
struct QuadStateRates {
    Eigen::Vector3d position_dot;
    Eigen::Vector3d velocity_dot;
    Eigen::Vector3d attitude_dot;
    Eigen::Vector3d attitude_rate_dot;
};

struct RotorForces {
    Eigen::Vector4d f = Eigen::Vector4d::Zero();  // N, per rotor
};

/// u1 is the thrust offset from gravity (m/s^2); u2..u4 are the yaw,
/// pitch, roll angular accelerations (rad/s^2).
struct VirtualControls {
    Eigen::Vector4d u = Eigen::Vector4d::Zero();
};

/// Unit direction the net thrust acts along for a given attitude.
Eigen::Vector3d thrust_direction(const Eigen::Vector3d& attitude);

/// Rotor forces -> virtual controls: U = M B F - (g, 0, 0, 0).
VirtualControls mix_forces(const RotorForces& f, const MassGeometryParams& p);

/// Virtual controls -> rotor forces; exact inverse of mix_forces.
RotorForces allocate_forces(const VirtualControls& u, const MassGeometryParams& p);

/// Rigid-body vector field: Pdot = V, Vdot = r(Theta)(u1 + g) - g e_z,
/// Thetadot passthrough, Thetaddot = (u2, u3, u4).
QuadStateRates plant_derivative(const QuadState& x, const VirtualControls& u,
                                const MassGeometryParams& p);

}  // namespace ctc
