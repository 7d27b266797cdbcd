#pragma once

#include <Eigen/Dense>
#include <optional>

#include "ctc/curve.hpp"
#include "ctc/dynamics.hpp"

namespace ctc {

/// Frame-dependent matrix mapping (vx, vy, vz, phi_dot) to the first
/// derivatives of (s, e1, e2, delta_phi) on the curve; det = 1 for all
/// angles.
Eigen::Matrix4d w_matrix(double alpha, double beta, double epsilon);
Eigen::Matrix4d w_inverse(double alpha, double beta, double epsilon);
/// Elementwise time derivative of w_matrix along (alpha(t), beta(t), eps(t)).
Eigen::Matrix4d w_matrix_dot(double alpha, double beta, double epsilon,
                             double alpha_dot, double beta_dot, double epsilon_dot);

/// Chain coordinates: xi1 = (s, e1, e2, delta_phi) and its first three time
/// derivatives along the closed-loop flow, one 4-vector per level.
struct NormalFormState {
    Eigen::Vector4d xi1 = Eigen::Vector4d::Zero();
    Eigen::Vector4d xi2 = Eigen::Vector4d::Zero();
    Eigen::Vector4d xi3 = Eigen::Vector4d::Zero();
    Eigen::Vector4d xi4 = Eigen::Vector4d::Zero();
};

/// Double-integrator extension on the thrust and yaw channels. The applied
/// thrust offset is the saturated u1_bar, so |u1| stays below the level.
struct ExtensionState {
    double u1_bar = 0.0;  // m/s^2, pre-saturation
    double rho1 = 0.0;
    double u2 = 0.0;      // rad/s^2
    double rho2 = 0.0;
};

/// xi4_dot = q + b * (v1, v2, u3, u4).
struct DecouplingData {
    Eigen::Vector4d q;
    Eigen::Matrix4d b;
};

/// Everything the chain evaluation needs besides the plant state.
struct ChainContext {
    const Curve* curve = nullptr;
    double g = 9.81;
    double sat_level = 0.9 * 9.81;        // l*g
    std::optional<double> s_hint;         // projection seed
    std::optional<double> fixed_alpha;    // designer yaw reference on vertical arcs
};

/// Chain coordinates of a plant + extension state, by exact forward-mode
/// differentiation of the projection geometry along the plant vector field.
NormalFormState xi_from_plant(const QuadState& x, const ExtensionState& ext,
                              const ChainContext& ctx);

/// Drift and input matrix of the fourth chain derivative at this state.
/// Throws SingularDecouplingError when cond(b) exceeds cond_limit.
DecouplingData decoupling(const QuadState& x, const ExtensionState& ext,
                          const ChainContext& ctx, double cond_limit = 1e8);

/// Closed form of the input matrix at the chain origin: W(alpha,beta,eps)
/// times the constant-attitude input block; invertible for every phi.
Eigen::Matrix4d b_at_origin(double phi, const CurveFrame& frame, double g);

struct OutputInversion {
    double u1 = 0.0;
    double theta = 0.0;
    double psi = 0.0;
    double u2 = 0.0;
};

/// Recovers (u1, theta, psi, u2) from the on-curve second-derivative
/// relation xi3 = Wdot W^-1 xi2 + W (accel, u2). Throws OutOfDomainError
/// when the attitude solution leaves |theta|, |psi| < pi/2 or the thrust
/// magnitude vanishes.
OutputInversion invert_outputs(const Eigen::Vector4d& xi2, const Eigen::Vector4d& xi3,
                               double phi, const CurveFrame& frame, double g);

struct ChainInverse {
    QuadState state;
    ExtensionState ext;
};

/// Exact inverse of xi_from_plant: reconstructs the plant and extension
/// state realizing the given chain coordinates. Stage-wise affine probing
/// of the same jet pipeline, so round trips are exact to solver precision.
ChainInverse plant_from_chain(const NormalFormState& xi, const ChainContext& ctx);

}  // namespace ctc
