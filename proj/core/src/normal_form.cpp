#include "ctc/normal_form.hpp"

#include <cmath>
#include <limits>

#include "ctc/errors.hpp"

namespace ctc {

namespace {

Jet make_jet(double c0, double c1, double c2, double c3, double c4) {
    Jet j;
    j.c = {c0, c1, c2, c3, c4};
    return j;
}

/// Antiderivative series with the given initial value; drops the top input
/// coefficient.
Jet integrate(const Jet& rate, double initial) {
    Jet r;
    r.c[0] = initial;
    for (int k = 0; k + 1 < Jet::kCoeffs; ++k) r.c[k + 1] = rate.c[k] / (k + 1);
    return r;
}

struct MotionJets {
    JetVec3 p;  // position signal
    Jet phi;    // yaw signal
};

/// Taylor expansion of the plant + extension flow at the current state with
/// the inputs (v1, v2, u3, u4) held at u_bar over the window.
MotionJets motion_jets(const QuadState& x, const ExtensionState& ext,
                       const Eigen::Vector4d& u_bar, const ChainContext& ctx) {
    const Jet phi = make_jet(x.attitude[0], x.attitude_rate[0], ext.u2 / 2.0,
                             ext.rho2 / 6.0, u_bar[1] / 24.0);
    const Jet theta = make_jet(x.attitude[1], x.attitude_rate[1], u_bar[2] / 2.0, 0.0, 0.0);
    const Jet psi = make_jet(x.attitude[2], x.attitude_rate[2], u_bar[3] / 2.0, 0.0, 0.0);
    const Jet u1_bar = make_jet(ext.u1_bar, ext.rho1, u_bar[0] / 2.0, 0.0, 0.0);

    const Jet u1 = ctx.sat_level * tanh(u1_bar / ctx.sat_level);
    const Jet d = u1 + ctx.g;

    Jet sphi, cphi, sth, cth, spsi, cpsi;
    sin_cos(phi, sphi, cphi);
    sin_cos(theta, sth, cth);
    sin_cos(psi, spsi, cpsi);

    const JetVec3 r{cphi * sth * cpsi + sphi * spsi,
                    sphi * sth * cpsi - cphi * spsi,
                    cth * cpsi};
    JetVec3 accel = r * d;
    accel.z = accel.z - ctx.g;

    const JetVec3 vel{integrate(accel.x, x.velocity[0]), integrate(accel.y, x.velocity[1]),
                      integrate(accel.z, x.velocity[2])};
    const JetVec3 pos{integrate(vel.x, x.position[0]), integrate(vel.y, x.position[1]),
                      integrate(vel.z, x.position[2])};
    return {pos, phi};
}

struct ChainJets {
    Jet s, e1, e2, dphi;
};

/// Chain signals (s, e1, e2, dphi)(t) for a position/yaw signal. The path
/// coordinate follows the closest-point equation, solved on jets by Newton
/// from a scalar seed.
ChainJets chain_jets(const MotionJets& m, const ChainContext& ctx, double s_seed) {
    const Curve& curve = *ctx.curve;
    Jet s(s_seed);
    JetVec3 eta, d1, d2;
    for (int it = 0; it < 5; ++it) {
        curve.eval_jets(s, eta, d1, d2);
        const JetVec3 rho = m.p - eta;
        const Jet g = dot(rho, d1);
        const Jet gp = dot(rho, d2) - dot(d1, d1);
        s -= g / gp;
    }
    curve.eval_jets(s, eta, d1, d2);
    const JetVec3 rho = m.p - eta;

    const Jet inv_n = 1.0 / sqrt(dot(d1, d1));
    const JetVec3 a1 = d1 * inv_n;
    // The designer yaw reference replaces the tangent azimuth only where
    // the horizontal tangent projection vanishes (straight vertical arcs).
    const bool vertical = std::hypot(d1.x.value(), d1.y.value()) <
                          kVerticalTangentTol / inv_n.value();
    Jet alpha;
    JetVec3 a2;
    if (vertical) {
        if (!ctx.fixed_alpha) {
            throw FrameDegenerateError(
                "chain evaluation: vertical tangent needs a yaw-reference override",
                s.value());
        }
        alpha = Jet(*ctx.fixed_alpha);
        a2 = {Jet(-std::sin(*ctx.fixed_alpha)), Jet(std::cos(*ctx.fixed_alpha)), Jet(0.0)};
    } else {
        const Jet inv_h = 1.0 / sqrt(d1.x * d1.x + d1.y * d1.y);
        a2 = {-d1.y * inv_h, d1.x * inv_h, Jet(0.0)};
        alpha = atan2(d1.y, d1.x);
    }
    const JetVec3 a3 = cross(a1, a2);

    ChainJets out;
    out.s = s;
    out.e1 = dot(a2, rho);
    out.e2 = dot(a3, rho);
    out.dphi = m.phi - alpha;
    out.dphi.c[0] = wrap_angle(out.dphi.c[0]);
    return out;
}

Eigen::Vector4d chain_coeff(const ChainJets& j, int k) {
    static constexpr double kFact[Jet::kCoeffs] = {1.0, 1.0, 2.0, 6.0, 24.0};
    return kFact[k] *
           Eigen::Vector4d(j.s.c[k], j.e1.c[k], j.e2.c[k], j.dphi.c[k]);
}

double seed_projection(const QuadState& x, const ChainContext& ctx) {
    return project_closest(*ctx.curve, x.position, ctx.s_hint).s_star;
}

}  // namespace

Eigen::Matrix4d w_matrix(double alpha, double beta, double epsilon) {
    const double ca = std::cos(alpha), sa = std::sin(alpha);
    const double cb = std::cos(beta), sb = std::sin(beta);
    Eigen::Matrix4d w;
    w << ca * cb, sa * cb, sb, 0,
         -sa, ca, 0, 0,
         -ca * sb, -sa * sb, cb, 0,
         -epsilon * ca * cb, -epsilon * sa * cb, -epsilon * sb, 1;
    return w;
}

Eigen::Matrix4d w_inverse(double alpha, double beta, double epsilon) {
    const double ca = std::cos(alpha), sa = std::sin(alpha);
    const double cb = std::cos(beta), sb = std::sin(beta);
    Eigen::Matrix4d w;
    w << ca * cb, -sa, -ca * sb, 0,
         sa * cb, ca, -sa * sb, 0,
         sb, 0, cb, 0,
         epsilon, 0, 0, 1;
    return w;
}

Eigen::Matrix4d w_matrix_dot(double alpha, double beta, double epsilon,
                             double alpha_dot, double beta_dot, double epsilon_dot) {
    const double ca = std::cos(alpha), sa = std::sin(alpha);
    const double cb = std::cos(beta), sb = std::sin(beta);
    Eigen::Matrix4d wd;
    const double r1x = -sa * alpha_dot * cb - ca * sb * beta_dot;
    const double r1y = ca * alpha_dot * cb - sa * sb * beta_dot;
    const double r1z = cb * beta_dot;
    wd << r1x, r1y, r1z, 0,
          -ca * alpha_dot, -sa * alpha_dot, 0, 0,
          sa * alpha_dot * sb - ca * cb * beta_dot, -ca * alpha_dot * sb - sa * cb * beta_dot,
          -sb * beta_dot, 0,
          -epsilon_dot * ca * cb - epsilon * r1x, -epsilon_dot * sa * cb - epsilon * r1y,
          -epsilon_dot * sb - epsilon * r1z, 0;
    return wd;
}

NormalFormState xi_from_plant(const QuadState& x, const ExtensionState& ext,
                              const ChainContext& ctx) {
    const double seed = seed_projection(x, ctx);
    const ChainJets cj = chain_jets(motion_jets(x, ext, Eigen::Vector4d::Zero(), ctx), ctx, seed);
    NormalFormState out;
    out.xi1 = chain_coeff(cj, 0);
    out.xi2 = chain_coeff(cj, 1);
    out.xi3 = chain_coeff(cj, 2);
    out.xi4 = chain_coeff(cj, 3);
    return out;
}

DecouplingData decoupling(const QuadState& x, const ExtensionState& ext,
                          const ChainContext& ctx, double cond_limit) {
    const double seed = seed_projection(x, ctx);
    const auto xi4_dot = [&](const Eigen::Vector4d& u) {
        return chain_coeff(chain_jets(motion_jets(x, ext, u, ctx), ctx, seed), 4);
    };
    DecouplingData d;
    d.q = xi4_dot(Eigen::Vector4d::Zero());
    for (int j = 0; j < 4; ++j) {
        d.b.col(j) = xi4_dot(Eigen::Vector4d::Unit(j)) - d.q;
    }
    const Eigen::JacobiSVD<Eigen::Matrix4d> svd(d.b);
    const double smin = svd.singularValues()(3);
    const double cond = smin > 0.0 ? svd.singularValues()(0) / smin
                                   : std::numeric_limits<double>::infinity();
    if (!(cond < cond_limit)) {
        throw SingularDecouplingError(
            "decoupling: input matrix numerically singular (cond " + std::to_string(cond) +
                ") near s = " + std::to_string(seed),
            cond);
    }
    return d;
}

Eigen::Matrix4d b_at_origin(double phi, const CurveFrame& frame, double g) {
    const double c = std::cos(phi), s = std::sin(phi);
    Eigen::Matrix4d b0;
    b0 << 0, 0, g * c, g * s,
          0, 0, g * s, -g * c,
          1, 0, 0, 0,
          0, 1, 0, 0;
    return w_matrix(frame.alpha, frame.beta, frame.epsilon) * b0;
}

namespace {

/// theta, psi from the unit thrust direction at known yaw.
void attitude_from_direction(const Eigen::Vector3d& r, double phi, double& theta,
                             double& psi) {
    const double c = std::cos(phi), s = std::sin(phi);
    const double m1 = c * r.x() + s * r.y();  // sin(theta) cos(psi)
    const double m2 = s * r.x() - c * r.y();  // sin(psi)
    const double m3 = r.z();                  // cos(theta) cos(psi)
    theta = std::atan2(m1, m3);
    psi = std::atan2(m2, std::hypot(m1, m3));
    constexpr double kHalfPi = 1.5707963267948966;
    if (!(std::abs(theta) < kHalfPi) || !(std::abs(psi) < kHalfPi)) {
        throw OutOfDomainError("attitude inversion left |theta|,|psi| < pi/2");
    }
}

}  // namespace

OutputInversion invert_outputs(const Eigen::Vector4d& xi2, const Eigen::Vector4d& xi3,
                               double phi, const CurveFrame& frame, double g) {
    const Eigen::Matrix4d winv = w_inverse(frame.alpha, frame.beta, frame.epsilon);
    const double s_dot = xi2[0];
    const Eigen::Matrix4d wdot =
        w_matrix_dot(frame.alpha, frame.beta, frame.epsilon, frame.epsilon * s_dot,
                     frame.beta_prime * s_dot, frame.epsilon_prime * s_dot);
    const Eigen::Vector4d y = winv * (xi3 - wdot * (winv * xi2));
    const Eigen::Vector3d dir_scaled = y.head<3>() + Eigen::Vector3d(0.0, 0.0, g);
    const double d = dir_scaled.norm();
    if (d < 1e-12) {
        throw OutOfDomainError("invert_outputs: vanishing thrust magnitude");
    }
    OutputInversion out;
    out.u1 = d - g;
    attitude_from_direction(dir_scaled / d, phi, out.theta, out.psi);
    out.u2 = y[3];
    return out;
}

ChainInverse plant_from_chain(const NormalFormState& xi, const ChainContext& ctx) {
    const Curve& curve = *ctx.curve;
    const double s = xi.xi1[0];
    const CurveFrame f = frame_at(curve, s, ctx.fixed_alpha);
    if (f.vertical && !ctx.fixed_alpha) {
        throw FrameDegenerateError("plant_from_chain: vertical tangent needs an override", s);
    }
    const double ca = std::cos(f.alpha), sa = std::sin(f.alpha);
    const double cb = std::cos(f.beta), sb = std::sin(f.beta);
    const Eigen::Vector3d a2(-sa, ca, 0.0);
    const Eigen::Vector3d a3(-ca * sb, -sa * sb, cb);

    ChainInverse inv;
    inv.state.position = f.point + xi.xi1[1] * a2 + xi.xi1[2] * a3;
    const double phi = xi.xi1[3] + f.alpha;
    inv.state.attitude[0] = phi;

    // Signals with coefficient slots filled stage by stage; each next chain
    // level is affine in its top open slot, so four unit probes and a base
    // evaluation solve it exactly.
    JetVec3 pj{Jet(inv.state.position[0]), Jet(inv.state.position[1]),
               Jet(inv.state.position[2])};
    Jet phj(phi);

    const auto level = [&](int k) {
        return chain_coeff(chain_jets({pj, phj}, ctx, s), k);
    };
    const auto solve_slot = [&](int slot, const Eigen::Vector4d& target,
                                int k) -> Eigen::Vector4d {
        double* coef[4] = {&pj.x.c[slot], &pj.y.c[slot], &pj.z.c[slot], &phj.c[slot]};
        const Eigen::Vector4d base = level(k);
        Eigen::Matrix4d m;
        for (int j = 0; j < 4; ++j) {
            *coef[j] = 1.0;
            m.col(j) = level(k) - base;
            *coef[j] = 0.0;
        }
        const Eigen::Vector4d sol = m.colPivHouseholderQr().solve(target - base);
        for (int j = 0; j < 4; ++j) *coef[j] = sol[j];
        return sol;
    };

    // Velocity level: coefficients are (vx, vy, vz, phi_dot).
    const Eigen::Vector4d c1 = solve_slot(1, xi.xi2, 1);
    inv.state.velocity = c1.head<3>();
    inv.state.attitude_rate[0] = c1[3];

    // Acceleration level: slots are (ax/2, ay/2, az/2, u2/2).
    const Eigen::Vector4d c2 = solve_slot(2, xi.xi3, 2);
    const Eigen::Vector3d accel = 2.0 * c2.head<3>();
    inv.ext.u2 = 2.0 * c2[3];

    const Eigen::Vector3d dir_scaled = accel + Eigen::Vector3d(0.0, 0.0, ctx.g);
    const double d = dir_scaled.norm();
    if (d < 1e-12) throw OutOfDomainError("plant_from_chain: vanishing thrust magnitude");
    const double u1 = d - ctx.g;
    if (!(std::abs(u1) < ctx.sat_level)) {
        throw OutOfDomainError("plant_from_chain: u1 outside the saturation range");
    }
    inv.ext.u1_bar = ctx.sat_level * std::atanh(u1 / ctx.sat_level);
    double theta = 0.0, psi = 0.0;
    attitude_from_direction(dir_scaled / d, phi, theta, psi);
    inv.state.attitude[1] = theta;
    inv.state.attitude[2] = psi;

    // Jerk level: slots are (jx/6, jy/6, jz/6, rho2/6).
    const Eigen::Vector4d c3 = solve_slot(3, xi.xi4, 3);
    const Eigen::Vector3d jerk = 6.0 * c3.head<3>();
    inv.ext.rho2 = 6.0 * c3[3];

    // jerk = (dr/dphi phi_dot + dr/dtheta theta_dot + dr/dpsi psi_dot) d
    //        + r sat'(u1_bar) rho1; solve the 3x3 part for
    //        (theta_dot, psi_dot, rho1).
    const double cphi = std::cos(phi), sphi = std::sin(phi);
    const double cth = std::cos(theta), sth = std::sin(theta);
    const double cpsi = std::cos(psi), spsi = std::sin(psi);
    const Eigen::Vector3d r = dir_scaled / d;
    const Eigen::Vector3d dr_dphi(-sphi * sth * cpsi + cphi * spsi,
                                  cphi * sth * cpsi + sphi * spsi, 0.0);
    const Eigen::Vector3d dr_dtheta(cphi * cth * cpsi, sphi * cth * cpsi, -sth * cpsi);
    const Eigen::Vector3d dr_dpsi(-cphi * sth * spsi + sphi * cpsi,
                                  -sphi * sth * spsi - cphi * cpsi, -cth * spsi);
    const double th = std::tanh(inv.ext.u1_bar / ctx.sat_level);
    const double sat_prime = 1.0 - th * th;
    Eigen::Matrix3d m3;
    m3.col(0) = dr_dtheta * d;
    m3.col(1) = dr_dpsi * d;
    m3.col(2) = r * sat_prime;
    const Eigen::Vector3d rhs = jerk - dr_dphi * inv.state.attitude_rate[0] * d;
    const Eigen::Vector3d sol = m3.colPivHouseholderQr().solve(rhs);
    inv.state.attitude_rate[1] = sol[0];
    inv.state.attitude_rate[2] = sol[1];
    inv.ext.rho1 = sol[2];
    return inv;
}

}  // namespace ctc
