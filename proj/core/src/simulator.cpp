#include "ctc/simulator.hpp"

#include <cmath>

namespace ctc {

namespace {

constexpr int kPlantDim = 16;  // 12 rigid-body states + 4 extension states
constexpr int kObsDim = 20;

QuadState unpack_quad(const Eigen::VectorXd& x) {
    QuadState q;
    q.position = x.segment<3>(0);
    q.velocity = x.segment<3>(3);
    q.attitude = x.segment<3>(6);
    q.attitude_rate = x.segment<3>(9);
    return q;
}

ExtensionState unpack_ext(const Eigen::VectorXd& x) {
    return {x[12], x[13], x[14], x[15]};
}

ObserverState unpack_observer(const Eigen::VectorXd& x) {
    ObserverState o;
    for (int lvl = 0; lvl < 4; ++lvl) o.xi_hat[lvl] = x.segment<4>(kPlantDim + 4 * lvl);
    o.sigma_hat = x.segment<4>(kPlantDim + 16);
    return o;
}

/// One controller + dynamics evaluation at (t, x); shared between the RK4
/// stage derivatives and the per-step logging.
struct StageEval {
    QuadState quad;
    ExtensionState ext;
    ObserverState obs;
    DeviationState dev;
    double dist = 0.0;
    NormalFormState xi;
    Eigen::Vector4d u_bar = Eigen::Vector4d::Zero();
    VirtualControls applied;
    ExtensionRates ext_rates;
    QuadStateRates quad_rates;
    ObserverRates obs_rates;
};

class ClosedLoop {
public:
    ClosedLoop(const ScenarioConfig& cfg, std::shared_ptr<const Curve> curve)
        : cfg_(cfg),
          curve_(std::move(curve)),
          tracker_(curve_, cfg.alpha_override()),
          gains_(cfg.controller_gains()),
          ogains_(cfg.observer_gains()) {
        ctx_.curve = curve_.get();
        ctx_.g = cfg.params.g;
        ctx_.sat_level = cfg.sat_level();
        ctx_.fixed_alpha = cfg.alpha_override();
    }

    bool output_mode() const { return cfg_.mode == ControllerMode::OutputFeedback; }
    int dim() const { return output_mode() ? kPlantDim + kObsDim : kPlantDim; }

    StageEval evaluate(double t, const Eigen::VectorXd& x) {
        StageEval ev;
        ev.quad = unpack_quad(x);
        ev.ext = unpack_ext(x);

        ev.dev = tracker_.deviations(ev.quad.position, ev.quad.attitude[0],
                                     ev.quad.attitude[1], ev.quad.attitude[2]);
        ev.dist = tracker_.last_projection().distance;
        ctx_.s_hint = ev.dev.s;
        ev.xi = xi_from_plant(ev.quad, ev.ext, ctx_);

        if (output_mode()) {
            ev.obs = unpack_observer(x);
            const Eigen::Vector4d xi1_meas(ev.dev.s, ev.dev.e1, ev.dev.e2, ev.dev.delta_phi);
            const Eigen::Vector4d xt1 = error_xi1(xi1_meas, t, cfg_.reference);
            const CurveFrame frame = tracker_.frame(ev.dev.s);
            const Eigen::Matrix4d b0 = b_at_origin(ev.quad.attitude[0], frame, cfg_.params.g);
            ev.u_bar = output_feedback_law(ev.obs, xt1, b0, gains_, ogains_.N);
            ev.obs_rates = observer_derivative(ev.obs, xt1, ev.u_bar, b0, ogains_);
        } else {
            const DecouplingData dec = decoupling(ev.quad, ev.ext, ctx_);
            const NormalFormState xt = error_state(ev.xi, t, cfg_.reference);
            ev.u_bar = full_state_law(xt, dec, gains_);
        }

        const ExtensionOutput ext_out = extension_derivative(ev.ext, ev.u_bar, ctx_.sat_level);
        ev.ext_rates = ext_out.rates;
        ev.applied = ext_out.applied;
        ev.quad_rates = plant_derivative(ev.quad, ev.applied, cfg_.params);
        return ev;
    }

    Eigen::VectorXd derivative(double t, const Eigen::VectorXd& x) {
        const StageEval ev = evaluate(t, x);
        Eigen::VectorXd d(dim());
        d.segment<3>(0) = ev.quad_rates.position_dot;
        d.segment<3>(3) = ev.quad_rates.velocity_dot;
        d.segment<3>(6) = ev.quad_rates.attitude_dot;
        d.segment<3>(9) = ev.quad_rates.attitude_rate_dot;
        d[12] = ev.ext_rates.u1_bar_dot;
        d[13] = ev.ext_rates.rho1_dot;
        d[14] = ev.ext_rates.u2_dot;
        d[15] = ev.ext_rates.rho2_dot;
        if (output_mode()) {
            for (int lvl = 0; lvl < 4; ++lvl) {
                d.segment<4>(kPlantDim + 4 * lvl) = ev.obs_rates.xi_hat_dot[lvl];
            }
            d.segment<4>(kPlantDim + 16) = ev.obs_rates.sigma_hat_dot;
        }
        return d;
    }

    Eigen::VectorXd initial_state() {
        Eigen::VectorXd x = Eigen::VectorXd::Zero(dim());
        const QuadState q0 = cfg_.initial_state(*curve_);
        x.segment<3>(0) = q0.position;
        x.segment<3>(3) = q0.velocity;
        x.segment<3>(6) = q0.attitude;
        x.segment<3>(9) = q0.attitude_rate;
        if (output_mode()) {
            // Estimator starts from the available measurements: level 1 at
            // the measured error, everything else at zero.
            const DeviationState dev =
                tracker_.deviations(q0.position, q0.attitude[0], q0.attitude[1], q0.attitude[2]);
            const Eigen::Vector4d xi1_meas(dev.s, dev.e1, dev.e2, dev.delta_phi);
            x.segment<4>(kPlantDim) = error_xi1(xi1_meas, 0.0, cfg_.reference);
        }
        return x;
    }

private:
    const ScenarioConfig& cfg_;
    std::shared_ptr<const Curve> curve_;
    PathTracker tracker_;
    ControllerGains gains_;
    ObserverGains ogains_;
    ChainContext ctx_;
};

void append_row(SimLog& log, double t, const StageEval& ev, const MassGeometryParams& params) {
    log.t.push_back(t);
    log.quad.push_back(ev.quad);
    log.dev.push_back(ev.dev);
    log.dist.push_back(ev.dist);
    log.xi.push_back(ev.xi);
    log.controls.push_back(ev.applied);
    log.forces.push_back(allocate_forces(ev.applied, params));
    if (log.output_mode) log.observer.push_back(ev.obs);
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& cfg) {
    cfg.validate();
    RunResult out;
    const std::shared_ptr<Curve> curve = cfg.build_curve();
    ClosedLoop loop(cfg, curve);

    out.log.output_mode = loop.output_mode();
    out.log.dt = cfg.dt;
    const int steps = static_cast<int>(std::llround(cfg.t_end / cfg.dt));
    out.log.t.reserve(steps + 1);

    try {
        Eigen::VectorXd x = loop.initial_state();
        const auto f = [&loop](double t, const Eigen::VectorXd& s) {
            return loop.derivative(t, s);
        };
        for (int k = 0; k <= steps; ++k) {
            const double t = k * cfg.dt;
            append_row(out.log, t, loop.evaluate(t, x), cfg.params);
            if (k == steps) break;
            x = rk4_step(f, x, t, cfg.dt);
            detail::check_finite(x, "run_scenario state");
        }
    } catch (const ConfigError&) {
        throw;  // configuration-level problem, not a simulation abort
    } catch (const std::exception& e) {
        out.aborted = true;
        out.diagnostic = e.what();
    }
    out.metrics = compute_metrics(out.log, cfg);
    return out;
}

Metrics compute_metrics(const SimLog& log, const ScenarioConfig& cfg) {
    Metrics m;
    if (log.size() == 0) return m;
    const double t_last = log.t.back();
    const double tail_start = t_last - cfg.tail_fraction * t_last;

    for (size_t i = 0; i < log.size(); ++i) {
        if (log.forces[i].f.minCoeff() < 0.0) ++m.negative_thrust_steps;
        if (log.t[i] < tail_start) continue;
        m.v_err_max = std::max(m.v_err_max, std::abs(log.xi[i].xi2[0] - cfg.reference.v_star));
        m.dist_max = std::max(m.dist_max, log.dist[i]);
        m.att_err_max[0] = std::max(m.att_err_max[0], std::abs(log.dev[i].delta_phi));
        m.att_err_max[1] = std::max(m.att_err_max[1], std::abs(log.dev[i].delta_theta));
        m.att_err_max[2] = std::max(m.att_err_max[2], std::abs(log.dev[i].delta_psi));
    }
    m.velocity_ok = m.v_err_max <= cfg.tol.v_tilde_max;
    m.distance_ok = m.dist_max <= cfg.tol.e_max;
    m.attitude_ok = std::max({m.att_err_max[0], m.att_err_max[1], m.att_err_max[2]}) <=
                    cfg.tol.theta_tilde_max;

    // First time after which the distance never exceeds e_max again.
    m.settling_time = std::numeric_limits<double>::infinity();
    for (size_t i = log.size(); i-- > 0;) {
        if (log.dist[i] > cfg.tol.e_max) break;
        m.settling_time = log.t[i];
    }
    return m;
}

}  // namespace ctc
