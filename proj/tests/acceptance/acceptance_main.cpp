// Acceptance suite: every release-gating property of the artifact, one
// pass/fail line each. Run via ctest or directly:
//   acceptance --tool path/to/ctcsim --scenarios path/to/scenarios
#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <vector>

#include "cli_app.hpp"
#include "ctc/controller.hpp"
#include "ctc/csv.hpp"
#include "ctc/curve.hpp"
#include "ctc/dynamics.hpp"
#include "ctc/normal_form.hpp"
#include "ctc/simulator.hpp"
#include "openloop.hpp"
#include "quadratic_curve.hpp"

using namespace ctc;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string g_tool;
std::string g_scenarios;

std::mt19937& rng() {
    static std::mt19937 gen(20260808);
    return gen;
}
double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng());
}

struct Check {
    std::ostringstream detail;
    bool ok = true;

    void expect(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            detail << (detail.str().empty() ? "" : "; ") << what;
        }
    }
};

ScenarioConfig standard_helix(ControllerMode mode) {
    const std::string file =
        mode == ControllerMode::FullState ? "helix_state.cfg" : "helix_output.cfg";
    return parse_config(g_scenarios + "/" + file);
}

// ---------------------------------------------------------------- 1
bool mixer_identity(Check& c) {
    MassGeometryParams p;
    p.m = 1.4;
    p.C = 0.8;
    p.rho = 1.6;
    p.ell = 0.3;
    p.J0 = 0.02;
    p.Jpsi = 0.04;
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        RotorForces f;
        for (int j = 0; j < 4; ++j) f.f[j] = uniform(-8.0, 8.0);
        const RotorForces back = allocate_forces(mix_forces(f, p), p);
        worst = std::max(worst, (back.f - f.f).cwiseAbs().maxCoeff());
        VirtualControls u;
        for (int j = 0; j < 4; ++j) u.u[j] = uniform(-15.0, 15.0);
        const VirtualControls uback = mix_forces(allocate_forces(u, p), p);
        worst = std::max(worst, (uback.u - u.u).cwiseAbs().maxCoeff());
    }
    c.detail << "max round-trip error " << worst;
    c.expect(worst < 1e-12, "mixer round trip above 1e-12");
    return c.ok;
}

// ---------------------------------------------------------------- 2
bool w_matrix_facts(Check& c) {
    double worst_det = 0.0, worst_inv = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double a = uniform(-kPi, kPi);
        const double b = uniform(-1.45, 1.45);
        const double e = uniform(-4.0, 4.0);
        const Eigen::Matrix4d w = w_matrix(a, b, e);
        worst_det = std::max(worst_det, std::abs(w.determinant() - 1.0));
        worst_inv = std::max(worst_inv, (w * w_inverse(a, b, e) - Eigen::Matrix4d::Identity())
                                            .cwiseAbs()
                                            .maxCoeff());
    }
    c.detail << "max |det-1| " << worst_det << ", max |W Winv - I| " << worst_inv;
    c.expect(worst_det < 1e-13, "determinant deviates");
    c.expect(worst_inv < 1e-13, "inverse deviates");
    return c.ok;
}

// ---------------------------------------------------------------- 3
bool chain_consistency(Check& c) {
    ScenarioConfig cfg = standard_helix(ControllerMode::FullState);
    cfg.t_end = 3.0;

    const auto chain_errors = [&](double dt) {
        ScenarioConfig run_cfg = cfg;
        run_cfg.dt = dt;
        const RunResult r = run_scenario(run_cfg);
        std::array<double, 3> err{0, 0, 0}, scale{0, 0, 0};
        for (size_t k = 1; k + 1 < r.log.size(); ++k) {
            const auto& xs = r.log.xi;
            const Eigen::Vector4d fd1 = (xs[k + 1].xi1 - xs[k - 1].xi1) / (2 * dt);
            const Eigen::Vector4d fd2 = (xs[k + 1].xi2 - xs[k - 1].xi2) / (2 * dt);
            const Eigen::Vector4d fd3 = (xs[k + 1].xi3 - xs[k - 1].xi3) / (2 * dt);
            err[0] = std::max(err[0], (fd1 - xs[k].xi2).cwiseAbs().maxCoeff());
            err[1] = std::max(err[1], (fd2 - xs[k].xi3).cwiseAbs().maxCoeff());
            err[2] = std::max(err[2], (fd3 - xs[k].xi4).cwiseAbs().maxCoeff());
            scale[0] = std::max(scale[0], xs[k].xi2.cwiseAbs().maxCoeff());
            scale[1] = std::max(scale[1], xs[k].xi3.cwiseAbs().maxCoeff());
            scale[2] = std::max(scale[2], xs[k].xi4.cwiseAbs().maxCoeff());
        }
        for (int i = 0; i < 3; ++i) err[i] /= scale[i];
        return err;
    };

    const auto coarse = chain_errors(1e-3);
    const auto fine = chain_errors(5e-4);
    for (int i = 0; i < 3; ++i) {
        const double ratio = coarse[i] / fine[i];
        c.detail << "level " << i + 1 << ": rel err " << coarse[i] << " (x" << ratio
                 << " on half step) ";
        c.expect(coarse[i] < 1e-3, "relative error above 1e-3");
        c.expect(ratio > 2.5 && ratio < 6.5, "halving the step is not ~4x better");
    }
    return c.ok;
}

// ---------------------------------------------------------------- 4
bool decoupling_facts(Check& c) {
    double worst_q = 0.0, worst_b = 0.0, worst_oracle = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double alpha = uniform(-kPi, kPi);
        const double beta = uniform(-1.2, 1.2);
        const double eps = uniform(-2.0, 2.0);
        const double phi = uniform(-kPi, kPi);
        const test::QuadraticCurve curve(alpha, beta, eps);
        ChainContext ctx;
        ctx.curve = &curve;
        ctx.s_hint = 0.0;

        QuadState q0;
        q0.position = curve.at(0.0).p;
        q0.attitude = {phi, 0.0, 0.0};
        const DecouplingData dec = decoupling(q0, ExtensionState{}, ctx);
        worst_q = std::max(worst_q, dec.q.norm());
        const Eigen::Matrix4d b0 = b_at_origin(phi, frame_at(curve, 0.0), ctx.g);
        worst_b = std::max(worst_b, (dec.b - b0).cwiseAbs().maxCoeff());

        // Numerical-differentiation oracle: integrate the open loop with
        // frozen inputs and difference the logged xi4.
        test::OpenLoop loop;
        loop.sat_level = ctx.sat_level;
        const auto xi4_dot = [&](const Eigen::Vector4d& u) {
            loop.input = [&u](double) { return u; };
            const double h = 1e-4;
            const Eigen::VectorXd x0 = test::OpenLoop::pack(q0, ExtensionState{});
            const Eigen::VectorXd xp = loop.step(x0, 0.0, h);
            const Eigen::VectorXd xm = loop.step(x0, 0.0, -h);
            const NormalFormState xip =
                xi_from_plant(test::OpenLoop::unpack_quad(xp), test::OpenLoop::unpack_ext(xp), ctx);
            const NormalFormState xim =
                xi_from_plant(test::OpenLoop::unpack_quad(xm), test::OpenLoop::unpack_ext(xm), ctx);
            return ((xip.xi4 - xim.xi4) / (2.0 * h)).eval();
        };
        const Eigen::Vector4d q_fd = xi4_dot(Eigen::Vector4d::Zero());
        worst_oracle = std::max(worst_oracle, q_fd.norm() / ctx.g);
        for (int j = 0; j < 4; ++j) {
            const Eigen::Vector4d col = xi4_dot(Eigen::Vector4d::Unit(j)) - q_fd;
            worst_oracle =
                std::max(worst_oracle, (col - b0.col(j)).cwiseAbs().maxCoeff() / ctx.g);
        }
    }
    c.detail << "max |q(0)| " << worst_q << ", max |b - W B0| " << worst_b
             << ", max oracle gap (rel) " << worst_oracle;
    c.expect(worst_q < 1e-8, "q(0, phi) not zero");
    c.expect(worst_b < 1e-8, "b(0, phi) deviates from the closed form");
    c.expect(worst_oracle < 1e-5, "finite-difference oracle disagrees");
    return c.ok;
}

// ---------------------------------------------------------------- 5
bool pole_placement(Check& c) {
    const std::array<double, 4> poles{-1.5, -2.0, -2.5, -3.0};
    const ControllerGains gains = gains_from_poles(
        {std::complex<double>(poles[0]), std::complex<double>(poles[1]),
         std::complex<double>(poles[2]), std::complex<double>(poles[3])});

    const auto curve = make_helix(1.0, 2.0 * kPi);
    ChainContext ctx;
    ctx.curve = curve.get();
    ReferenceSpec ref;
    ref.v_star = 0.5;
    ref.s0 = 2.0;
    const double t = 0.7;

    const auto closed_loop = [&](const Eigen::VectorXd& xt_in) {
        NormalFormState xi;
        xi.xi1 = xt_in.segment<4>(0) + reference_xi1(t, ref);
        xi.xi2 = xt_in.segment<4>(4) + Eigen::Vector4d(ref.v_star, 0, 0, 0);
        xi.xi3 = xt_in.segment<4>(8);
        xi.xi4 = xt_in.segment<4>(12);
        ChainContext cx = ctx;
        cx.s_hint = xi.xi1[0];
        const ChainInverse inv = plant_from_chain(xi, cx);
        const NormalFormState xi_a = xi_from_plant(inv.state, inv.ext, cx);
        const NormalFormState xt_a = error_state(xi_a, t, ref);
        const DecouplingData dec = decoupling(inv.state, inv.ext, cx);
        const Eigen::Vector4d u = full_state_law(xt_a, dec, gains);
        Eigen::VectorXd d(16);
        d.segment<4>(0) = xt_a.xi2;
        d.segment<4>(4) = xt_a.xi3;
        d.segment<4>(8) = xt_a.xi4;
        d.segment<4>(12) = dec.q + dec.b * u;
        return d;
    };

    Eigen::MatrixXd jac(16, 16);
    const double h = 1e-5;
    for (int j = 0; j < 16; ++j) {
        Eigen::VectorXd xp = Eigen::VectorXd::Zero(16), xm = Eigen::VectorXd::Zero(16);
        xp[j] = h;
        xm[j] = -h;
        jac.col(j) = (closed_loop(xp) - closed_loop(xm)) / (2.0 * h);
    }

    // Statement-2 block structure, entrywise.
    Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(16, 16);
    expected.block<12, 12>(0, 4).setIdentity();
    for (int j = 0; j < 4; ++j) {
        const double g[4] = {gains.gamma1, gains.gamma2, gains.gamma3, gains.gamma4};
        expected.block<4, 4>(12, 4 * j) = -g[j] * Eigen::Matrix4d::Identity();
    }
    const double block_err = (jac - expected).cwiseAbs().maxCoeff();
    c.detail << "block-structure error " << block_err;
    c.expect(block_err < 1e-8, "closed-loop Jacobian deviates from the companion blocks");

    const Eigen::VectorXcd eig = Eigen::EigenSolver<Eigen::MatrixXd>(jac).eigenvalues();
    double worst = 0.0;
    std::array<int, 4> multiplicity{0, 0, 0, 0};
    for (int i = 0; i < 16; ++i) {
        int best = 0;
        double best_err = std::numeric_limits<double>::infinity();
        for (int p = 0; p < 4; ++p) {
            const double err = std::abs(eig[i] - std::complex<double>(poles[p]));
            if (err < best_err) {
                best_err = err;
                best = p;
            }
        }
        ++multiplicity[best];
        worst = std::max(worst, best_err);
    }
    c.detail << ", max eigenvalue error " << worst;
    c.expect(worst < 1e-5, "eigenvalues off the chosen poles");
    for (int p = 0; p < 4; ++p) {
        c.expect(multiplicity[p] == 4, "pole multiplicity is not four");
    }
    return c.ok;
}

// ---------------------------------------------------------------- 6
bool objective_full_state(Check& c) {
    const ScenarioConfig cfg = standard_helix(ControllerMode::FullState);
    const RunResult r = run_scenario(cfg);
    c.detail << "v_err " << r.metrics.v_err_max << " (tol " << cfg.tol.v_tilde_max << "), dist "
             << r.metrics.dist_max << " (tol " << cfg.tol.e_max << "), att "
             << std::max({r.metrics.att_err_max[0], r.metrics.att_err_max[1],
                          r.metrics.att_err_max[2]})
             << " (tol " << cfg.tol.theta_tilde_max << "), settle " << r.metrics.settling_time;
    c.expect(!r.aborted, "run aborted: " + r.diagnostic);
    c.expect(r.metrics.velocity_ok, "velocity objective failed");
    c.expect(r.metrics.distance_ok, "distance objective failed");
    c.expect(r.metrics.attitude_ok, "attitude objective failed");
    c.expect(r.metrics.settling_time <= 20.0, "did not settle within the run");
    return c.ok;
}

// ---------------------------------------------------------------- 7
bool objective_output_feedback(Check& c) {
    const ScenarioConfig cfg = standard_helix(ControllerMode::OutputFeedback);
    const RunResult r = run_scenario(cfg);
    c.detail << "v_err " << r.metrics.v_err_max << ", dist " << r.metrics.dist_max << ", att "
             << std::max({r.metrics.att_err_max[0], r.metrics.att_err_max[1],
                          r.metrics.att_err_max[2]});
    c.expect(!r.aborted, "run aborted: " + r.diagnostic);
    c.expect(r.metrics.velocity_ok, "velocity objective failed");
    c.expect(r.metrics.distance_ok, "distance objective failed");
    c.expect(r.metrics.attitude_ok, "attitude objective failed");

    // High-gain sweep: steady-state deviation must be non-increasing from
    // the empirically found threshold on, reached at or before k = 20.
    std::vector<double> ks{5.0, 10.0, 20.0, 40.0};
    std::vector<double> dist;
    c.detail << "; k sweep dist:";
    for (double k : ks) {
        ScenarioConfig sweep_cfg = cfg;
        sweep_cfg.observer_k = k;
        const RunResult rr = run_scenario(sweep_cfg);
        dist.push_back(rr.aborted ? std::numeric_limits<double>::infinity()
                                  : rr.metrics.dist_max);
        c.detail << " " << dist.back();
    }
    size_t threshold = dist.size() - 1;
    while (threshold > 0 && dist[threshold] <= dist[threshold - 1] * 1.01) --threshold;
    c.detail << " (non-increasing from k = " << ks[threshold] << ")";
    c.expect(threshold <= 2, "high-gain trend not established by k = 20");
    return c.ok;
}

// ---------------------------------------------------------------- 8
bool saturation_bound(Check& c) {
    for (const auto& entry : fs::directory_iterator(g_scenarios)) {
        if (entry.path().extension() != ".cfg") continue;
        const ScenarioConfig cfg = parse_config(entry.path().string());
        const RunResult r = run_scenario(cfg);
        c.expect(!r.aborted, cfg.name + " aborted: " + r.diagnostic);
        const double level = cfg.sat_level();
        double worst = 0.0;
        for (size_t i = 0; i < r.log.size(); ++i) {
            worst = std::max(worst, std::abs(r.log.controls[i].u[0]));
        }
        c.detail << cfg.name << " max|u1| " << worst << " <= " << level << "; ";
        c.expect(worst <= level, cfg.name + " violates the thrust bound");
    }
    return c.ok;
}

// ---------------------------------------------------------------- 9
bool projection_oracle(Check& c) {
    const auto curves = {make_line({0, 0, 0}, {1, 0, 0}, 500.0), make_circle(2.0),
                         make_helix(1.0, 2.0 * kPi)};
    const int grid_n = 1000000;
    for (const auto& curve : curves) {
        const SRange r = curve->s_range();
        const double step = r.length() / (r.periodic ? grid_n : grid_n - 1);
        std::vector<Eigen::Vector3d> pts(grid_n);
        for (int i = 0; i < grid_n; ++i) pts[i] = curve->at(r.min + i * step).p;

        double worst = 0.0;
        for (int qi = 0; qi < 100; ++qi) {
            const double s_true = uniform(r.min + 0.05 * r.length(), r.min + 0.95 * r.length());
            const CurveFrame f = frame_at(*curve, s_true);
            const Eigen::Vector3d n1(-std::sin(f.alpha), std::cos(f.alpha), 0.0);
            const Eigen::Vector3d n2 = f.tangent.cross(n1);
            const Eigen::Vector3d p = f.point + uniform(-0.4, 0.4) * n1 + uniform(-0.4, 0.4) * n2;

            int best = 0;
            double fbest = std::numeric_limits<double>::infinity();
            for (int i = 0; i < grid_n; ++i) {
                const double d2 = (p - pts[i]).squaredNorm();
                if (d2 < fbest) {
                    fbest = d2;
                    best = i;
                }
            }
            const double s_grid = r.min + best * step;
            const ProjectionResult pr = project_closest(*curve, p);
            double gap = std::abs(pr.s_star - s_grid);
            if (r.periodic) gap = std::min(gap, r.length() - std::fmod(gap, r.length()));
            worst = std::max(worst, gap / step);
            c.expect(pr.converged, curve->name() + " projection did not converge");
        }
        c.detail << curve->name() << " worst gap " << worst << " grid cells; ";
        c.expect(worst <= 1.0 + 1e-9, curve->name() + " disagrees with the brute-force grid");
    }
    return c.ok;
}

// ---------------------------------------------------------------- 10
int spawn_tool(const std::string& args) {
    const int status = std::system((g_tool + " " + args + " > /dev/null 2>&1").c_str());
    if (status == -1) return -1;
    return WEXITSTATUS(status);
}

bool determinism_and_cli(Check& c) {
    // Bitwise determinism of a repeated run.
    ScenarioConfig cfg = standard_helix(ControllerMode::OutputFeedback);
    cfg.t_end = 3.0;
    const RunResult a = run_scenario(cfg);
    const RunResult b = run_scenario(cfg);
    bool identical = a.log.size() == b.log.size() && !a.aborted && !b.aborted;
    for (size_t i = 0; identical && i < a.log.size(); ++i) {
        identical = a.log.quad[i].position == b.log.quad[i].position &&
                    a.log.quad[i].velocity == b.log.quad[i].velocity &&
                    a.log.quad[i].attitude == b.log.quad[i].attitude &&
                    a.log.quad[i].attitude_rate == b.log.quad[i].attitude_rate &&
                    a.log.controls[i].u == b.log.controls[i].u &&
                    a.log.dist[i] == b.log.dist[i];
    }
    c.expect(identical, "repeated runs differ");

    // Exact CSV round trip of the same log.
    const std::string tmp = (fs::temp_directory_path() / "ctcsim_acceptance").string();
    fs::create_directories(tmp);
    const std::string csv_path = tmp + "/determinism.csv";
    write_csv(a.log, csv_path);
    const CsvData data = read_csv(csv_path);
    bool csv_ok = data.rows.size() == a.log.size() && data.columns == csv_columns(true);
    for (size_t i = 0; csv_ok && i < a.log.size(); ++i) {
        csv_ok = data.rows[i][0] == a.log.t[i] && data.rows[i][1] == a.log.quad[i].position[0] &&
                 data.rows[i][13] == a.log.dev[i].s && data.rows[i][18] == a.log.dist[i] &&
                 data.rows[i][19] == a.log.controls[i].u[0];
    }
    c.expect(csv_ok, "CSV round trip not exact");

    // Exit-code contract through the real binary.
    const auto write_cfg = [&](const std::string& name, const std::string& text) {
        const std::string path = tmp + "/" + name;
        std::ofstream out(path);
        out << text;
        return path;
    };
    const std::string good = write_cfg("good.cfg",
                                       "scenario.name = acc_good\ncurve.type = line\n"
                                       "reference.v_star = 1\nsim.t_end = 0.5\n");
    const std::string bad = write_cfg("bad.cfg", "sim.dt = -0.1\n");
    const std::string unmet = write_cfg("unmet.cfg",
                                        "scenario.name = acc_unmet\ncurve.type = helix\n"
                                        "reference.v_star = 0.5\ninit.e1 = 0.2\n"
                                        "sim.t_end = 0.5\ntolerances.e_max = 1e-6\n");
    const std::string abort_cfg = write_cfg(
        "abort.cfg",
        "scenario.name = acc_abort\ncurve.type = circle\ncurve.radius = 2\n"
        "reference.v_star = 0.5\ninit.position = 0,0,0\ninit.velocity = 0,0,0\n"
        "init.attitude = 0,0,0\ninit.rates = 0,0,0\nsim.t_end = 1\n");

    struct Expectation {
        std::string args;
        int code;
    };
    const std::vector<Expectation> cases = {
        {"validate " + good, 0},
        {"validate " + bad, 2},
        {"run --config " + good + " --out " + tmp + "/out", 0},
        {"run --config " + unmet + " --out " + tmp + "/out", 1},
        {"run --config " + bad + " --out " + tmp + "/out", 2},
        {"run --config " + abort_cfg + " --out " + tmp + "/out", 3},
        {"run --config " + good + " --out /dev/null/forbidden", 4},
    };
    for (const auto& e : cases) {
        const int rc = spawn_tool(e.args);
        if (rc != e.code) {
            c.expect(false, "ctcsim " + e.args + " exited " + std::to_string(rc) +
                                ", expected " + std::to_string(e.code));
        }
    }
    c.detail << "determinism, CSV round trip and " << cases.size() << " exit-code cases";
    return c.ok;
}

struct Criterion {
    int id;
    std::string title;
    double budget_s;
    std::function<bool(Check&)> fn;
};

}  // namespace

int main(int argc, char** argv) {
    for (int i = 1; i + 1 < argc; i += 2) {
        const std::string key = argv[i];
        if (key == "--tool") g_tool = argv[i + 1];
        if (key == "--scenarios") g_scenarios = argv[i + 1];
    }
    if (g_scenarios.empty()) g_scenarios = "scenarios";
    if (g_tool.empty()) g_tool = "ctcsim";

    const std::vector<Criterion> criteria = {
        {1, "mixer identity on 1000 random inputs", 1.0, mixer_identity},
        {2, "W-matrix determinant and inverse", 1.0, w_matrix_facts},
        {3, "normal-form chain differentiates at O(h^2)", 10.0, chain_consistency},
        {4, "decoupling origin facts vs closed form and oracle", 30.0, decoupling_facts},
        {5, "closed-loop pole placement, 16 eigenvalues", 5.0, pole_placement},
        {6, "helix objective, full-state controller", 10.0, objective_full_state},
        {7, "helix objective, output feedback + k sweep", 60.0, objective_output_feedback},
        {8, "thrust saturation bound on every bundled scenario", 120.0, saturation_bound},
        {9, "projection vs brute-force grid", 30.0, projection_oracle},
        {10, "determinism, CSV schema, CLI exit codes", 60.0, determinism_and_cli},
    };

    int failures = 0;
    for (const Criterion& cr : criteria) {
        Check check;
        const auto t0 = std::chrono::steady_clock::now();
        bool ok = false;
        try {
            ok = cr.fn(check);
        } catch (const std::exception& e) {
            check.detail << "exception: " << e.what();
            ok = false;
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (secs > cr.budget_s) {
            ok = false;
            check.detail << "; exceeded " << cr.budget_s << " s budget";
        }
        std::cout << (ok ? "PASS" : "FAIL") << "  [" << cr.id << "] " << cr.title << "  ("
                  << check.detail.str() << ", " << secs << " s)\n";
        if (!ok) ++failures;
    }
    std::cout << (failures == 0 ? "ALL CRITERIA PASSED" : "CRITERIA FAILED") << " ("
              << criteria.size() - failures << "/" << criteria.size() << ")\n";
    return failures == 0 ? 0 : 1;
}
