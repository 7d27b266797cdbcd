#include <benchmark/benchmark.h>

#include "ctc/controller.hpp"
#include "ctc/curve.hpp"
#include "ctc/normal_form.hpp"
#include "ctc/simulator.hpp"

using namespace ctc;

namespace {

constexpr double kPi = 3.14159265358979323846;

ChainContext helix_ctx(const Curve& curve) {
    ChainContext ctx;
    ctx.curve = &curve;
    ctx.s_hint = 2.0;
    return ctx;
}

QuadState offset_state(const Curve& curve) {
    const CurveFrame f = frame_at(curve, 2.0);
    QuadState q;
    q.position = f.point + Eigen::Vector3d(0.05, -0.03, 0.02);
    q.velocity = 0.5 * f.tangent;
    q.attitude = {f.alpha + 0.1, 0.05, -0.04};
    q.attitude_rate = {0.1, 0.02, -0.01};
    return q;
}

void BM_ProjectWithHint(benchmark::State& state) {
    const auto helix = make_helix(1.0, 2.0 * kPi);
    const Eigen::Vector3d p = helix->at(2.0).p + Eigen::Vector3d(0.1, 0.05, -0.02);
    for (auto _ : state) {
        benchmark::DoNotOptimize(project_closest(*helix, p, 2.0));
    }
}
BENCHMARK(BM_ProjectWithHint);

void BM_ProjectGridSeeded(benchmark::State& state) {
    const auto helix = make_helix(1.0, 2.0 * kPi);
    const Eigen::Vector3d p = helix->at(2.0).p + Eigen::Vector3d(0.1, 0.05, -0.02);
    for (auto _ : state) {
        benchmark::DoNotOptimize(project_closest(*helix, p));
    }
}
BENCHMARK(BM_ProjectGridSeeded);

void BM_XiFromPlant(benchmark::State& state) {
    const auto helix = make_helix(1.0, 2.0 * kPi);
    const ChainContext ctx = helix_ctx(*helix);
    const QuadState q = offset_state(*helix);
    const ExtensionState ext{0.1, 0.05, -0.02, 0.01};
    for (auto _ : state) {
        benchmark::DoNotOptimize(xi_from_plant(q, ext, ctx));
    }
}
BENCHMARK(BM_XiFromPlant);

void BM_Decoupling(benchmark::State& state) {
    const auto helix = make_helix(1.0, 2.0 * kPi);
    const ChainContext ctx = helix_ctx(*helix);
    const QuadState q = offset_state(*helix);
    const ExtensionState ext{0.1, 0.05, -0.02, 0.01};
    for (auto _ : state) {
        benchmark::DoNotOptimize(decoupling(q, ext, ctx));
    }
}
BENCHMARK(BM_Decoupling);

void BM_FullStateScenarioStep(benchmark::State& state) {
    ScenarioConfig cfg;
    cfg.curve.type = CurveType::Helix;
    cfg.curve.pitch = 2.0 * kPi;
    cfg.init.e1 = 0.2;
    cfg.init.e2 = -0.1;
    cfg.reference.v_star = 0.5;
    cfg.t_end = cfg.dt * state.range(0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_scenario(cfg));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FullStateScenarioStep)->Arg(100);

void BM_OutputFeedbackScenarioStep(benchmark::State& state) {
    ScenarioConfig cfg;
    cfg.curve.type = CurveType::Helix;
    cfg.curve.pitch = 2.0 * kPi;
    cfg.init.e1 = 0.2;
    cfg.init.e2 = -0.1;
    cfg.reference.v_star = 0.5;
    cfg.mode = ControllerMode::OutputFeedback;
    cfg.t_end = cfg.dt * state.range(0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_scenario(cfg));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_OutputFeedbackScenarioStep)->Arg(100);

}  // namespace

BENCHMARK_MAIN();
