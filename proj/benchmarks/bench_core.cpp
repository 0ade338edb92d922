#include <benchmark/benchmark.h>

#include "stew/beliefs.hpp"
#include "stew/game.hpp"
#include "stew/organizations.hpp"

using namespace stew;

static void BM_SymmetricEquilibrium(benchmark::State& state) {
  GameParams p;
  double v = 0.5;
  for (auto _ : state) {
    v = v >= 0.999 ? 0.5 : v + 0.001;
    benchmark::DoNotOptimize(symmetric_equilibrium(v, p));
  }
}
BENCHMARK(BM_SymmetricEquilibrium);

static void BM_BetaPosterior(benchmark::State& state) {
  const BetaBelief prior{5.0, 3.0, Side::approval};
  const ConstraintWindow window;
  Rng rng = make_stream(0, "bench");
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(posterior_from_signal(prior, 0.8, window, n, rng).belief.mean());
  }
}
BENCHMARK(BM_BetaPosterior)->Arg(1000)->Arg(10000);

static void BM_Transitions(benchmark::State& state) {
  PlanningContext ctx;
  const int bins = static_cast<int>(state.range(0));
  for (auto _ : state) {
    SignalTransitions t(Side::approval, bins, ctx);
    benchmark::DoNotOptimize(t.outcome(0, 0).next_state);
  }
}
BENCHMARK(BM_Transitions)->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond);

static void BM_ValueIteration(benchmark::State& state) {
  const SignalTransitions t(Side::approval, 50, PlanningContext{});
  const TabularMdp mdp = build_mdp(t, OrgType::participatory, 0.9);
  for (auto _ : state) benchmark::DoNotOptimize(value_iteration(mdp, 1e-6).iterations);
}
BENCHMARK(BM_ValueIteration)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
