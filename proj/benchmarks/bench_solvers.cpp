#include <benchmark/benchmark.h>

#include "relaysec/linalg.hpp"
#include "relaysec/nullspace.hpp"
#include "relaysec/optimal.hpp"
#include "support.hpp"

using namespace relaysec;
using namespace relaysec::testing;

namespace {

DerivedChannel fig2_channel(Index m) { return derive_channel(random_realization(42, m, {10.0, 1.0, 1.0, 1.0}, 1.0)); }

void BM_SdpTraceBound(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const Index n = state.range(0);
  sdp::SdpProblem p(n);
  p.objective = random_hermitian(rng, n);
  p.add_trace_bound(1.0);
  for (Index m = 0; m < n; ++m) p.add_diagonal_bound(m, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(sdp::solve(p));
}
BENCHMARK(BM_SdpTraceBound)->Arg(4)->Arg(10)->Arg(20);

void BM_Feasibility(benchmark::State& state) {
  const DerivedChannel dc = fig2_channel(state.range(0));
  const sdp::SdpProblem p = build_feasibility_problem(dc, 2.0, 1.0, PowerConstraint::make_total(10.0),
                                                      {primary_user(dc, InterferenceLimit{1.0})});
  for (auto _ : state) benchmark::DoNotOptimize(sdp::check_feasibility(p));
}
BENCHMARK(BM_Feasibility)->Arg(4)->Arg(10);

void BM_SolveOptimal(benchmark::State& state) {
  const DerivedChannel dc = fig2_channel(state.range(0));
  const PowerConstraint pc = state.range(1) ? PowerConstraint::equal_split(10.0, dc.relays()) : PowerConstraint::make_total(10.0);
  for (auto _ : state) benchmark::DoNotOptimize(solve_optimal(dc, pc, InterferenceLimit{1.0}));
}
BENCHMARK(BM_SolveOptimal)->Args({4, 0})->Args({10, 0})->Args({10, 1})->Unit(benchmark::kMillisecond);

void BM_SolveBne(benchmark::State& state) {
  const DerivedChannel dc = fig2_channel(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(solve_bne(dc, PowerConstraint::make_total(10.0), InterferenceLimit{1.0}));
}
BENCHMARK(BM_SolveBne)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_SolveBnepSdp(benchmark::State& state) {
  const DerivedChannel dc = fig2_channel(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(solve_bnep_sdp(dc, PowerConstraint::make_total(10.0), InterferenceLimit{1.0}));
}
BENCHMARK(BM_SolveBnepSdp)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_BnepClosedForm(benchmark::State& state) {
  const DerivedChannel dc = fig2_channel(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(solve_bnep_closed_form(dc, 10.0));
}
BENCHMARK(BM_BnepClosedForm)->Arg(10)->Arg(50);

void BM_GeneralizedEig(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const Index n = state.range(0);
  const CMatrix a = random_psd(rng, n, 1);
  const CMatrix b = random_pd(rng, n);
  for (auto _ : state) benchmark::DoNotOptimize(linalg::generalized_eig_max(a, b));
}
BENCHMARK(BM_GeneralizedEig)->Arg(8)->Arg(32);

} // namespace

BENCHMARK_MAIN();
