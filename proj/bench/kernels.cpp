// serial vs OpenMP kernels: blockwise pseudo-inverse, local projection,
// one DD outer sweep for TFS and IR

#include <random>

#include <benchmark/benchmark.h>

#include "tvstokes/dd.hpp"
#include "tvstokes/diff_ops.hpp"
#include "tvstokes/pipeline.hpp"

using namespace tvs;

namespace {

Execution mode(const benchmark::State& s) { return s.range(1) ? Execution::Parallel : Execution::Serial; }

template <std::size_t C>
Field<C> noise(const GridSpec& g) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Field<C> f(g);
  for (double& v : f.values()) v = u(gen);
  return f;
}

void BM_PinvBlock(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const DdLayout l = build_layout(GridSpec{n + 1, n + 1, 1.0}, 3, 3, 4, 3);
  const TilingTriple t = build_tilings(l, 4, 0);
  const LocalPinvPlan plan(t, 1.0);
  const auto dk = noise<1>(t.a_k().grid(1.0));
  for (auto _ : state) benchmark::DoNotOptimize(plan.apply(dk, mode(state)));
}

void BM_LocalProjection(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const DdLayout l = build_layout(GridSpec{n + 1, n + 1, 1.0}, 3, 3, 4, 3);
  const LocalProjector proj(build_tilings(l, 4, 4), 1.0);
  const auto wk = noise<2>(proj.source().grid(1.0));
  for (auto _ : state) benchmark::DoNotOptimize(proj.apply(wk, mode(state)));
}

DdConfig outer(const benchmark::State& s, std::size_t its) {
  DdConfig c;
  c.max_it = its;
  c.outer_tol = 1e-300;
  c.exec = mode(s);
  return c;
}

void BM_DdTfs(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const ScalarField d0 = add_noise(phantom_disk_stripes(n), {0.01, 1});
  const DdLayout l = build_layout(d0.grid().extended(), 3, 3, 4, 3);
  const auto pou = build_partition_of_unity(l);
  const TfsProblem prob = make_tfs_problem(tangent_field(d0), 0.15);
  for (auto _ : state) benchmark::DoNotOptimize(dd_solve(prob, l, pou, outer(state, 5)));
}

void BM_DdIr(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const ScalarField d0 = add_noise(phantom_disk_stripes(n), {0.01, 1});
  const DdLayout l = build_layout(d0.grid(), 3, 3, 4, 3);
  const auto pou = build_partition_of_unity(l);
  for (auto _ : state) benchmark::DoNotOptimize(dd_solve(IrProblem{d0}, l, pou, outer(state, 20)));
}

// second argument: 0 serial, 1 OpenMP
void sizes(benchmark::internal::Benchmark* b) {
  for (int n : {64, 128}) b->Args({n, 0})->Args({n, 1});
  b->Unit(benchmark::kMillisecond);
}

}  // namespace

BENCHMARK(BM_PinvBlock)->Apply(sizes);
BENCHMARK(BM_LocalProjection)->Apply(sizes);
BENCHMARK(BM_DdTfs)->Apply(sizes);
BENCHMARK(BM_DdIr)->Apply(sizes);

BENCHMARK_MAIN();
