#include <benchmark/benchmark.h>

#include <random>

#include "pat/experiments.hpp"
#include "pat/phantom.hpp"
#include "pat/verify.hpp"

namespace {

using namespace pat;

Field noise(std::size_t n0, std::size_t n1) {
  Field f(n0, n1);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = u(rng);
  return f;
}

// Staggered derivative on an N x N full grid (one forward and one inverse FFT).
void BM_SpectralDerivative(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Grid g = make_grid({n, n}, 1e-3, 0, 2.0, 1, 2e-7);
  const SpectralOperators ops(g, 1500.0);
  const Field f = noise(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
  auto spec = ops.make_spectrum();
  auto scratch = ops.make_spectrum();
  Field out = g.full_field();
  for (auto _ : state) {
    ops.transform(f, spec);
    ops.apply(spec, ops.derivative_multiplier(0, Shift::kPlusHalf), out, scratch);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_SpectralDerivative)->Arg(128)->Arg(168)->Arg(296)->Arg(512);

// One time step of the split-field solver with a PML of 20 points.
void BM_SolverStep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Grid g = make_grid({n, n}, 0.4e-3, 20, 2.0, 1, 0.08e-6);
  WaveSolver solver(g, homogeneous_medium(g, 1500.0, 1000.0));
  WaveState s = solver.zero_state();
  s.p = g.embed(noise(static_cast<std::size_t>(n), static_cast<std::size_t>(n)));
  int t = 0;
  for (auto _ : state) {
    solver.step(s, {}, t++);
    benchmark::DoNotOptimize(s.p.data());
  }
  state.SetItemsProcessed(state.iterations() * g.total(0) * g.total(1));
}
BENCHMARK(BM_SolverStep)->Arg(128)->Arg(256);

// Full forward operator (solver plus off-grid reception) on a reduced time axis.
void BM_ForwardOffGrid(benchmark::State& state) {
  ExperimentConfig c = preset("desk-offgrid");
  c.grid.nt = static_cast<int>(state.range(0));
  const PatOperator op = build_operator(c);
  const Image p0 = make_disc_phantom(op.grid(), 18e-3, {0, 0}, 0.0, 1.0, 1);
  for (auto _ : state) benchmark::DoNotOptimize(op.forward(p0).values.data());
  state.counters["nodes"] = static_cast<double>(op.node_count());
  state.counters["kernel_entries"] = static_cast<double>(op.kernel_entry_count());
}
BENCHMARK(BM_ForwardOffGrid)->Arg(50)->Unit(benchmark::kMillisecond);

// Adjoint operator (emission plus solver) on the same reduced time axis.
void BM_AdjointOffGrid(benchmark::State& state) {
  ExperimentConfig c = preset("desk-offgrid");
  c.grid.nt = static_cast<int>(state.range(0));
  const PatOperator op = build_operator(c);
  const BoundaryData d = random_boundary_data(op, 1);
  for (auto _ : state) benchmark::DoNotOptimize(op.adjoint(d).data());
}
BENCHMARK(BM_AdjointOffGrid)->Arg(50)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
