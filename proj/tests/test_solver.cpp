#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "pat/solver.hpp"
#include "physics.hpp"
#include "support.hpp"

namespace pat {
namespace {

// Records p at a list of full-grid indices for every time step.
class PointProbe : public Probe {
 public:
  explicit PointProbe(std::vector<std::size_t> at) : at_(std::move(at)) {}
  void record(int, PressureSnapshot& s) override {
    std::vector<double> row;
    for (auto k : at_) row.push_back(s.pressure()[k]);
    trace.push_back(std::move(row));
  }
  std::vector<std::vector<double>> trace;

 private:
  std::vector<std::size_t> at_;
};

class FieldProbe : public Probe {
 public:
  explicit FieldProbe(int when) : when_(when) {}
  void record(int t, PressureSnapshot& s) override {
    if (t == when_) field = s.pressure();
  }
  Field field;

 private:
  int when_;
};

TEST(Solver, NullDynamics) {
  const Grid g = test::small_grid(16, 4, 20);
  WaveSolver solver(g, homogeneous_medium(g, 1500.0, 1000.0));
  FieldProbe probe(20);
  Probe* probes[] = {&probe};
  const WaveState s = solver.run({}, probes);
  EXPECT_EQ(max_abs(s.p), 0.0);
  EXPECT_EQ(max_abs(s.u[0]), 0.0);
  EXPECT_EQ(max_abs(probe.field), 0.0);
}

TEST(Solver, ProbeSeesEveryStep) {
  const Grid g = test::small_grid(16, 0, 7);
  WaveSolver solver(g, homogeneous_medium(g, 1500.0, 1000.0));
  PointProbe probe({0});
  Probe* probes[] = {&probe};
  solver.run({}, probes);
  EXPECT_EQ(probe.trace.size(), 8u);
}

TEST(Solver, PlaneWaveTranslation) { EXPECT_LT(test::plane_wave_error(100, 0.3), 1e-6); }

TEST(Solver, WavefrontRadius) {
  const int n = 96;
  const int steps = 80;
  const Grid g = test::small_grid(n, 0, steps, 0.3);
  WaveSolver solver(g, homogeneous_medium(g, 1500.0, 1000.0));
  Field src = g.full_field();
  const std::size_t c0 = n / 2;
  src(c0, c0) = 1.0;
  FieldProbe probe(steps);
  Probe* probes[] = {&probe};
  solver.run(test::density_pulse(src), probes);

  // p(steps) is steps * dt after the pulse was injected. Peak |p| along the
  // axis, away from the trailing tail at the origin, refined by a parabola.
  const double expected = 1500.0 * g.dt() * steps / g.dx();
  std::size_t best = 0;
  double peak = 0.0;
  for (std::size_t r = 4; r < c0 - 2; ++r) {
    const double v = std::abs(probe.field(c0 + r, c0));
    if (v > peak) {
      peak = v;
      best = r;
    }
  }
  const double ym = std::abs(probe.field(c0 + best - 1, c0));
  const double yp = std::abs(probe.field(c0 + best + 1, c0));
  const double radius = static_cast<double>(best) + 0.5 * (ym - yp) / (ym - 2 * peak + yp);
  EXPECT_NEAR(radius, expected, 1.0);
}

TEST(Solver, Linearity) {
  const Grid g = test::small_grid(24, 6, 30);
  WaveSolver solver(g, homogeneous_medium(g, 1500.0, 1000.0));
  const Field a = g.embed(test::random_field(24, 24, 1));
  const Field b = g.embed(test::random_field(24, 24, 2));
  auto final_p = [&](const Field& src) {
    FieldProbe probe(30);
    Probe* probes[] = {&probe};
    solver.run(test::density_pulse(src), probes);
    return probe.field;
  };
  const Field lhs = final_p(2.0 * a + (-3.0) * b);
  const Field rhs = 2.0 * final_p(a) + (-3.0) * final_p(b);
  EXPECT_LT(test::rel_diff(lhs, rhs), 1e-12);
}

TEST(Solver, StableOverLongRuns) {
  const int steps = 2000;
  const Grid g = test::small_grid(32, 8, steps, 0.3);
  WaveSolver solver(g, homogeneous_medium(g, 1500.0, 1000.0));
  const Field src = test::gaussian(g, 2.0);
  class NormProbe : public Probe {
   public:
    void record(int, PressureSnapshot& s) override { norms.push_back(norm2(s.pressure())); }
    std::vector<double> norms;
  } probe;
  Probe* probes[] = {&probe};
  solver.run(test::density_pulse(src), probes);
  double early = 0.0;
  for (int t = 0; t < 100; ++t) early = std::max(early, probe.norms[static_cast<std::size_t>(t)]);
  for (double v : probe.norms) EXPECT_LE(v, 10.0 * early);
}

TEST(Solver, PmlReentryBelowOnePercent) { EXPECT_LT(test::pml_reentry_ratio(), 0.01); }

TEST(Solver, NonFiniteFieldRaises) {
  const Grid g = test::small_grid(16, 0, 10);
  WaveSolver solver(g, homogeneous_medium(g, 1500.0, 1000.0));
  WaveState s = solver.zero_state();
  s.rho[0](3, 3) = std::numeric_limits<double>::quiet_NaN();
  try {
    solver.step(s, {}, 4);
    FAIL() << "expected StabilityError";
  } catch (const StabilityError& e) {
    EXPECT_EQ(e.step(), 4);
    EXPECT_NEAR(e.cfl(), 0.3, 1e-12);
  }
}

TEST(Solver, FreeStepMatchesMember) {
  const Grid g = test::small_grid(16, 2, 3);
  const Medium m = homogeneous_medium(g, 1500.0, 1000.0);
  WaveSolver solver(g, m);
  WaveState a = solver.zero_state();
  a.p = g.embed(test::random_field(16, 16, 8));
  a.rho[0] = (1.0 / (2 * 1500.0 * 1500.0)) * a.p;
  a.rho[1] = a.rho[0];
  WaveState b = a;
  solver.step(a, {}, 0);
  step(b, {}, 0, g, m);
  EXPECT_EQ(a.p, b.p);
  EXPECT_EQ(a.u[1], b.u[1]);
}

}  // namespace
}  // namespace pat
