#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "pat/operators.hpp"
#include "pat/phantom.hpp"
#include "pat/verify.hpp"
#include "support.hpp"

namespace pat {
namespace {

PatOperator oracle_operator() { return build_operator(test::oracle_config()); }

TEST(MassSchedule, ZeroImage) {
  const PatOperator op = oracle_operator();
  const SourceSchedule s = op.forward_mass_schedule(op.grid().interior_field());
  SplitFields out;
  for (auto& f : out) f = op.grid().full_field();
  ASSERT_TRUE(s.mass(-1, out));
  EXPECT_EQ(max_abs(out[0]), 0.0);
  EXPECT_EQ(max_abs(out[1]), 0.0);
}

TEST(MassSchedule, SingleCellAmplitude) {
  ExperimentConfig c = test::oracle_config();
  c.grid.dt = 1e-7;
  c.smoother.kind = SmootherKind::kNone;
  const PatOperator op = build_operator(c);
  Image p0 = op.grid().interior_field();
  p0(7, 9) = 1.0;
  const SourceSchedule s = op.forward_mass_schedule(p0);
  const double expected = 1.0 / (2.0 * 1500.0 * 1500.0 * 2.0 * 1e-7);
  SplitFields out;
  for (int t : {-1, 0}) {
    ASSERT_TRUE(s.mass(t, out)) << t;
    for (const auto& f : out) {
      EXPECT_NEAR(f(7, 9), expected, 1e-12 * expected);
      EXPECT_NEAR(max_abs(f), expected, 1e-12 * expected);
    }
  }
  EXPECT_FALSE(s.mass(1, out));
  EXPECT_FALSE(s.mass(-2, out));
}

TEST(MassSchedule, Homogeneous) {
  const PatOperator op = oracle_operator();
  const Image p0 = test::random_field(16, 16, 3, 0.0, 1.0);
  SplitFields a, b;
  op.forward_mass_schedule(p0).mass(0, a);
  op.forward_mass_schedule(2.0 * p0).mass(0, b);
  EXPECT_LT(test::rel_diff(b[0], 2.0 * a[0]), 1e-15);
}

TEST(MassSchedule, RejectsPmlSupport) {
  ExperimentConfig c = test::oracle_config();
  c.grid.pml_size = 4;
  const PatOperator op = build_operator(c);
  Field full = op.grid().full_field();
  full(0, 0) = 1.0;
  EXPECT_THROW(op.forward_mass_schedule(full), std::invalid_argument);
  EXPECT_THROW(op.forward_mass_schedule(Field(3, 3)), std::invalid_argument);
}

TEST(ForceSchedule, ZeroData) {
  const PatOperator op = oracle_operator();
  const SourceSchedule s = op.adjoint_force_schedule(op.zero_data());
  SplitFields out;
  for (int t = -1; t < op.grid().nt(); ++t) EXPECT_FALSE(s.force(t, out));
}

TEST(ForceSchedule, ImpulseTiming) {
  const PatOperator op = oracle_operator();
  BoundaryData d = op.zero_data();
  const std::size_t node = 3;
  d.values(node, static_cast<std::size_t>(op.grid().nt() - 1)) = 1.0;
  const SourceSchedule s = op.adjoint_force_schedule(d);
  SplitFields out;
  for (int t = -1; t < op.grid().nt(); ++t) EXPECT_EQ(s.force(t, out), t == 0) << t;
}

TEST(ForceSchedule, OnGridFootprintBeforeShift) {
  // On-grid node, exact delta: undoing the half-cell shift recovers the
  // point force -w_j / (2 rho0 dx^2) n_in.
  ExperimentConfig c = test::oracle_config();
  c.array.kind = ArrayKind::kOnGrid;
  c.array.sides = {Side::kLeft};
  c.array.inset = 2;
  c.smoother.kind = SmootherKind::kNone;
  const PatOperator op = build_operator(c);
  BoundaryData d = op.zero_data();
  d.values(0, 5) = 1.0;
  const SourceSchedule s = op.adjoint_force_schedule(d);
  SplitFields out;
  ASSERT_TRUE(s.force(op.grid().nt() - 6, out));

  const SpectralOperators ops(op.grid(), 1500.0);
  const double amp = -op.weights()[0] / (2.0 * 1000.0 * op.grid().cell_volume());
  const Point n_in = op.array().receivers[0].normal_in();
  const std::size_t at = op.kernels()[0].entries[0].index;
  for (int axis = 0; axis < 2; ++axis) {
    const Field back =
        ops.filter(out[static_cast<std::size_t>(axis)], ops.shift_multiplier(axis, Shift::kMinusHalf));
    const double expect = amp * n_in[static_cast<std::size_t>(axis)];
    if (expect == 0.0) {
      EXPECT_LE(max_abs(back), 1e-12 * std::abs(amp));
    } else {
      // The Nyquist row is lost to the shift, so compare against a point
      // mass with that row removed: value at the node is expect * (1 - 1/N).
      const double n = op.grid().total(axis);
      EXPECT_NEAR(back[at], expect * (1.0 - 1.0 / n), 1e-9 * std::abs(amp));
    }
  }
}

TEST(ForceSchedule, NegatedDataNegatesForce) {
  const PatOperator op = oracle_operator();
  const BoundaryData d = random_boundary_data(op, 5);
  BoundaryData neg = d;
  neg.values = -1.0 * d.values;
  SplitFields a, b;
  op.adjoint_force_schedule(d).force(10, a);
  op.adjoint_force_schedule(neg).force(10, b);
  EXPECT_LT(test::rel_diff(b[1], -1.0 * a[1]), 1e-15);
}

TEST(Forward, ZeroImage) {
  const PatOperator op = oracle_operator();
  const BoundaryData y = op.forward(op.grid().interior_field());
  EXPECT_EQ(y.nodes(), op.node_count());
  EXPECT_EQ(y.samples(), 41u);
  EXPECT_EQ(max_abs(y.values), 0.0);
}

TEST(Forward, Linear) {
  const PatOperator op = oracle_operator();
  const Image a = test::random_field(16, 16, 1);
  const Image b = test::random_field(16, 16, 2);
  const Field lhs = op.forward(1.5 * a + (-0.5) * b).values;
  const Field rhs = 1.5 * op.forward(a).values + (-0.5) * op.forward(b).values;
  EXPECT_LT(test::rel_diff(lhs, rhs), 1e-12);
}

TEST(Forward, CausalTraces) {
  // Gaussian initial pressure (sigma = 4 cells) cut off where it falls below
  // 1e-9, so its support is a disc and its spectrum is negligible at the grid
  // cut-off. Rough images carry band-limiting tails that arrive early at the
  // percent level, which says nothing about the propagator.
  ExperimentConfig c;
  c.grid = {{96, 96}, 0.5e-3, 10, 2.0, 260, 0.3 * 0.5e-3 / 1500.0};
  c.array.kind = ArrayKind::kOnGrid;
  c.array.sides = {Side::kLeft, Side::kBottom, Side::kRight, Side::kTop};
  c.array.inset = 2;
  const PatOperator op = build_operator(c);
  const Grid& g = op.grid();
  const double sigma = 4 * g.dx();
  const double support = sigma * std::sqrt(2 * std::log(1e9));
  Image p0 = g.interior_field();
  for (std::size_t i = 0; i < p0.n0(); ++i)
    for (std::size_t j = 0; j < p0.n1(); ++j) {
      const double r = std::hypot(g.coordinate(0, static_cast<double>(i) + 10),
                                  g.coordinate(1, static_cast<double>(j) + 10));
      if (r < support) p0(i, j) = std::exp(-r * r / (2 * sigma * sigma));
    }
  const BoundaryData y = op.forward(p0);

  double r_min = 1e9;
  for (const auto& rec : op.array().receivers)
    for (const auto& n : rec.nodes) r_min = std::min(r_min, std::hypot(n[0], n[1]));
  const auto arrival = static_cast<std::size_t>((r_min - support) / 1500.0 / g.dt());
  ASSERT_GT(arrival, 50u);
  const double peak = max_abs(y.values);
  ASSERT_GT(peak, 0.0);
  double early = 0.0;
  for (std::size_t j = 0; j < y.nodes(); ++j)
    for (std::size_t t = 0; t < arrival; ++t) early = std::max(early, std::abs(y.values(j, t)));
  EXPECT_LT(early, 1e-6 * peak);
}

TEST(Adjoint, ZeroData) {
  const PatOperator op = oracle_operator();
  EXPECT_EQ(max_abs(op.adjoint(op.zero_data())), 0.0);
}

TEST(Adjoint, Linear) {
  const PatOperator op = oracle_operator();
  const BoundaryData f = random_boundary_data(op, 1);
  const BoundaryData g = random_boundary_data(op, 2);
  BoundaryData mix = f;
  mix.values = 2.0 * f.values + (-1.25) * g.values;
  const Image lhs = op.adjoint(mix);
  const Image rhs = 2.0 * op.adjoint(f) + (-1.25) * op.adjoint(g);
  EXPECT_LT(test::rel_diff(lhs, rhs), 1e-12);
}

TEST(Adjoint, RejectsWrongShape) {
  const PatOperator op = oracle_operator();
  BoundaryData d{Field(2, 3), op.grid().dt()};
  EXPECT_THROW(op.adjoint(d), std::invalid_argument);
}

TEST(Operators, DenseMatrixApplication) {
  const PatOperator op = oracle_operator();
  const DenseOracle o = dense_oracle(op);
  const Image x = test::random_field(16, 16, 21);
  const BoundaryData y = random_boundary_data(op, 22);

  // A x in scaled coordinates versus forward(x).
  const BoundaryData fx = op.forward(x);
  const double col = std::sqrt(op.grid().cell_volume());
  Field ax(fx.values.n0(), fx.values.n1());
  for (std::size_t r = 0; r < o.rows; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < o.cols; ++c) s += o.a(r, c) * x[c] * col;
    ax[r] = s / std::sqrt(op.weights()[r / op.sample_count()] * op.grid().dt());
  }
  EXPECT_LT(test::rel_diff(ax, fx.values), 1e-12);

  const Image fty = op.adjoint(y);
  Image by = op.grid().interior_field();
  for (std::size_t c = 0; c < o.cols; ++c) {
    double s = 0.0;
    for (std::size_t r = 0; r < o.rows; ++r)
      s += o.b(c, r) * y.values[r] * std::sqrt(op.weights()[r / op.sample_count()] * op.grid().dt());
    by[c] = s / col;
  }
  EXPECT_LT(test::rel_diff(by, fty), 1e-12);
}

TEST(Transfer, IdentityWhenArraysMatch) {
  const ReceiverArray a = build_circular_array(4, 10e-3, 1e-3, 5);
  BoundaryData d{test::random_field(20, 7, 4), 1e-8};
  EXPECT_EQ(transfer_boundary_data(d, a, a).values, d.values);
}

TEST(Transfer, LinearProfileIsReproduced) {
  const ReceiverArray from = build_circular_array(3, 10e-3, 1e-3, 20);
  const ReceiverArray to = build_circular_array(3, 10e-3, 1e-3, 16);
  BoundaryData d{Field(60, 2), 1e-8};
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t k = 0; k < 20; ++k) {
      const double s = static_cast<double>(k) / 19.0;
      d.values(r * 20 + k, 0) = 1.0 + 2.0 * s + static_cast<double>(r);
      d.values(r * 20 + k, 1) = -s;
    }
  const BoundaryData out = transfer_boundary_data(d, from, to);
  ASSERT_EQ(out.nodes(), 48u);
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t k = 0; k < 16; ++k) {
      const double s = static_cast<double>(k) / 15.0;
      EXPECT_NEAR(out.values(r * 16 + k, 0), 1.0 + 2.0 * s + static_cast<double>(r), 1e-12);
      EXPECT_NEAR(out.values(r * 16 + k, 1), -s, 1e-12);
    }
}

TEST(Transfer, RejectsMismatch) {
  const ReceiverArray a = build_circular_array(4, 10e-3, 1e-3, 5);
  const ReceiverArray b = build_circular_array(3, 10e-3, 1e-3, 5);
  BoundaryData d{Field(20, 3), 1e-8};
  EXPECT_THROW(transfer_boundary_data(d, a, b), std::invalid_argument);
  BoundaryData bad{Field(19, 3), 1e-8};
  EXPECT_THROW(transfer_boundary_data(bad, a, a), std::invalid_argument);
}

TEST(Threshold, RelativeToBandwidth) {
  const Grid g = test::small_grid(16);
  EXPECT_DOUBLE_EQ(kernel_threshold(0.01, g), 0.01 / (1e-3 * 1e-3));
}

}  // namespace
}  // namespace pat
