#include "pat/operators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pat {

Image smooth(const Image& image, const SmootherSpec& spec, const Grid& grid) {
  if (spec.kind == SmootherKind::kNone) return image;
  const SpectralOperators ops(grid, 0.0, false);
  return grid.restrict_to_interior(smooth_full(grid.embed(image), spec, ops));
}

double kernel_threshold(double factor, const Grid& grid) { return factor / grid.cell_volume(); }

PatOperator::PatOperator(const Grid& grid, const Medium& medium, ReceiverArray array,
                         double threshold, SmootherSpec smoother)
    : grid_(grid), medium_(medium), array_(std::move(array)), smoother_(smoother) {
  validate_medium(medium_, grid_);
  if (grid_.nt() < 2) throw std::invalid_argument("PAT operator: need at least 2 time steps");
  if (array_.node_count() == 0) throw std::invalid_argument("PAT operator: empty receiver array");
  weights_ = quadrature_weights(array_);
  kernels_ = build_kernels(array_, grid_, grid_.dx(), threshold);
  for (const auto& r : array_.receivers)
    for (std::size_t j = 0; j < r.nodes.size(); ++j) normals_.push_back(r.normal_out);

  csr_offset_.reserve(kernels_.size() + 1);
  csr_offset_.push_back(0);
  for (const auto& k : kernels_) {
    for (const auto& e : k.entries) {
      csr_index_.push_back(e.index);
      csr_value_.push_back(e.value);
    }
    csr_offset_.push_back(csr_index_.size());
  }
}

BoundaryData PatOperator::zero_data() const {
  return {Field(node_count(), sample_count()), grid_.dt()};
}

void PatOperator::check_data(const BoundaryData& data) const {
  if (data.nodes() != node_count() || data.samples() != sample_count())
    throw std::invalid_argument("boundary data shape " + std::to_string(data.nodes()) + "x" +
                                std::to_string(data.samples()) + " does not match operator " +
                                std::to_string(node_count()) + "x" +
                                std::to_string(sample_count()));
}

SourceSchedule PatOperator::forward_mass_schedule(const Field& p0) const {
  Field full;
  if (grid_.is_interior_shape(p0)) {
    full = grid_.embed(p0);
  } else if (grid_.is_full_shape(p0)) {
    for (std::size_t i = 0; i < p0.n0(); ++i)
      for (std::size_t j = 0; j < p0.n1(); ++j)
        if (p0(i, j) != 0.0 && !grid_.is_interior(i, j))
          throw std::invalid_argument("initial pressure support reaches into the PML");
    full = p0;
  } else {
    throw std::invalid_argument("initial pressure: shape matches neither interior nor full grid");
  }
  if (!all_finite(full)) throw std::invalid_argument("initial pressure is not finite");

  const SpectralOperators ops(grid_, medium_.c_ref, false);
  Field amplitude = smooth_full(full, smoother_, ops);
  const double denom = 2.0 * kDim * grid_.dt();
  for (std::size_t i = 0; i < amplitude.size(); ++i)
    amplitude[i] /= denom * medium_.c[i] * medium_.c[i];

  auto shared = std::make_shared<const Field>(std::move(amplitude));
  SourceSchedule schedule;
  schedule.mass = [shared](int t, SplitFields& out) {
    if (t != -1 && t != 0) return false;
    for (auto& f : out) f = *shared;
    return true;
  };
  return schedule;
}

namespace {

struct EmissionState {
  SpectralOperators ops;
  ComplexBuffer spectrum;
  ComplexBuffer scratch;
  SplitFields emitted;
};

}  // namespace

SourceSchedule PatOperator::adjoint_force_schedule(const BoundaryData& data) const {
  check_data(data);
  auto state = std::make_shared<EmissionState>(
      EmissionState{SpectralOperators(grid_, medium_.c_ref), {}, {}, {}});
  state->spectrum = state->ops.make_spectrum();
  state->scratch = state->ops.make_spectrum();
  for (auto& f : state->emitted) f = grid_.full_field();

  auto samples = std::make_shared<const Field>(data.values);
  const int nt = grid_.nt();

  SourceSchedule schedule;
  // Captures `this`: the schedule must not outlive the operator.
  schedule.force = [this, state, samples, nt](int t, SplitFields& out) {
    const auto s = static_cast<std::size_t>(nt - t - 1);
    const Field& g = *samples;
    bool any = false;
    for (std::size_t j = 0; j < g.n0() && !any; ++j) any = g(j, s) != 0.0;
    if (!any) return false;

    for (auto& f : state->emitted) f.fill(0.0);
    for (std::size_t j = 0; j < node_count(); ++j) {
      const double gj = g(j, s);
      if (gj == 0.0) continue;
      const double wj = weights_[j];
      const Point n_in{-normals_[j][0], -normals_[j][1]};
      for (std::size_t e = csr_offset_[j]; e < csr_offset_[j + 1]; ++e) {
        const std::size_t i = csr_index_[e];
        const double amp = -wj * csr_value_[e] * gj / (2.0 * medium_.rho0[i]);
        state->emitted[0][i] += amp * n_in[0];
        state->emitted[1][i] += amp * n_in[1];
      }
    }
    for (int axis = 0; axis < kDim; ++axis) {
      const auto a = static_cast<std::size_t>(axis);
      state->ops.transform(state->emitted[a], state->spectrum);
      state->ops.apply(state->spectrum, state->ops.shift_multiplier(axis, Shift::kPlusHalf), out[a],
                       state->scratch);
    }
    return true;
  };
  return schedule;
}

namespace {

class ReceptionProbe final : public Probe {
 public:
  ReceptionProbe(const std::vector<std::size_t>& offset, const std::vector<std::size_t>& index,
                 const std::vector<double>& value, const std::vector<Point>& normals,
                 double cell_volume, Field& out)
      : offset_(offset), index_(index), value_(value), normals_(normals),
        cell_volume_(cell_volume), out_(out) {}

  void record(int t, PressureSnapshot& snap) override {
    const Field& gx = snap.gradient(0);
    const Field& gy = snap.gradient(1);
    const auto col = static_cast<std::size_t>(t);
    for (std::size_t j = 0; j + 1 < offset_.size(); ++j) {
      double sx = 0.0;
      double sy = 0.0;
      for (std::size_t e = offset_[j]; e < offset_[j + 1]; ++e) {
        sx += value_[e] * gx[index_[e]];
        sy += value_[e] * gy[index_[e]];
      }
      out_(j, col) = 0.5 * cell_volume_ * (normals_[j][0] * sx + normals_[j][1] * sy);
    }
  }

 private:
  const std::vector<std::size_t>& offset_;
  const std::vector<std::size_t>& index_;
  const std::vector<double>& value_;
  const std::vector<Point>& normals_;
  double cell_volume_;
  Field& out_;
};

class FinalPressureProbe final : public Probe {
 public:
  explicit FinalPressureProbe(int nt) : nt_(nt) {}
  void record(int t, PressureSnapshot& snap) override {
    if (t == nt_ - 2) earlier = snap.pressure();
    if (t == nt_) last = snap.pressure();
  }
  Field earlier;
  Field last;

 private:
  int nt_;
};

}  // namespace

BoundaryData PatOperator::forward(const Image& p0) const {
  BoundaryData data = zero_data();
  const SourceSchedule schedule = forward_mass_schedule(p0);
  ReceptionProbe probe(csr_offset_, csr_index_, csr_value_, normals_, grid_.cell_volume(),
                       data.values);
  Probe* probes[] = {&probe};
  WaveSolver solver(grid_, medium_);
  solver.run(schedule, probes);
  return data;
}

Image PatOperator::adjoint(const BoundaryData& data) const {
  check_data(data);
  const SourceSchedule schedule = adjoint_force_schedule(data);
  FinalPressureProbe probe(grid_.nt());
  Probe* probes[] = {&probe};
  WaveSolver solver(grid_, medium_);
  solver.run(schedule, probes);

  const double dt = grid_.dt();
  Field diff = grid_.full_field();
  for (std::size_t i = 0; i < diff.size(); ++i) {
    const double c2 = medium_.c[i] * medium_.c[i];
    diff[i] = dt * (probe.last[i] - probe.earlier[i]) / (2.0 * c2 * dt * dt);
  }
  const SpectralOperators ops(grid_, medium_.c_ref, false);
  return grid_.restrict_to_interior(smooth_full(diff, smoother_, ops));
}

namespace {

// Position of q along segment a-b as a fraction of its length.
double segment_parameter(const Point& a, const Point& b, const Point& q) {
  const double vx = b[0] - a[0];
  const double vy = b[1] - a[1];
  const double len2 = vx * vx + vy * vy;
  if (len2 == 0.0) return 0.0;
  return ((q[0] - a[0]) * vx + (q[1] - a[1]) * vy) / len2;
}

}  // namespace

BoundaryData transfer_boundary_data(const BoundaryData& data, const ReceiverArray& from,
                                    const ReceiverArray& to) {
  if (from.receivers.size() != to.receivers.size())
    throw std::invalid_argument("transfer: receiver counts differ (" +
                                std::to_string(from.receivers.size()) + " vs " +
                                std::to_string(to.receivers.size()) + ")");
  if (data.nodes() != from.node_count())
    throw std::invalid_argument("transfer: data rows do not match the source array");
  BoundaryData out{Field(to.node_count(), data.samples()), data.dt};
  std::size_t src_base = 0;
  std::size_t dst = 0;
  for (std::size_t r = 0; r < from.receivers.size(); ++r) {
    const auto& src = from.receivers[r].nodes;
    const auto& tgt = to.receivers[r].nodes;
    const Point& a = src.front();
    const Point& b = src.back();
    // Source nodes are ordered along the segment; convert to parameters.
    std::vector<double> s(src.size());
    for (std::size_t k = 0; k < src.size(); ++k) s[k] = segment_parameter(a, b, src[k]);
    for (const Point& q : tgt) {
      const double u = std::clamp(segment_parameter(a, b, q), s.front(), s.back());
      std::size_t k = 0;
      while (k + 2 < s.size() && u > s[k + 1]) ++k;
      const double span = s[k + 1] - s[k];
      const double w = span > 0.0 ? (u - s[k]) / span : 0.0;
      for (std::size_t t = 0; t < data.samples(); ++t)
        out.values(dst, t) = (1.0 - w) * data.values(src_base + k, t) +
                             w * data.values(src_base + k + 1, t);
      ++dst;
    }
    src_base += src.size();
  }
  return out;
}

}  // namespace pat
