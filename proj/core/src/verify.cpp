#include "pat/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <stdexcept>

#include "pat/phantom.hpp"

namespace pat {

double domain_inner(const Image& a, const Image& b, const Grid& grid) {
  if (!a.same_shape(b)) throw std::invalid_argument("domain_inner: shape mismatch");
  return dot(a, b) * grid.cell_volume();
}

double boundary_inner(const BoundaryData& f, const BoundaryData& g,
                      std::span<const double> weights) {
  if (!f.values.same_shape(g.values) || weights.size() != f.nodes())
    throw std::invalid_argument("boundary_inner: shape mismatch");
  double total = 0.0;
  for (std::size_t j = 0; j < f.nodes(); ++j) {
    double row = 0.0;
    for (std::size_t t = 0; t < f.samples(); ++t) row += f.values(j, t) * g.values(j, t);
    total += weights[j] * row;
  }
  return total * f.dt;
}

void finish_report(InnerProductReport& r) {
  const double diff = std::abs(r.lhs - r.rhs);
  r.absolute = std::abs(r.lhs) < 1e-300;
  if (r.absolute) r.rd_percent = diff;
  else r.rd_percent = diff / std::abs(r.lhs) * 100.0;
}

BoundaryData random_boundary_data(const PatOperator& op, std::uint64_t seed) {
  BoundaryData data = op.zero_data();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t k = 0; k < data.values.size(); ++k) data.values[k] = u(rng);
  return data;
}

InnerProductReport inner_product_test(const PatOperator& op, const Image& p0,
                                      const BoundaryData& data) {
  InnerProductReport r;
  r.lhs = boundary_inner(data, op.forward(p0), op.weights());
  r.rhs = domain_inner(op.adjoint(data), p0, op.grid());
  finish_report(r);
  return r;
}

InnerProductReport inner_product_test(const PatOperator& op, std::uint64_t seed,
                                      double support_radius, const std::string& digest) {
  // Independent streams for the image and the data.
  std::seed_seq seq{seed};
  std::array<std::uint64_t, 2> sub{};
  {
    std::array<std::uint32_t, 4> words{};
    seq.generate(words.begin(), words.end());
    sub[0] = (std::uint64_t{words[0]} << 32) | words[1];
    sub[1] = (std::uint64_t{words[2]} << 32) | words[3];
  }
  const Image p0 = make_disc_phantom(op.grid(), support_radius, {0.0, 0.0}, 0.0, 1.0, sub[0]);
  const BoundaryData data = random_boundary_data(op, sub[1]);
  InnerProductReport r = inner_product_test(op, p0, data);
  r.seed = seed;
  r.config_digest = digest;
  return r;
}

DenseOracle dense_oracle(const PatOperator& op, std::size_t element_budget) {
  const Grid& grid = op.grid();
  DenseOracle o;
  o.rows = op.node_count() * op.sample_count();
  o.cols = static_cast<std::size_t>(grid.dim(0)) * static_cast<std::size_t>(grid.dim(1));
  if (o.rows * o.cols > element_budget)
    throw std::length_error("dense oracle: " + std::to_string(o.rows) + " x " +
                            std::to_string(o.cols) + " matrix exceeds the element budget of " +
                            std::to_string(element_budget));

  const double col_scale = std::sqrt(grid.cell_volume());
  std::vector<double> row_scale(o.rows);
  for (std::size_t j = 0; j < op.node_count(); ++j)
    for (std::size_t t = 0; t < op.sample_count(); ++t)
      row_scale[j * op.sample_count() + t] = std::sqrt(op.weights()[j] * grid.dt());

  o.forward.assign(o.rows * o.cols, 0.0);
  Image unit = grid.interior_field();
  for (std::size_t c = 0; c < o.cols; ++c) {
    unit[c] = 1.0;
    const BoundaryData y = op.forward(unit);
    unit[c] = 0.0;
    for (std::size_t r = 0; r < o.rows; ++r)
      o.forward[r * o.cols + c] = row_scale[r] * y.values[r] / col_scale;
  }

  o.adjoint.assign(o.cols * o.rows, 0.0);
  BoundaryData impulse = op.zero_data();
  for (std::size_t r = 0; r < o.rows; ++r) {
    impulse.values[r] = 1.0;
    const Image x = op.adjoint(impulse);
    impulse.values[r] = 0.0;
    for (std::size_t c = 0; c < o.cols; ++c)
      o.adjoint[c * o.rows + r] = col_scale * x[c] / row_scale[r];
  }

  double worst = 0.0;
  for (std::size_t r = 0; r < o.rows; ++r) {
    for (std::size_t c = 0; c < o.cols; ++c) {
      o.max_abs_forward = std::max(o.max_abs_forward, std::abs(o.a(r, c)));
      worst = std::max(worst, std::abs(o.a(r, c) - o.b(c, r)));
    }
  }
  o.discrepancy = o.max_abs_forward > 0.0 ? worst / o.max_abs_forward : worst;
  return o;
}

namespace {

// Value of an interior image at a fractional interior index, zero outside.
double sample_bilinear(const Image& img, double fi, double fj) {
  const double i0 = std::floor(fi);
  const double j0 = std::floor(fj);
  const double ti = fi - i0;
  const double tj = fj - j0;
  auto at = [&](double i, double j) {
    if (i < 0 || j < 0 || i >= static_cast<double>(img.n0()) || j >= static_cast<double>(img.n1()))
      return 0.0;
    return img(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  };
  return (1 - ti) * (1 - tj) * at(i0, j0) + ti * (1 - tj) * at(i0 + 1, j0) +
         (1 - ti) * tj * at(i0, j0 + 1) + ti * tj * at(i0 + 1, j0 + 1);
}

}  // namespace

Image resample(const Image& image, const Grid& from, const Grid& to) {
  if (!from.is_interior_shape(image)) throw std::invalid_argument("resample: image/grid mismatch");
  Image out = to.interior_field();
  const int pf = from.pml_size();
  const int pt = to.pml_size();
  for (std::size_t i = 0; i < out.n0(); ++i) {
    const double fi = from.index_of(0, to.coordinate(0, static_cast<double>(i) + pt)) - pf;
    for (std::size_t j = 0; j < out.n1(); ++j) {
      const double fj = from.index_of(1, to.coordinate(1, static_cast<double>(j) + pt)) - pf;
      out(i, j) = sample_bilinear(image, fi, fj);
    }
  }
  return out;
}

double relative_error(const Image& recon, const Grid& recon_grid, const Image& truth,
                      const Grid& truth_grid) {
  if (!truth_grid.is_interior_shape(truth))
    throw std::invalid_argument("relative_error: truth/grid mismatch");
  const double denom = norm2(truth);
  if (denom == 0.0) throw std::invalid_argument("relative_error: ground truth has zero norm");
  const Image interp = resample(recon, recon_grid, truth_grid);
  return norm2(interp - truth) / denom * 100.0;
}

void write_report_csv(std::ostream& os, std::span<const InnerProductReport> reports) {
  os << "seed,lhs,rhs,rd_percent,absolute,config_digest\n";
  os << std::setprecision(17);
  for (const auto& r : reports)
    os << r.seed << ',' << r.lhs << ',' << r.rhs << ',' << r.rd_percent << ','
       << (r.absolute ? 1 : 0) << ',' << r.config_digest << '\n';
}

}  // namespace pat
