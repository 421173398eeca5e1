#include "pat/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace pat {

namespace {

std::vector<double> fft_wavenumbers(int n, double dx) {
  std::vector<double> k(static_cast<std::size_t>(n));
  const double dk = 2.0 * std::numbers::pi / (n * dx);
  for (int m = 0; m < n; ++m) {
    // m = n/2 (even n) lands in the negative half: -pi/dx.
    const int signed_m = (2 * m < n) ? m : m - n;
    k[static_cast<std::size_t>(m)] = signed_m * dk;
  }
  return k;
}

}  // namespace

Grid make_grid(std::array<int, kDim> dims, double dx, int pml_size, double pml_alpha_max,
               int nt, double dt) {
  if (!(dx > 0.0) || !std::isfinite(dx)) throw std::invalid_argument("grid: dx must be positive");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("grid: dt must be positive");
  if (nt < 1) throw std::invalid_argument("grid: nt must be at least 1");
  if (pml_size < 0) throw std::invalid_argument("grid: pml_size must be non-negative");
  if (pml_alpha_max < 0.0) throw std::invalid_argument("grid: pml_alpha_max must be non-negative");
  for (int a = 0; a < kDim; ++a) {
    if (dims[static_cast<std::size_t>(a)] < 8)
      throw std::invalid_argument("grid: interior dimension " + std::to_string(a) +
                                  " must be at least 8, got " +
                                  std::to_string(dims[static_cast<std::size_t>(a)]));
  }
  Grid g;
  g.dims_ = dims;
  g.dx_ = dx;
  g.pml_size_ = pml_size;
  g.pml_alpha_max_ = pml_alpha_max;
  g.nt_ = nt;
  g.dt_ = dt;
  for (int a = 0; a < kDim; ++a) g.k_[static_cast<std::size_t>(a)] = fft_wavenumbers(g.total(a), dx);
  return g;
}

double Grid::cell_volume() const noexcept { return std::pow(dx_, kDim); }

double Grid::coordinate(int axis, double full_index) const {
  return (full_index - pml_size_ - dim(axis) / 2) * dx_;
}

double Grid::index_of(int axis, double x) const { return x / dx_ + pml_size_ + dim(axis) / 2; }

bool Grid::is_interior(std::size_t i0, std::size_t i1) const noexcept {
  const auto p = static_cast<std::size_t>(pml_size_);
  return i0 >= p && i0 < p + static_cast<std::size_t>(dims_[0]) && i1 >= p &&
         i1 < p + static_cast<std::size_t>(dims_[1]);
}

Field Grid::full_field(double value) const {
  return Field(static_cast<std::size_t>(total(0)), static_cast<std::size_t>(total(1)), value);
}

Field Grid::interior_field(double value) const {
  return Field(static_cast<std::size_t>(dims_[0]), static_cast<std::size_t>(dims_[1]), value);
}

bool Grid::is_full_shape(const Field& f) const noexcept {
  return f.n0() == static_cast<std::size_t>(total(0)) && f.n1() == static_cast<std::size_t>(total(1));
}

bool Grid::is_interior_shape(const Field& f) const noexcept {
  return f.n0() == static_cast<std::size_t>(dims_[0]) && f.n1() == static_cast<std::size_t>(dims_[1]);
}

Field Grid::embed(const Field& interior) const {
  if (!is_interior_shape(interior)) throw std::invalid_argument("embed: expected interior-shaped field");
  Field full = full_field();
  const auto p = static_cast<std::size_t>(pml_size_);
  for (std::size_t i = 0; i < interior.n0(); ++i)
    std::copy_n(interior.data() + i * interior.n1(), interior.n1(), &full(i + p, p));
  return full;
}

Field Grid::restrict_to_interior(const Field& full) const {
  if (!is_full_shape(full)) throw std::invalid_argument("restrict: expected full-grid field");
  Field out = interior_field();
  const auto p = static_cast<std::size_t>(pml_size_);
  for (std::size_t i = 0; i < out.n0(); ++i) std::copy_n(full.data() + (i + p) * full.n1() + p, out.n1(), &out(i, 0));
  return out;
}

Medium homogeneous_medium(const Grid& grid, double c, double rho0) {
  Medium m{grid.full_field(c), grid.full_field(rho0), c};
  validate_medium(m, grid);
  return m;
}

void validate_medium(Medium& medium, const Grid& grid) {
  if (!grid.is_full_shape(medium.c) || !grid.is_full_shape(medium.rho0))
    throw std::invalid_argument("medium: fields must cover the full grid");
  double cmax = 0.0;
  for (std::size_t i = 0; i < medium.c.size(); ++i) {
    if (!(medium.c[i] > 0.0) || !std::isfinite(medium.c[i]))
      throw std::invalid_argument("medium: sound speed must be positive and finite");
    if (!(medium.rho0[i] > 0.0) || !std::isfinite(medium.rho0[i]))
      throw std::invalid_argument("medium: density must be positive and finite");
    cmax = std::max(cmax, medium.c[i]);
  }
  if (medium.c_ref <= 0.0) medium.c_ref = cmax;
}

PmlAxisProfile pml_profile(const Grid& grid, int axis, double c_ref) {
  const int n = grid.total(axis);
  const int pml = grid.pml_size();
  const int first_interior = pml;
  const int last_interior = pml + grid.dim(axis) - 1;
  const double peak = grid.pml_alpha_max() * c_ref / grid.dx();

  auto lambda_at = [&](double s) {
    if (pml == 0) return 1.0;
    double depth = 0.0;
    if (s < first_interior) depth = first_interior - s;
    else if (s > last_interior) depth = s - last_interior;
    if (depth == 0.0) return 1.0;
    const double alpha = peak * std::pow(depth / pml, 4);
    return std::exp(-alpha * grid.dt() / 2.0);
  };

  PmlAxisProfile prof;
  prof.regular.resize(static_cast<std::size_t>(n));
  prof.staggered.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    prof.regular[static_cast<std::size_t>(i)] = lambda_at(i);
    prof.staggered[static_cast<std::size_t>(i)] = lambda_at(i + 0.5);
  }
  return prof;
}

PmlProfile make_pml(const Grid& grid, double c_ref) {
  PmlProfile p;
  for (int a = 0; a < kDim; ++a) p.axes[static_cast<std::size_t>(a)] = pml_profile(grid, a, c_ref);
  return p;
}

}  // namespace pat
