#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "pat/field.hpp"

namespace pat {

/// Uniform Cartesian grid with a PML frame and the simulation time axis.
///
/// Interior points run over [pml_size, pml_size + dims) on every axis of the
/// full (total) grid. Physical coordinates are centred so that interior index
/// m sits at (m - dims/2) * dx.
class Grid {
 public:
  const std::array<int, kDim>& dims() const noexcept { return dims_; }
  int dim(int axis) const { return dims_.at(static_cast<std::size_t>(axis)); }
  int total(int axis) const { return dim(axis) + 2 * pml_size_; }
  double dx() const noexcept { return dx_; }
  double dt() const noexcept { return dt_; }
  int nt() const noexcept { return nt_; }
  int pml_size() const noexcept { return pml_size_; }
  double pml_alpha_max() const noexcept { return pml_alpha_max_; }
  double cell_volume() const noexcept;

  /// Wavenumbers of the full extent along `axis`, in FFT order. The Nyquist
  /// bin (even sizes) holds -pi/dx.
  const std::vector<double>& wavenumbers(int axis) const {
    return k_.at(static_cast<std::size_t>(axis));
  }

  /// Physical coordinate of full-grid index i along axis.
  double coordinate(int axis, double full_index) const;
  /// Fractional full-grid index of a physical coordinate.
  double index_of(int axis, double x) const;

  bool is_interior(std::size_t i0, std::size_t i1) const noexcept;

  Field full_field(double value = 0.0) const;
  Field interior_field(double value = 0.0) const;
  /// Zero-extends an interior-shaped field to the full grid.
  Field embed(const Field& interior) const;
  /// Extracts the interior block of a full-grid field.
  Field restrict_to_interior(const Field& full) const;

  bool is_full_shape(const Field& f) const noexcept;
  bool is_interior_shape(const Field& f) const noexcept;

 private:
  friend Grid make_grid(std::array<int, kDim>, double, int, double, int, double);

  std::array<int, kDim> dims_{};
  double dx_ = 0.0;
  int pml_size_ = 0;
  double pml_alpha_max_ = 2.0;
  int nt_ = 0;
  double dt_ = 0.0;
  std::array<std::vector<double>, kDim> k_;
};

/// Throws std::invalid_argument on non-positive dx/dt, nt < 1, negative PML
/// size or any interior dimension below 8.
Grid make_grid(std::array<int, kDim> dims, double dx, int pml_size, double pml_alpha_max,
               int nt, double dt);

/// Sound speed and ambient density sampled on the full grid.
struct Medium {
  Field c;
  Field rho0;
  double c_ref = 0.0;
};

Medium homogeneous_medium(const Grid& grid, double c, double rho0);
/// Checks shapes and positivity; c_ref defaults to max(c) when zero.
void validate_medium(Medium& medium, const Grid& grid);

/// PML multipliers Lambda = exp(-alpha dt / 2) along one axis, at regular
/// and half-index-staggered positions.
struct PmlAxisProfile {
  std::vector<double> regular;
  std::vector<double> staggered;
};

struct PmlProfile {
  std::array<PmlAxisProfile, kDim> axes;
};

/// alpha(xi) = pml_alpha_max * (xi / L)^4 * c_ref / dx over layer depth xi
/// measured in cells from the interior edge (L = pml_size).
PmlAxisProfile pml_profile(const Grid& grid, int axis, double c_ref);
PmlProfile make_pml(const Grid& grid, double c_ref);

}  // namespace pat
