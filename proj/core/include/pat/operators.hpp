#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "pat/field.hpp"
#include "pat/grid.hpp"
#include "pat/receivers.hpp"
#include "pat/solver.hpp"
#include "pat/spectral.hpp"

namespace pat {

/// Interior-shaped scalar image (initial pressure or adjoint output).
using Image = Field;

/// Scaled Dirichlet data, one row per receiver node (flattened receiver
/// order) and one column per recorded time t = 0..nt.
struct BoundaryData {
  Field values;
  double dt = 0.0;

  std::size_t nodes() const noexcept { return values.n0(); }
  std::size_t samples() const noexcept { return values.n1(); }
};

/// R S E: window applied on the full grid to the zero-extended image, then
/// restricted. Symmetric because R = E^T and S has a real even multiplier.
Image smooth(const Image& image, const SmootherSpec& spec, const Grid& grid);

/// Composite photoacoustic forward operator and its adjoint on one grid /
/// receiver discretisation. The kernel bandwidth is fixed at b = dx and the
/// temporal regularisation width at q = dt.
class PatOperator {
 public:
  /// `threshold` is the absolute kernel cut-off in m^-d (ignored for
  /// on-grid arrays).
  PatOperator(const Grid& grid, const Medium& medium, ReceiverArray array, double threshold,
              SmootherSpec smoother = {});

  const Grid& grid() const noexcept { return grid_; }
  const Medium& medium() const noexcept { return medium_; }
  const ReceiverArray& array() const noexcept { return array_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  const std::vector<DeltaKernel>& kernels() const noexcept { return kernels_; }
  const SmootherSpec& smoother() const noexcept { return smoother_; }
  std::size_t node_count() const noexcept { return weights_.size(); }
  std::size_t sample_count() const noexcept { return static_cast<std::size_t>(grid_.nt()) + 1; }
  std::size_t kernel_entry_count() const noexcept { return csr_index_.size(); }

  BoundaryData zero_data() const;

  /// Mass source S_m^zeta(t + 1/2) = S p0 / (2 c^2 d dt) at t = -1 and 0.
  /// Accepts an interior image, or a full-grid field that must vanish in the
  /// PML.
  SourceSchedule forward_mass_schedule(const Field& p0) const;

  /// Force source from time-reversed data: at step t the sample nt - t - 1 is
  /// emitted as -(1/(2 rho0)) sum_j w_j delta_b(X - x_j) g_j n_{r,-}, then
  /// moved onto the staggered velocity positions by a half-cell spectral
  /// shift (the transpose of the shift folded into the reception gradient).
  SourceSchedule adjoint_force_schedule(const BoundaryData& data) const;

  /// y_j(t) = 1/2 sum_i dx^d delta_b(x_j - X_i) n_{r,+} . grad p(X_i, t).
  BoundaryData forward(const Image& p0) const;

  /// dt * S (1/(2 c^2)) (p(nt) - p(nt - 2)) / dt^2 of the emission run,
  /// restricted to the interior. The leading dt is the time measure that
  /// pairs with the domain inner product, which makes this the adjoint of
  /// forward() under domain_inner / boundary_inner.
  Image adjoint(const BoundaryData& data) const;

 private:
  void check_data(const BoundaryData& data) const;

  Grid grid_;
  Medium medium_;
  ReceiverArray array_;
  SmootherSpec smoother_;
  std::vector<double> weights_;
  std::vector<DeltaKernel> kernels_;
  std::vector<Point> normals_;  // n_{r,+} per node

  // Flattened kernels: entries of node j live in [offset[j], offset[j+1]).
  std::vector<std::size_t> csr_offset_;
  std::vector<std::size_t> csr_index_;
  std::vector<double> csr_value_;
};

/// Moves boundary data between two discretisations of the same receivers:
/// each target node takes the linear interpolant of the source nodes along
/// its receiver segment. Receiver counts and time axes must match.
BoundaryData transfer_boundary_data(const BoundaryData& data, const ReceiverArray& from,
                                    const ReceiverArray& to);

/// Absolute kernel threshold from a factor relative to 1/b^d with b = dx.
double kernel_threshold(double factor, const Grid& grid);

}  // namespace pat
