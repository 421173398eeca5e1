#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "pat/grid.hpp"

namespace pat {

using Point = std::array<double, kDim>;

/// One straight line receiver split into linear elements.
struct Receiver {
  std::vector<Point> nodes;
  /// Pairs of local node indices.
  std::vector<std::array<std::size_t, 2>> elements;
  std::vector<double> element_lengths;
  /// n_{r,+}: unit normal pointing away from the imaged domain.
  Point normal_out{};

  Point normal_in() const { return {-normal_out[0], -normal_out[1]}; }
};

struct ReceiverArray {
  std::vector<Receiver> receivers;
  /// Nodes coincide with grid points; kernels are exact point masses.
  bool on_grid = false;

  std::size_t node_count() const;
  std::size_t element_count() const;
  /// Receivers [first, first + count).
  ReceiverArray subset(std::size_t first, std::size_t count) const;
};

/// Receivers centred on a circle, each a segment tangent to it.
/// Throws when segments would overlap (arc spacing below segment length).
ReceiverArray build_circular_array(int n_receivers, double radius, double half_length,
                                   int nodes_per_receiver, Point center = {0.0, 0.0});

enum class Side { kLeft, kBottom, kRight, kTop };

/// Two-node receivers joining neighbouring grid points along the row or
/// column `inset` points inside the interior edge (inset = 1 is the first
/// interior row).
ReceiverArray build_ongrid_lines(const Grid& grid, std::span<const Side> sides, int inset);

/// Quadrature weight per node: w_j = sum over elements K containing j of
/// s_K / N_l(K).
std::vector<double> quadrature_weights(const ReceiverArray& array);

struct KernelEntry {
  std::size_t index;  ///< flat full-grid index
  double value;       ///< delta_b(x_j - X_i), units m^-d
};

/// Sparse band-limited delta centred on one node.
struct DeltaKernel {
  std::vector<KernelEntry> entries;
  double bandwidth = 0.0;
  double threshold = 0.0;
};

/// Separable sinc kernel prod_axis (1/b) sinc(pi (x - X) / b) over all
/// full-grid points, keeping entries with |value| > eps.
DeltaKernel delta_kernel(const Point& node, const Grid& grid, double b, double eps);

/// Exact point mass 1/dx^d at the grid point the node sits on.
DeltaKernel exact_delta(const Point& node, const Grid& grid);

/// Kernels for every node in flattened order. On-grid arrays use exact_delta
/// and ignore b/eps.
std::vector<DeltaKernel> build_kernels(const ReceiverArray& array, const Grid& grid, double b,
                                       double eps);

/// JSON with positions, normals and elements per receiver.
void write_receiver_array(const ReceiverArray& array, std::ostream& os);
ReceiverArray read_receiver_array(std::istream& is);

}  // namespace pat
