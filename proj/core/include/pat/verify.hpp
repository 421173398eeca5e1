#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "pat/operators.hpp"

namespace pat {

/// sum_i a_i b_i dx^d over the interior.
double domain_inner(const Image& a, const Image& b, const Grid& grid);

/// sum_j w_j sum_t f_jt g_jt dt.
double boundary_inner(const BoundaryData& f, const BoundaryData& g,
                      std::span<const double> weights);

struct InnerProductReport {
  std::uint64_t seed = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  /// |lhs - rhs| / |lhs| * 100, or the absolute difference when `absolute`.
  double rd_percent = 0.0;
  /// Set when |lhs| < 1e-300 and rd_percent holds |lhs - rhs| instead.
  bool absolute = false;
  std::string config_digest;
};

/// Fills rd_percent/absolute from lhs and rhs.
void finish_report(InnerProductReport& report);

/// Boundary data with i.i.d. uniform samples on [-1, 1].
BoundaryData random_boundary_data(const PatOperator& op, std::uint64_t seed);

/// Draws p0 uniform on [0, 1] inside a centred disc of `support_radius` and
/// random boundary data, then compares <data, F p0> with <F* data, p0>.
/// Both draws derive from `seed`.
InnerProductReport inner_product_test(const PatOperator& op, std::uint64_t seed,
                                      double support_radius, const std::string& digest = {});

/// Same comparison for caller-supplied inputs.
InnerProductReport inner_product_test(const PatOperator& op, const Image& p0,
                                      const BoundaryData& data);

/// Explicit matrices of the forward and adjoint operators in Euclidean
/// coordinates: rows are scaled by sqrt(w_j dt) and columns by sqrt(dx^d), so
/// that adjointness under the weighted inner products becomes A = B^T.
/// Row index = node * samples + t, column index = flat interior cell.
struct DenseOracle {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> forward;  // A, row-major rows x cols
  std::vector<double> adjoint;  // B, row-major cols x rows
  double max_abs_forward = 0.0;
  /// max |A - B^T| / max |A|
  double discrepancy = 0.0;

  double a(std::size_t r, std::size_t c) const { return forward[r * cols + c]; }
  double b(std::size_t c, std::size_t r) const { return adjoint[c * rows + r]; }
};

/// Assembles both matrices by unit-vector probing (cols forward runs, rows
/// adjoint runs). Throws std::length_error when rows * cols exceeds
/// `element_budget`.
DenseOracle dense_oracle(const PatOperator& op, std::size_t element_budget = 4'000'000);

/// Bilinearly interpolates `recon` (zero outside its interior) onto the
/// interior points of `truth_grid` and returns ||interp - truth|| / ||truth||
/// * 100. Throws on a zero-norm truth image.
double relative_error(const Image& recon, const Grid& recon_grid, const Image& truth,
                      const Grid& truth_grid);

/// Bilinear resampling of an interior image onto another grid's interior.
Image resample(const Image& image, const Grid& from, const Grid& to);

/// CSV with header `seed,lhs,rhs,rd_percent,absolute,config_digest`.
void write_report_csv(std::ostream& os, std::span<const InnerProductReport> reports);

}  // namespace pat
