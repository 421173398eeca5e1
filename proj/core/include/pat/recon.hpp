#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "pat/operators.hpp"

namespace pat {

enum class TauMode { kAuto, kFixed };

struct ReconConfig {
  TauMode tau_mode = TauMode::kAuto;
  /// Step length in fixed mode.
  double tau = 0.0;
  /// Relative iterate change that ends the loop.
  double eta = 1e-3;
  int max_iters = 50;
  bool record_history = true;
  /// Auto mode: tau = tau_safety / L, L from power iterations.
  int power_iterations = 10;
  double tau_safety = 0.9;
  std::uint64_t power_seed = 7;
};

/// Throws std::invalid_argument on out-of-range fields.
void validate(const ReconConfig& config);

enum class Termination { kTolerance, kMaxIters };

struct ReconResult {
  Image p0;
  /// chi at every iterate, starting with the zero initial guess.
  std::vector<double> objective_history;
  /// Relative error (percent) per iterate when a monitor was supplied.
  std::vector<double> re_history;
  int iterations_used = 0;
  Termination termination = Termination::kMaxIters;
  double tau = 0.0;
};

/// ||F p0 - m||^2 under boundary_inner.
double objective(const PatOperator& op, const Image& p0, const BoundaryData& measured);

/// -2 F*(F p0 - m).
Image step_direction(const PatOperator& op, const Image& p0, const BoundaryData& measured);

/// Rayleigh-quotient estimate of ||2 F* F|| from `iterations` power steps on
/// a random nonnegative image.
double estimate_lipschitz(const PatOperator& op, int iterations, std::uint64_t seed);

/// Projected gradient descent p <- max(p + tau d, 0) from p = 0. `monitor`
/// (optional) maps an iterate to a relative error in percent.
ReconResult reconstruct(const PatOperator& op, const BoundaryData& measured,
                        const ReconConfig& config,
                        const std::function<double(const Image&)>& monitor = {});

/// CSV `iteration,objective[,relative_error_percent]`.
void write_history_csv(std::ostream& os, const ReconResult& result);

}  // namespace pat
