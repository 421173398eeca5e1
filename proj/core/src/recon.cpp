#include "pat/recon.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>

#include "pat/verify.hpp"

namespace pat {

void validate(const ReconConfig& c) {
  if (c.tau_mode == TauMode::kFixed && !(c.tau > 0.0))
    throw std::invalid_argument("recon: fixed step length must be positive");
  if (!(c.eta > 0.0 && c.eta < 1.0)) throw std::invalid_argument("recon: eta must lie in (0, 1)");
  if (c.max_iters < 1) throw std::invalid_argument("recon: max_iters must be at least 1");
  if (c.tau_mode == TauMode::kAuto && (c.power_iterations < 1 || !(c.tau_safety > 0.0)))
    throw std::invalid_argument("recon: invalid power-method settings");
}

namespace {

BoundaryData residual(const PatOperator& op, const Image& p0, const BoundaryData& measured) {
  BoundaryData r = op.forward(p0);
  axpy(-1.0, measured.values, r.values);
  return r;
}

}  // namespace

double objective(const PatOperator& op, const Image& p0, const BoundaryData& measured) {
  const BoundaryData r = residual(op, p0, measured);
  return boundary_inner(r, r, op.weights());
}

Image step_direction(const PatOperator& op, const Image& p0, const BoundaryData& measured) {
  return -2.0 * op.adjoint(residual(op, p0, measured));
}

double estimate_lipschitz(const PatOperator& op, int iterations, std::uint64_t seed) {
  const Grid& grid = op.grid();
  Image x = grid.interior_field();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t k = 0; k < x.size(); ++k) x[k] = u(rng);

  double estimate = 0.0;
  for (int it = 0; it < iterations; ++it) {
    const double xn = std::sqrt(domain_inner(x, x, grid));
    if (xn == 0.0) return 0.0;
    x = (1.0 / xn) * x;
    const Image y = 2.0 * op.adjoint(op.forward(x));
    estimate = domain_inner(x, y, grid);
    x = y;
  }
  return estimate;
}

ReconResult reconstruct(const PatOperator& op, const BoundaryData& measured,
                        const ReconConfig& config,
                        const std::function<double(const Image&)>& monitor) {
  validate(config);
  ReconResult res;
  res.p0 = op.grid().interior_field();
  if (config.tau_mode == TauMode::kFixed) {
    res.tau = config.tau;
  } else {
    const double lip = estimate_lipschitz(op, config.power_iterations, config.power_seed);
    if (!(lip > 0.0) || !std::isfinite(lip))
      throw std::runtime_error("recon: power method returned a non-positive operator norm");
    res.tau = config.tau_safety / lip;
  }

  auto record = [&](double chi, const Image& p) {
    if (!config.record_history) return;
    res.objective_history.push_back(chi);
    if (monitor) res.re_history.push_back(monitor(p));
  };

  BoundaryData r = residual(op, res.p0, measured);
  double chi = boundary_inner(r, r, op.weights());
  if (!std::isfinite(chi)) throw std::runtime_error("recon: non-finite objective at iterate 0");
  record(chi, res.p0);

  for (int n = 0; n < config.max_iters; ++n) {
    const Image d = -2.0 * op.adjoint(r);
    Image next = res.p0;
    axpy(res.tau, d, next);
    for (std::size_t k = 0; k < next.size(); ++k) next[k] = std::max(next[k], 0.0);

    const double prev_norm = norm2(res.p0);
    const double change = norm2(next - res.p0);
    res.p0 = std::move(next);
    res.iterations_used = n + 1;

    r = residual(op, res.p0, measured);
    chi = boundary_inner(r, r, op.weights());
    if (!std::isfinite(chi))
      throw std::runtime_error("recon: non-finite objective at iterate " + std::to_string(n + 1));
    record(chi, res.p0);

    // A zero update is a fixed point; otherwise the relative test needs a
    // nonzero previous iterate.
    if (change == 0.0 || (prev_norm > 0.0 && change / prev_norm < config.eta)) {
      res.termination = Termination::kTolerance;
      return res;
    }
  }
  res.termination = Termination::kMaxIters;
  return res;
}

void write_history_csv(std::ostream& os, const ReconResult& result) {
  const bool with_re = !result.re_history.empty();
  os << "iteration,objective" << (with_re ? ",relative_error_percent" : "") << '\n';
  os << std::setprecision(17);
  for (std::size_t n = 0; n < result.objective_history.size(); ++n) {
    os << n << ',' << result.objective_history[n];
    if (with_re) os << ',' << result.re_history[n];
    os << '\n';
  }
}

}  // namespace pat
