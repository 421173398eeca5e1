#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "pat/experiments.hpp"
#include "pat/operators.hpp"

namespace pat::test {

inline Grid small_grid(int n = 32, int pml = 0, int nt = 40, double cfl = 0.3) {
  const double dx = 1e-3;
  return make_grid({n, n}, dx, pml, 2.0, nt, cfl * dx / 1500.0);
}

inline Field random_field(std::size_t n0, std::size_t n1, std::uint64_t seed, double lo = -1.0,
                          double hi = 1.0) {
  Field f(n0, n1);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = u(rng);
  return f;
}

inline double rel_diff(const Field& a, const Field& b) {
  const double d = norm2(a - b);
  const double s = std::max(norm2(a), norm2(b));
  return s == 0.0 ? d : d / s;
}

// The dense-oracle configuration: 16^2 interior, 40 steps, 4 receivers on a
// circle, no PML.
inline ExperimentConfig oracle_config() {
  ExperimentConfig c;
  c.name = "oracle";
  c.grid = {{16, 16}, 1e-3, 0, 2.0, 40, 0.3e-3 / 1500.0};
  c.array.kind = ArrayKind::kCircular;
  c.array.n_receivers = 4;
  c.array.radius = 0.35 * 16 * 1e-3;
  c.array.half_length = 0.5e-3;
  c.array.nodes_per_receiver = 2;
  c.array.eps_factor = 0.01;
  c.phantom.radius = 4e-3;
  return c;
}

}  // namespace pat::test
