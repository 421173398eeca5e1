#include "pat/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace pat {

Image make_disc_phantom(const Grid& grid, double radius, Point center, double lo, double hi,
                        std::uint64_t seed) {
  if (radius < 0.0) throw std::invalid_argument("disc phantom: negative radius");
  if (hi < lo) throw std::invalid_argument("disc phantom: empty value range");
  const int p = grid.pml_size();
  for (int a = 0; a < kDim; ++a) {
    const double first = grid.coordinate(a, p);
    const double last = grid.coordinate(a, p + grid.dim(a) - 1);
    const double c = center[static_cast<std::size_t>(a)];
    if (c - radius < first || c + radius > last)
      throw std::invalid_argument("disc phantom: disc of radius " + std::to_string(radius) +
                                  " m leaves the grid interior");
  }

  Image img = grid.interior_field();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> value(lo, hi);
  for (std::size_t i = 0; i < img.n0(); ++i) {
    const double x = grid.coordinate(0, static_cast<double>(i) + p) - center[0];
    for (std::size_t j = 0; j < img.n1(); ++j) {
      const double y = grid.coordinate(1, static_cast<double>(j) + p) - center[1];
      if (x * x + y * y < radius * radius) img(i, j) = value(rng);
    }
  }
  return img;
}

namespace {

struct Segment {
  Point a;
  Point b;
  double width;
};

double distance_to_segment(const Point& q, const Segment& s) {
  const double vx = s.b[0] - s.a[0];
  const double vy = s.b[1] - s.a[1];
  const double len2 = vx * vx + vy * vy;
  double t = len2 > 0.0 ? ((q[0] - s.a[0]) * vx + (q[1] - s.a[1]) * vy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(q[0] - (s.a[0] + t * vx), q[1] - (s.a[1] + t * vy));
}

// Random walk of fixed step from `start` along `heading`, stopping before a
// tube of the given width would cross the support radius.
std::vector<Segment> walk(Point start, double heading, double width, double step, int max_steps,
                          double turn_sd, double limit, std::mt19937_64& rng) {
  std::normal_distribution<double> turn(0.0, turn_sd);
  std::vector<Segment> out;
  Point cur = start;
  for (int s = 0; s < max_steps; ++s) {
    heading += turn(rng);
    const Point next{cur[0] + step * std::cos(heading), cur[1] + step * std::sin(heading)};
    if (std::hypot(next[0], next[1]) + width > limit) break;
    out.push_back({cur, next, width});
    cur = next;
  }
  return out;
}

}  // namespace

Image make_vessel_phantom(const Grid& grid, std::uint64_t seed, const VesselParams& params) {
  if (params.n_branches < 0) throw std::invalid_argument("vessel phantom: negative branch count");
  if (!(params.width_min > 0.0) || params.width_max < params.width_min)
    throw std::invalid_argument("vessel phantom: invalid width range");
  if (!(params.support_radius > 2.0 * params.width_max))
    throw std::invalid_argument("vessel phantom: support radius too small for the tube width");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double limit = params.support_radius;
  const double step = std::max(grid.dx(), limit / 40.0);

  // Trunk enters near the rim and heads roughly across the support.
  const double phi = 2.0 * std::numbers::pi * unit(rng);
  const double trunk_width = params.width_max;
  const Point start{(limit - 2.0 * trunk_width) * 0.9 * std::cos(phi),
                    (limit - 2.0 * trunk_width) * 0.9 * std::sin(phi)};
  std::vector<Segment> segments =
      walk(start, phi + std::numbers::pi, trunk_width, step, 200, 0.12, limit, rng);
  const std::size_t trunk_count = segments.size();

  for (int b = 0; b < params.n_branches && trunk_count > 0; ++b) {
    const auto& from = segments[static_cast<std::size_t>(unit(rng) * trunk_count) % trunk_count];
    const double dir = std::atan2(from.b[1] - from.a[1], from.b[0] - from.a[0]);
    const double side = unit(rng) < 0.5 ? -1.0 : 1.0;
    const double width =
        params.width_min + (params.width_max - params.width_min) * 0.7 * unit(rng);
    auto branch = walk(from.b, dir + side * (0.4 + 0.6 * unit(rng)), width, step, 80, 0.2, limit,
                       rng);
    segments.insert(segments.end(), branch.begin(), branch.end());
  }

  Image img = grid.interior_field();
  const int p = grid.pml_size();
  for (const Segment& s : segments) {
    // Only visit the bounding box of the tube.
    const double lo_x = std::min(s.a[0], s.b[0]) - s.width;
    const double hi_x = std::max(s.a[0], s.b[0]) + s.width;
    const double lo_y = std::min(s.a[1], s.b[1]) - s.width;
    const double hi_y = std::max(s.a[1], s.b[1]) + s.width;
    const auto i0 = static_cast<long>(std::floor(grid.index_of(0, lo_x))) - p;
    const auto i1 = static_cast<long>(std::ceil(grid.index_of(0, hi_x))) - p;
    const auto j0 = static_cast<long>(std::floor(grid.index_of(1, lo_y))) - p;
    const auto j1 = static_cast<long>(std::ceil(grid.index_of(1, hi_y))) - p;
    for (long i = std::max(0L, i0); i <= std::min<long>(grid.dim(0) - 1, i1); ++i) {
      for (long j = std::max(0L, j0); j <= std::min<long>(grid.dim(1) - 1, j1); ++j) {
        const Point q{grid.coordinate(0, static_cast<double>(i + p)),
                      grid.coordinate(1, static_cast<double>(j + p))};
        const double d = distance_to_segment(q, s);
        if (d >= s.width) continue;
        const double c = std::cos(0.5 * std::numbers::pi * d / s.width);
        double& v = img(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
        v = std::max(v, c * c);
      }
    }
  }
  const double peak = max_abs(img);
  if (peak > 0.0)
    for (std::size_t k = 0; k < img.size(); ++k) img[k] /= peak;
  return img;
}

BoundaryData add_awgn(const BoundaryData& data, double snr_db, std::uint64_t seed) {
  if (std::isnan(snr_db)) throw std::invalid_argument("add_awgn: SNR is NaN");
  BoundaryData out = data;
  if (std::isinf(snr_db) && snr_db > 0.0) return out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  const double factor = std::pow(10.0, -snr_db / 20.0);
  for (std::size_t j = 0; j < out.nodes(); ++j) {
    double peak = 0.0;
    for (std::size_t t = 0; t < out.samples(); ++t) peak = std::max(peak, std::abs(out.values(j, t)));
    const double sigma = peak * factor;
    // Draw for every sample regardless of sigma so node j's noise does not
    // depend on which other traces are silent.
    for (std::size_t t = 0; t < out.samples(); ++t) out.values(j, t) += sigma * noise(rng);
  }
  return out;
}

}  // namespace pat
