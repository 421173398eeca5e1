#pragma once

#include <cstdint>
#include <limits>

#include "pat/operators.hpp"
#include "pat/receivers.hpp"

namespace pat {

/// I.i.d. uniform values on [lo, hi] at interior points strictly inside the
/// disc, zero elsewhere. Throws when the disc leaves the interior.
Image make_disc_phantom(const Grid& grid, double radius, Point center, double lo, double hi,
                        std::uint64_t seed);

struct VesselParams {
  int n_branches = 6;
  /// Tube half-widths in metres.
  double width_min = 0.08e-3;
  double width_max = 0.25e-3;
  /// Every nonzero value lies within this radius of the origin.
  double support_radius = 8e-3;
};

/// Branching vessel-like phantom: a seeded random-walk trunk plus branches
/// leaving it, stamped as tubes with a cos^2 cross-section and normalised to
/// a peak of 1.
Image make_vessel_phantom(const Grid& grid, std::uint64_t seed, const VesselParams& params);

/// Sentinel for "no noise".
inline constexpr double kNoNoise = std::numeric_limits<double>::infinity();

/// Adds N(0, sigma^2) per sample with sigma = max_t |trace| * 10^(-snr_db/20)
/// chosen per node trace. snr_db = kNoNoise returns the data unchanged.
BoundaryData add_awgn(const BoundaryData& data, double snr_db, std::uint64_t seed);

}  // namespace pat
