#pragma once

#include <array>
#include <memory>
#include <vector>

#include "pat/field.hpp"
#include "pat/grid.hpp"

namespace pat {

/// Half-cell offset at which a staggered derivative is evaluated.
enum class Shift : int { kMinusHalf = -1, kNone = 0, kPlusHalf = 1 };

enum class SmootherKind { kNone, kRaisedCosine };

/// Radial k-space window: 1 below rolloff_start * k_nyquist, raised-cosine
/// taper to 0 at rolloff_end * k_nyquist.
struct SmootherSpec {
  SmootherKind kind = SmootherKind::kRaisedCosine;
  double rolloff_start = 0.5;
  double rolloff_end = 1.0;
};

double window_value(const SmootherSpec& spec, double k_over_nyquist);

/// FFT-based operators on the full grid (periodic in every axis).
///
/// Derivatives multiply the spectrum by i k kappa exp(+-i k dx / 2) with the
/// k-space correction kappa = sinc(c_ref |k| dt / 2). Bins at the Nyquist
/// wavenumber of the differentiated axis are zeroed so every operator maps
/// real fields to real fields and transposes to the conjugate multiplier.
///
/// Instances are immutable after construction; all scratch is caller-owned,
/// so const member functions may be called concurrently.
class SpectralOperators {
 public:
  SpectralOperators(const Grid& grid, double c_ref, bool kspace_correction = true);

  std::size_t n0() const noexcept { return n0_; }
  std::size_t n1() const noexcept { return n1_; }
  std::size_t spectrum_size() const noexcept { return n0_ * (n1_ / 2 + 1); }
  ComplexBuffer make_spectrum() const { return ComplexBuffer(spectrum_size()); }

  /// Forward real-to-complex transform of a full-grid field.
  void transform(const Field& in, ComplexBuffer& spectrum) const;
  /// out = inverse transform of (multiplier .* spectrum); scratch is clobbered.
  void apply(const ComplexBuffer& spectrum, const ComplexBuffer& multiplier, Field& out,
             ComplexBuffer& scratch) const;

  const ComplexBuffer& derivative_multiplier(int axis, Shift shift) const;
  /// Band-limited translation by half a cell along axis.
  const ComplexBuffer& shift_multiplier(int axis, Shift shift) const;
  ComplexBuffer window_multiplier(const SmootherSpec& spec) const;

  // Allocating conveniences.
  Field derivative(const Field& f, int axis, Shift shift) const;
  Field filter(const Field& f, const ComplexBuffer& multiplier) const;

 private:
  struct Plans;

  std::size_t n0_ = 0;
  std::size_t n1_ = 0;
  double dx_ = 0.0;
  std::shared_ptr<const Plans> plans_;
  // [axis][shift + 1]
  std::array<std::array<ComplexBuffer, 3>, kDim> deriv_;
  std::array<std::array<ComplexBuffer, 3>, kDim> shift_;
  std::array<std::vector<double>, kDim> k_;
};

/// One-shot staggered spectral derivative (builds transient plans).
Field spectral_derivative(const Field& field, int axis, Shift shift, const Grid& grid,
                          const Medium& medium);

/// Applies the window to a full-grid field.
Field smooth_full(const Field& full, const SmootherSpec& spec, const SpectralOperators& ops);

}  // namespace pat
