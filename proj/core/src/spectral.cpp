#include "pat/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace pat {

namespace {

// The FFTW planner is not re-entrant; execution with the new-array API is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

bool is_nyquist(std::size_t index, std::size_t n) { return n % 2 == 0 && index == n / 2; }

fftw_complex* as_fftw(std::complex<double>* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

struct SpectralOperators::Plans {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;

  Plans(std::size_t n0, std::size_t n1) {
    RealBuffer real(n0 * n1);
    ComplexBuffer spec(n0 * (n1 / 2 + 1));
    std::lock_guard lock(planner_mutex());
    r2c = fftw_plan_dft_r2c_2d(static_cast<int>(n0), static_cast<int>(n1), real.data(),
                               as_fftw(spec.data()), FFTW_ESTIMATE);
    c2r = fftw_plan_dft_c2r_2d(static_cast<int>(n0), static_cast<int>(n1), as_fftw(spec.data()),
                               real.data(), FFTW_ESTIMATE);
    if (r2c == nullptr || c2r == nullptr) throw std::runtime_error("FFTW planning failed");
  }
  ~Plans() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(r2c);
    fftw_destroy_plan(c2r);
  }
  Plans(const Plans&) = delete;
  Plans& operator=(const Plans&) = delete;
};

double window_value(const SmootherSpec& spec, double r) {
  if (spec.kind == SmootherKind::kNone) return 1.0;
  if (r <= spec.rolloff_start) return 1.0;
  if (r >= spec.rolloff_end) return 0.0;
  const double t = (r - spec.rolloff_start) / (spec.rolloff_end - spec.rolloff_start);
  return 0.5 * (1.0 + std::cos(std::numbers::pi * t));
}

SpectralOperators::SpectralOperators(const Grid& grid, double c_ref, bool kspace_correction)
    : n0_(static_cast<std::size_t>(grid.total(0))),
      n1_(static_cast<std::size_t>(grid.total(1))),
      dx_(grid.dx()),
      plans_(std::make_shared<Plans>(n0_, n1_)) {
  k_[0] = grid.wavenumbers(0);
  k_[1] = grid.wavenumbers(1);
  const std::size_t h1 = n1_ / 2 + 1;
  const double norm = 1.0 / static_cast<double>(n0_ * n1_);
  const std::complex<double> I(0.0, 1.0);

  for (int axis = 0; axis < kDim; ++axis) {
    for (int s = -1; s <= 1; ++s) {
      ComplexBuffer d(spectrum_size());
      ComplexBuffer t(spectrum_size());
      for (std::size_t a = 0; a < n0_; ++a) {
        for (std::size_t b = 0; b < h1; ++b) {
          const double k0 = k_[0][a];
          const double k1 = k_[1][b];
          const double kmag = std::hypot(k0, k1);
          const double kappa = kspace_correction ? sinc(c_ref * kmag * grid.dt() / 2.0) : 1.0;
          const bool nyq = axis == 0 ? is_nyquist(a, n0_) : is_nyquist(b, n1_);
          const double kz = axis == 0 ? k0 : k1;
          const std::size_t idx = a * h1 + b;
          if (nyq) {
            d[idx] = 0.0;
            t[idx] = 0.0;
            continue;
          }
          const std::complex<double> phase = std::exp(I * (s * kz * dx_ / 2.0));
          d[idx] = norm * I * kz * kappa * phase;
          t[idx] = norm * phase;
        }
      }
      deriv_[static_cast<std::size_t>(axis)][static_cast<std::size_t>(s + 1)] = std::move(d);
      shift_[static_cast<std::size_t>(axis)][static_cast<std::size_t>(s + 1)] = std::move(t);
    }
  }
}

void SpectralOperators::transform(const Field& in, ComplexBuffer& spectrum) const {
  if (in.n0() != n0_ || in.n1() != n1_) throw std::invalid_argument("spectral: field shape mismatch");
  if (spectrum.size() != spectrum_size()) spectrum.resize(spectrum_size());
  // r2c keeps its input intact for out-of-place transforms.
  fftw_execute_dft_r2c(plans_->r2c, const_cast<double*>(in.data()), as_fftw(spectrum.data()));
}

void SpectralOperators::apply(const ComplexBuffer& spectrum, const ComplexBuffer& multiplier,
                              Field& out, ComplexBuffer& scratch) const {
  if (out.n0() != n0_ || out.n1() != n1_) out = Field(n0_, n1_);
  if (scratch.size() != spectrum_size()) scratch.resize(spectrum_size());
  for (std::size_t i = 0; i < spectrum_size(); ++i) scratch[i] = spectrum[i] * multiplier[i];
  fftw_execute_dft_c2r(plans_->c2r, as_fftw(scratch.data()), out.data());
}

const ComplexBuffer& SpectralOperators::derivative_multiplier(int axis, Shift shift) const {
  return deriv_.at(static_cast<std::size_t>(axis)).at(static_cast<std::size_t>(static_cast<int>(shift) + 1));
}

const ComplexBuffer& SpectralOperators::shift_multiplier(int axis, Shift shift) const {
  return shift_.at(static_cast<std::size_t>(axis)).at(static_cast<std::size_t>(static_cast<int>(shift) + 1));
}

ComplexBuffer SpectralOperators::window_multiplier(const SmootherSpec& spec) const {
  const std::size_t h1 = n1_ / 2 + 1;
  const double norm = 1.0 / static_cast<double>(n0_ * n1_);
  const double k_nyq = std::numbers::pi / dx_;
  ComplexBuffer w(spectrum_size());
  for (std::size_t a = 0; a < n0_; ++a)
    for (std::size_t b = 0; b < h1; ++b)
      w[a * h1 + b] = norm * window_value(spec, std::hypot(k_[0][a], k_[1][b]) / k_nyq);
  return w;
}

Field SpectralOperators::derivative(const Field& f, int axis, Shift shift) const {
  return filter(f, derivative_multiplier(axis, shift));
}

Field SpectralOperators::filter(const Field& f, const ComplexBuffer& multiplier) const {
  ComplexBuffer spec = make_spectrum();
  ComplexBuffer scratch = make_spectrum();
  transform(f, spec);
  Field out(n0_, n1_);
  apply(spec, multiplier, out, scratch);
  return out;
}

Field spectral_derivative(const Field& field, int axis, Shift shift, const Grid& grid,
                          const Medium& medium) {
  const SpectralOperators ops(grid, medium.c_ref);
  return ops.derivative(field, axis, shift);
}

Field smooth_full(const Field& full, const SmootherSpec& spec, const SpectralOperators& ops) {
  if (spec.kind == SmootherKind::kNone) return full;
  return ops.filter(full, ops.window_multiplier(spec));
}

}  // namespace pat
