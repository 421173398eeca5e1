#include "pat/field.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pat {

void* aligned_malloc(std::size_t bytes) { return fftw_malloc(bytes); }
void aligned_free(void* p) noexcept { fftw_free(p); }

void Field::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

namespace {
void require_same(const Field& a, const Field& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("field shape mismatch");
}
}  // namespace

double dot(const Field& a, const Field& b) {
  require_same(a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const Field& a) { return std::sqrt(dot(a, a)); }

double max_abs(const Field& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i]));
  return m;
}

bool all_finite(const Field& a) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!std::isfinite(a[i])) return false;
  return true;
}

void axpy(double alpha, const Field& x, Field& y) {
  require_same(x, y);
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

Field operator+(const Field& a, const Field& b) {
  Field out = a;
  axpy(1.0, b, out);
  return out;
}

Field operator-(const Field& a, const Field& b) {
  Field out = a;
  axpy(-1.0, b, out);
  return out;
}

Field operator*(double s, const Field& a) {
  Field out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= s;
  return out;
}

}  // namespace pat
