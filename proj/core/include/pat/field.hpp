#pragma once

#include <complex>
#include <cstddef>
#include <new>
#include <span>
#include <vector>

namespace pat {

/// Spatial dimension of everything built here. The data model carries
/// per-axis arrays so a 3-D build only has to widen the stencil loops.
inline constexpr int kDim = 2;

/// Allocator returning SIMD-aligned storage so FFTW plans made on one
/// buffer can be executed on any other buffer of the same kind.
template <class T>
struct AlignedAllocator {
  using value_type = T;

  AlignedAllocator() noexcept = default;
  template <class U>
  AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

  T* allocate(std::size_t n);
  void deallocate(T* p, std::size_t) noexcept;

  template <class U>
  bool operator==(const AlignedAllocator<U>&) const noexcept { return true; }
};

void* aligned_malloc(std::size_t bytes);
void aligned_free(void* p) noexcept;

template <class T>
T* AlignedAllocator<T>::allocate(std::size_t n) {
  if (n == 0) return nullptr;
  void* p = aligned_malloc(n * sizeof(T));
  if (p == nullptr) throw std::bad_alloc();
  return static_cast<T*>(p);
}

template <class T>
void AlignedAllocator<T>::deallocate(T* p, std::size_t) noexcept {
  aligned_free(p);
}

using RealBuffer = std::vector<double, AlignedAllocator<double>>;
using ComplexBuffer = std::vector<std::complex<double>, AlignedAllocator<std::complex<double>>>;

/// Dense 2-D scalar array, row-major with axis 0 the slow index.
class Field {
 public:
  Field() = default;
  Field(std::size_t n0, std::size_t n1, double value = 0.0)
      : n0_(n0), n1_(n1), data_(n0 * n1, value) {}

  std::size_t n0() const noexcept { return n0_; }
  std::size_t n1() const noexcept { return n1_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i0, std::size_t i1) noexcept { return data_[i0 * n1_ + i1]; }
  double operator()(std::size_t i0, std::size_t i1) const noexcept { return data_[i0 * n1_ + i1]; }
  double& operator[](std::size_t i) noexcept { return data_[i]; }
  double operator[](std::size_t i) const noexcept { return data_[i]; }

  double* data() noexcept { return data_.data(); }
  const double* data() const noexcept { return data_.data(); }
  std::span<double> values() noexcept { return {data_.data(), data_.size()}; }
  std::span<const double> values() const noexcept { return {data_.data(), data_.size()}; }

  bool same_shape(const Field& other) const noexcept {
    return n0_ == other.n0_ && n1_ == other.n1_;
  }
  void fill(double v);

  bool operator==(const Field& other) const = default;

 private:
  std::size_t n0_ = 0;
  std::size_t n1_ = 0;
  RealBuffer data_;
};

// Elementwise helpers used across modules.
double dot(const Field& a, const Field& b);
double norm2(const Field& a);
double max_abs(const Field& a);
bool all_finite(const Field& a);
/// y += alpha * x
void axpy(double alpha, const Field& x, Field& y);
Field operator+(const Field& a, const Field& b);
Field operator-(const Field& a, const Field& b);
Field operator*(double s, const Field& a);

}  // namespace pat
