#pragma once

#include <array>
#include <functional>
#include <span>
#include <stdexcept>

#include "pat/field.hpp"
#include "pat/grid.hpp"
#include "pat/spectral.hpp"

namespace pat {

using SplitFields = std::array<Field, kDim>;

/// Fields of the first-order system. After a step from t, u holds
/// u(t + 1/2) staggered half a cell along its own axis, and rho/p hold
/// time t + 1.
struct WaveState {
  SplitFields u;
  SplitFields rho;
  Field p;
};

/// Source terms sampled by the time loop. A callback returns false when the
/// source is inactive at that step, in which case `out` is left untouched.
struct SourceSchedule {
  /// Split mass source S_m^zeta at time t + 1/2.
  std::function<bool(int t, SplitFields& out)> mass;
  /// Force source S_f^zeta at time t, on the staggered velocity positions.
  std::function<bool(int t, SplitFields& out)> force;
};

class SpectralOperators;

/// Pressure field at an integer time plus lazily evaluated collocated
/// gradients, handed to probes.
class PressureSnapshot {
 public:
  PressureSnapshot(const Field& p, const ComplexBuffer& spectrum, const SpectralOperators& ops,
                   SplitFields& gradient_buffers, ComplexBuffer& scratch);

  const Field& pressure() const noexcept { return p_; }
  /// Unshifted spectral derivative of p along axis, computed on first use.
  const Field& gradient(int axis);

 private:
  const Field& p_;
  const ComplexBuffer& spectrum_;
  const SpectralOperators& ops_;
  SplitFields& grad_;
  ComplexBuffer& scratch_;
  std::array<bool, kDim> ready_{};
};

class Probe {
 public:
  virtual ~Probe() = default;
  /// Called once for every t in {0, ..., nt}.
  virtual void record(int t, PressureSnapshot& snapshot) = 0;
};

/// Raised when a field turns non-finite.
class StabilityError : public std::runtime_error {
 public:
  StabilityError(int step, double cfl);
  int step() const noexcept { return step_; }
  double cfl() const noexcept { return cfl_; }

 private:
  int step_;
  double cfl_;
};

/// Time stepper for the split-density first-order acoustic system.
///
/// Every step evaluates
///   u   <- L_s [L_s u - dt / rho0 * d+ p] + dt S_f
///   rho <- L   [L rho - dt rho0 * d- u]   + dt S_m
///   p   <- c^2 sum(rho)
/// per axis, with d+ / d- the staggered spectral derivatives and L the PML
/// multipliers. A solver owns scratch buffers: one instance per thread.
class WaveSolver {
 public:
  WaveSolver(const Grid& grid, const Medium& medium);

  const Grid& grid() const noexcept { return grid_; }
  const Medium& medium() const noexcept { return medium_; }
  const SpectralOperators& ops() const noexcept { return ops_; }
  const PmlProfile& pml() const noexcept { return pml_; }
  double cfl() const noexcept;

  WaveState zero_state() const;

  /// Advances `state` from time t to t + 1.
  void step(WaveState& state, const SourceSchedule& schedule, int t);

  /// Runs t = -1, ..., nt - 1 from the zero state and calls every probe on
  /// p(t + 1). Returns the final state.
  WaveState run(const SourceSchedule& schedule, std::span<Probe* const> probes);

 private:
  void advance(WaveState& state, const SourceSchedule& schedule, int t);

  Grid grid_;
  Medium medium_;
  SpectralOperators ops_;
  PmlProfile pml_;
  SplitFields dt_over_rho_staggered_;
  Field dt_rho_;
  Field c2_;

  // scratch
  ComplexBuffer p_hat_;
  ComplexBuffer work_hat_;
  ComplexBuffer scratch_hat_;
  Field deriv_;
  SplitFields source_;
  SplitFields grad_;
};

/// Free-function form of a single step; builds a transient solver.
void step(WaveState& state, const SourceSchedule& schedule, int t, const Grid& grid,
          const Medium& medium);

}  // namespace pat
