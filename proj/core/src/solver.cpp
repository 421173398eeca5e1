#include "pat/solver.hpp"

#include <sstream>

namespace pat {

PressureSnapshot::PressureSnapshot(const Field& p, const ComplexBuffer& spectrum,
                                   const SpectralOperators& ops, SplitFields& gradient_buffers,
                                   ComplexBuffer& scratch)
    : p_(p), spectrum_(spectrum), ops_(ops), grad_(gradient_buffers), scratch_(scratch) {}

const Field& PressureSnapshot::gradient(int axis) {
  const auto a = static_cast<std::size_t>(axis);
  if (!ready_.at(a)) {
    ops_.apply(spectrum_, ops_.derivative_multiplier(axis, Shift::kNone), grad_[a], scratch_);
    ready_[a] = true;
  }
  return grad_[a];
}

namespace {
std::string stability_message(int step, double cfl) {
  std::ostringstream os;
  os << "wave solver went unstable at step " << step << " (CFL c_ref*dt/dx = " << cfl << ")";
  return os.str();
}
}  // namespace

StabilityError::StabilityError(int step, double cfl)
    : std::runtime_error(stability_message(step, cfl)), step_(step), cfl_(cfl) {}

namespace {
Medium validated(Medium m, const Grid& grid) {
  validate_medium(m, grid);
  return m;
}
}  // namespace

WaveSolver::WaveSolver(const Grid& grid, const Medium& medium)
    : grid_(grid), medium_(validated(medium, grid)), ops_(grid, medium_.c_ref) {
  pml_ = make_pml(grid_, medium_.c_ref);

  const std::size_t n0 = ops_.n0();
  const std::size_t n1 = ops_.n1();
  const double dt = grid_.dt();
  for (int axis = 0; axis < kDim; ++axis) {
    Field f(n0, n1);
    for (std::size_t i = 0; i < n0; ++i) {
      for (std::size_t j = 0; j < n1; ++j) {
        const std::size_t ni = axis == 0 ? (i + 1) % n0 : i;
        const std::size_t nj = axis == 1 ? (j + 1) % n1 : j;
        const double rho_s = 0.5 * (medium_.rho0(i, j) + medium_.rho0(ni, nj));
        f(i, j) = dt / rho_s;
      }
    }
    dt_over_rho_staggered_[static_cast<std::size_t>(axis)] = std::move(f);
  }
  dt_rho_ = dt * medium_.rho0;
  c2_ = Field(n0, n1);
  for (std::size_t i = 0; i < c2_.size(); ++i) c2_[i] = medium_.c[i] * medium_.c[i];

  p_hat_ = ops_.make_spectrum();
  work_hat_ = ops_.make_spectrum();
  scratch_hat_ = ops_.make_spectrum();
  deriv_ = Field(n0, n1);
  for (auto& s : source_) s = Field(n0, n1);
  for (auto& g : grad_) g = Field(n0, n1);
}

double WaveSolver::cfl() const noexcept { return medium_.c_ref * grid_.dt() / grid_.dx(); }

WaveState WaveSolver::zero_state() const {
  WaveState s;
  for (auto& f : s.u) f = grid_.full_field();
  for (auto& f : s.rho) f = grid_.full_field();
  s.p = grid_.full_field();
  return s;
}

void WaveSolver::step(WaveState& state, const SourceSchedule& schedule, int t) {
  ops_.transform(state.p, p_hat_);
  advance(state, schedule, t);
}

void WaveSolver::advance(WaveState& state, const SourceSchedule& schedule, int t) {
  const std::size_t n0 = ops_.n0();
  const std::size_t n1 = ops_.n1();
  const double dt = grid_.dt();

  // Velocity: p_hat_ holds the spectrum of p(t).
  const bool has_force = schedule.force && schedule.force(t, source_);
  for (int axis = 0; axis < kDim; ++axis) {
    const auto a = static_cast<std::size_t>(axis);
    ops_.apply(p_hat_, ops_.derivative_multiplier(axis, Shift::kPlusHalf), deriv_, scratch_hat_);
    const auto& lam = pml_.axes[a].staggered;
    Field& u = state.u[a];
    const Field& coef = dt_over_rho_staggered_[a];
    for (std::size_t i = 0; i < n0; ++i) {
      for (std::size_t j = 0; j < n1; ++j) {
        const double l = axis == 0 ? lam[i] : lam[j];
        const std::size_t k = i * n1 + j;
        u[k] = l * (l * u[k] - coef[k] * deriv_[k]);
      }
    }
    if (has_force) axpy(dt, source_[a], u);
  }

  // Split density.
  const bool has_mass = schedule.mass && schedule.mass(t, source_);
  for (int axis = 0; axis < kDim; ++axis) {
    const auto a = static_cast<std::size_t>(axis);
    ops_.transform(state.u[a], work_hat_);
    ops_.apply(work_hat_, ops_.derivative_multiplier(axis, Shift::kMinusHalf), deriv_, scratch_hat_);
    const auto& lam = pml_.axes[a].regular;
    Field& rho = state.rho[a];
    for (std::size_t i = 0; i < n0; ++i) {
      for (std::size_t j = 0; j < n1; ++j) {
        const double l = axis == 0 ? lam[i] : lam[j];
        const std::size_t k = i * n1 + j;
        rho[k] = l * (l * rho[k] - dt_rho_[k] * deriv_[k]);
      }
    }
    if (has_mass) axpy(dt, source_[a], rho);
  }

  // Pressure.
  Field& p = state.p;
  for (std::size_t k = 0; k < p.size(); ++k) {
    double sum = 0.0;
    for (const auto& rho : state.rho) sum += rho[k];
    p[k] = c2_[k] * sum;
  }
  if (!all_finite(p)) throw StabilityError(t, cfl());
  ops_.transform(p, p_hat_);
}

WaveState WaveSolver::run(const SourceSchedule& schedule, std::span<Probe* const> probes) {
  WaveState state = zero_state();
  std::fill(p_hat_.begin(), p_hat_.end(), std::complex<double>(0.0, 0.0));
  for (int t = -1; t <= grid_.nt() - 1; ++t) {
    advance(state, schedule, t);
    if (!probes.empty()) {
      PressureSnapshot snap(state.p, p_hat_, ops_, grad_, scratch_hat_);
      for (Probe* probe : probes) probe->record(t + 1, snap);
    }
  }
  return state;
}

void step(WaveState& state, const SourceSchedule& schedule, int t, const Grid& grid,
          const Medium& medium) {
  WaveSolver solver(grid, medium);
  solver.step(state, schedule, t);
}

}  // namespace pat
