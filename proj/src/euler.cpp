#include "helab/euler.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include "helab/fft.hpp"
#include "helab/mollifier.hpp"
#include "helab/spectral_ops.hpp"

namespace helab {
namespace {

void axpy(Spectrum& y, double a, const Spectrum& x) {
  auto yc = y.coefficients();
  auto xc = x.coefficients();
  for (std::size_t i = 0; i < yc.size(); ++i) yc[i] += a * xc[i];
}

bool all_finite(const Spectrum& s) {
  for (const Complex& c : s.coefficients()) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
  }
  return true;
}

std::string shortest(double value) {
  if (std::isinf(value)) return "inf";
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, result.ptr);
}

}  // namespace

int galerkin_cutoff(const Grid3& grid) noexcept { return (grid.n() - 1) / 3; }

std::vector<std::uint8_t> galerkin_mask(const Grid3& grid) {
  const int kmax = galerkin_cutoff(grid);
  std::vector<std::uint8_t> mask(grid.modes(), 0);
  for_each_mode(grid, [&](const Mode& m) {
    const bool inside = std::abs(m.kx) <= kmax && std::abs(m.ky) <= kmax && std::abs(m.kz) <= kmax;
    mask[m.index] = inside && m.k2() != 0;
  });
  return mask;
}

EulerSolver::EulerSolver(const Grid3& grid) : grid_(grid), mask_(galerkin_mask(grid)) {}

Spectrum EulerSolver::project_retained(const Spectrum& velocity) const {
  Spectrum out = velocity;
  for (int c = 0; c < out.components(); ++c) {
    auto coeffs = out.component(c);
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
      if (!mask_[i]) coeffs[i] = 0.0;
    }
  }
  return leray_project(out);
}

double EulerSolver::truncation_residual(const Spectrum& velocity) const {
  double inside = 0.0, outside = 0.0;
  for (int c = 0; c < velocity.components(); ++c) {
    auto coeffs = velocity.component(c);
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
      double& slot = mask_[i] ? inside : outside;
      slot = std::max(slot, std::abs(coeffs[i]));
    }
  }
  if (inside == 0.0) return outside == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return outside / inside;
}

Spectrum EulerSolver::rhs(const Spectrum& velocity) const {
  if (velocity.rank() != Rank::vector3 || !(velocity.grid() == grid_)) {
    throw Error(ErrorCode::rank_mismatch, "solver state must be a vector spectrum on the solver grid");
  }
  const int n = grid_.n();
  const std::size_t points = grid_.points();
  const Spectrum vorticity = curl(velocity);
  std::vector<double> u(3 * points), w(3 * points);
  for (int c = 0; c < 3; ++c) {
    fft::inverse(n, velocity.component(c).data(), u.data() + c * points);
    fft::inverse(n, vorticity.component(c).data(), w.data() + c * points);
  }
  std::vector<double> cross(3 * points);
  const double* ux = u.data();
  const double* uy = ux + points;
  const double* uz = uy + points;
  const double* wx = w.data();
  const double* wy = wx + points;
  const double* wz = wy + points;
  bool finite = true;
  for (std::size_t i = 0; i < points; ++i) {
    const double cx = wy[i] * uz[i] - wz[i] * uy[i];
    const double cy = wz[i] * ux[i] - wx[i] * uz[i];
    const double cz = wx[i] * uy[i] - wy[i] * ux[i];
    cross[i] = cx;
    cross[points + i] = cy;
    cross[2 * points + i] = cz;
    finite = finite && std::isfinite(cx) && std::isfinite(cy) && std::isfinite(cz);
  }
  if (!finite) throw NumericalError(ErrorCode::blow_up, "non-finite nonlinear term");
  Spectrum product(grid_, Rank::vector3);
  for (int c = 0; c < 3; ++c) fft::forward(n, cross.data() + c * points, product.component(c).data());
  Spectrum out = project_retained(product);
  for (Complex& v : out.coefficients()) v = -v;
  return out;
}

SolverState EulerSolver::step_rk4(const SolverState& state) const {
  const double dt = state.dt;
  const Spectrum& u = state.velocity;
  const Spectrum k1 = rhs(u);
  Spectrum stage = u;
  axpy(stage, 0.5 * dt, k1);
  const Spectrum k2 = rhs(stage);
  stage = u;
  axpy(stage, 0.5 * dt, k2);
  const Spectrum k3 = rhs(stage);
  stage = u;
  axpy(stage, dt, k3);
  const Spectrum k4 = rhs(stage);

  SolverState next{u, 0.0, dt, state.step + 1};
  axpy(next.velocity, dt / 6.0, k1);
  axpy(next.velocity, dt / 3.0, k2);
  axpy(next.velocity, dt / 3.0, k3);
  axpy(next.velocity, dt / 6.0, k4);
  if (!all_finite(next.velocity)) throw NumericalError(ErrorCode::blow_up, "non-finite velocity after step");
  next.t = static_cast<double>(next.step) * dt;
  return next;
}

Trajectory evolve(const PeriodicField& u0, const EvolveConfig& config) {
  if (u0.rank() != Rank::vector3) throw Error(ErrorCode::unsupported_rank, "evolve needs a vector field");
  const Grid3& grid = u0.grid();
  if (!(config.dt > 0.0) || !(config.final_time > 0.0)) {
    throw Error(ErrorCode::precondition, "dt and final time must be positive");
  }
  const long steps = std::lround(config.final_time / config.dt);
  if (steps < 1 || std::abs(steps * config.dt - config.final_time) > 1e-9 * config.final_time) {
    throw Error(ErrorCode::precondition, "final time must be an integer multiple of dt");
  }
  if (config.sample_every < 1) throw Error(ErrorCode::precondition, "sample_every must be >= 1");
  for (const auto& pair : config.pairs) check_conjugate_pair(pair);
  for (double delta : config.deltas) (void)Mollifier(grid, delta);

  const EulerSolver solver(grid);
  if (!is_solenoidal(u0)) throw Error(ErrorCode::precondition, "initial velocity is not divergence-free");
  if (solver.truncation_residual(u0.spectrum()) > 1e-10) {
    throw Error(ErrorCode::precondition, "initial velocity is not mean-free and band-limited under the 2/3 mask");
  }
  const auto speed = pointwise_magnitude(u0);
  const double umax = speed.empty() ? 0.0 : *std::max_element(speed.begin(), speed.end());
  const double cfl = config.dt * umax / grid.spacing();
  if (cfl > 0.5) throw Error(ErrorCode::cfl_violation, "CFL number " + shortest(cfl) + " exceeds 0.5");

  Trajectory traj;
  traj.config = config;
  traj.n = grid.n();
  auto sample = [&](const SolverState& s) {
    const PeriodicField u(s.velocity);
    TrajectorySample out{s.t, energy(u), helicity(u), {}};
    for (double delta : config.deltas) out.per_delta.push_back(delta_diagnostics(u, delta, config.pairs));
    traj.samples.push_back(std::move(out));
  };

  auto state = std::make_shared<SolverState>(SolverState{solver.project_retained(u0.spectrum()), 0.0, config.dt, 0});
  sample(*state);
  while (state->step < steps) {
    std::shared_ptr<SolverState> next;
    try {
      next = std::make_shared<SolverState>(solver.step_rk4(*state));
    } catch (const NumericalError& e) {
      throw BlowUpError(std::string(e.what()) + " at step " + std::to_string(state->step + 1), state);
    }
    state = std::move(next);
    if (state->step % config.sample_every == 0 || state->step == steps) sample(*state);
  }
  traj.final_state = state;
  return traj;
}

std::vector<std::string> trajectory_columns(const EvolveConfig& config) {
  std::vector<std::string> cols = {"t", "E", "H"};
  for (double delta : config.deltas) {
    const std::string d = shortest(delta);
    cols.push_back("H_delta(" + d + ")");
    cols.push_back("flux(" + d + ")");
    for (const auto& pair : config.pairs) {
      cols.push_back("chain_rhs(" + d + ";" + shortest(pair.p) + ":" + shortest(pair.q) + ")");
    }
  }
  return cols;
}

std::vector<std::vector<double>> trajectory_rows(const Trajectory& trajectory) {
  std::vector<std::vector<double>> rows;
  for (const auto& s : trajectory.samples) {
    std::vector<double> row = {s.t, s.energy, s.helicity};
    for (const auto& d : s.per_delta) {
      row.push_back(d.helicity);
      row.push_back(d.flux);
      row.insert(row.end(), d.chain_rhs.begin(), d.chain_rhs.end());
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

FluxCheck flux_identity_check(const Trajectory& trajectory, std::size_t delta_index) {
  const auto& s = trajectory.samples;
  if (s.size() < 3) throw Error(ErrorCode::precondition, "flux identity check needs at least three samples");
  if (delta_index >= trajectory.config.deltas.size()) throw Error(ErrorCode::out_of_range, "delta index out of range");
  FluxCheck out{0.0, 0.0, 0.0};
  for (const auto& sample : s) out.max_flux = std::max(out.max_flux, std::abs(sample.per_delta[delta_index].flux));
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    const double h1 = s[i].t - s[i - 1].t;
    const double h2 = s[i + 1].t - s[i].t;
    const double f0 = s[i - 1].per_delta[delta_index].helicity;
    const double f1 = s[i].per_delta[delta_index].helicity;
    const double f2 = s[i + 1].per_delta[delta_index].helicity;
    const double derivative = -h2 / (h1 * (h1 + h2)) * f0 + (h2 - h1) / (h1 * h2) * f1 + h1 / (h2 * (h1 + h2)) * f2;
    out.absolute_mismatch = std::max(out.absolute_mismatch, std::abs(derivative - s[i].per_delta[delta_index].flux));
  }
  if (out.max_flux > 0.0) {
    out.relative_mismatch = out.absolute_mismatch / out.max_flux;
  } else {
    out.relative_mismatch = out.absolute_mismatch == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return out;
}

ChainIntegralCheck chain_integral_check(const Trajectory& trajectory, std::size_t delta_index, std::size_t pair_index) {
  const auto& s = trajectory.samples;
  if (s.empty()) throw Error(ErrorCode::precondition, "empty trajectory");
  if (delta_index >= trajectory.config.deltas.size()) throw Error(ErrorCode::out_of_range, "delta index out of range");
  if (pair_index >= trajectory.config.pairs.size()) throw Error(ErrorCode::out_of_range, "pair index out of range");
  ChainIntegralCheck out{-std::numeric_limits<double>::infinity(), 0.0, 0.0};
  const double h0 = s.front().per_delta[delta_index].helicity;
  double integral = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i > 0) {
      integral += 0.5 * (s[i].t - s[i - 1].t) *
                  (s[i].per_delta[delta_index].chain_rhs[pair_index] + s[i - 1].per_delta[delta_index].chain_rhs[pair_index]);
    }
    const double change = std::abs(s[i].per_delta[delta_index].helicity - h0);
    out.worst_margin = std::max(out.worst_margin, change - integral);
    out.max_change = std::max(out.max_change, change);
    out.max_integral = std::max(out.max_integral, integral);
  }
  return out;
}

}  // namespace helab
