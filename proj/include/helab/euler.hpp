#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "helab/error.hpp"
#include "helab/field.hpp"
#include "helab/functionals.hpp"

namespace helab {

/// Galerkin truncation to the cube |k_i| <= (N-1)/3. Products of retained
/// modes alias only onto discarded modes, so the truncated system conserves
/// energy and helicity exactly in continuous time.
int galerkin_cutoff(const Grid3& grid) noexcept;
/// One flag per stored mode; the mean is not retained.
std::vector<std::uint8_t> galerkin_mask(const Grid3& grid);

struct SolverState {
  Spectrum velocity;  ///< solenoidal, mean-free, masked
  double t = 0.0;
  double dt = 0.0;
  long step = 0;
};

/// Raised on NaN or overflow; carries the last finite state.
class BlowUpError : public NumericalError {
 public:
  BlowUpError(const std::string& what, std::shared_ptr<const SolverState> last_good)
      : NumericalError(ErrorCode::blow_up, what), last_good_(std::move(last_good)) {}
  const std::shared_ptr<const SolverState>& last_good() const noexcept { return last_good_; }

 private:
  std::shared_ptr<const SolverState> last_good_;
};

class EulerSolver {
 public:
  explicit EulerSolver(const Grid3& grid);

  const Grid3& grid() const noexcept { return grid_; }
  const std::vector<std::uint8_t>& mask() const noexcept { return mask_; }

  /// -P[omega x u] on the retained modes.
  Spectrum rhs(const Spectrum& velocity) const;
  /// Classical four-stage Runge-Kutta step of size state.dt.
  SolverState step_rk4(const SolverState& state) const;
  /// Zeroes discarded modes, the mean and the divergent part.
  Spectrum project_retained(const Spectrum& velocity) const;
  /// Largest coefficient magnitude outside the retained cube, relative to the largest inside.
  double truncation_residual(const Spectrum& velocity) const;

 private:
  Grid3 grid_;
  std::vector<std::uint8_t> mask_;
};

struct EvolveConfig {
  double final_time = 1.0;
  double dt = 1e-3;
  std::vector<double> deltas;
  std::vector<ConjugatePair> pairs;
  long sample_every = 1;
};

struct TrajectorySample {
  double t;
  double energy;
  double helicity;
  std::vector<DeltaDiagnostics> per_delta;
};

struct Trajectory {
  EvolveConfig config;
  int n = 0;
  std::vector<TrajectorySample> samples;
  std::shared_ptr<const SolverState> final_state;
};

/// Integrates from u0 over [0, final_time] with round(final_time/dt) steps,
/// sampling at step 0, every sample_every steps and at the end. u0 must be
/// solenoidal, mean-free and band-limited under the mask, with
/// dt max|u| / h <= 0.5.
Trajectory evolve(const PeriodicField& u0, const EvolveConfig& config);

/// Column names: t, E, H, then per delta H_delta(d), flux(d) and
/// chain_rhs(d;p:q) per pair.
std::vector<std::string> trajectory_columns(const EvolveConfig& config);
std::vector<std::vector<double>> trajectory_rows(const Trajectory& trajectory);

struct FluxCheck {
  double relative_mismatch;  ///< max |dH/dt - flux| / max |flux|
  double absolute_mismatch;
  double max_flux;
};

/// Second-order three-point differences of H_delta on interior samples
/// compared with the sampled flux. Needs at least three samples.
FluxCheck flux_identity_check(const Trajectory& trajectory, std::size_t delta_index);

struct ChainIntegralCheck {
  double worst_margin;  ///< max over samples of |H_delta(t) - H_delta(0)| - int_0^t rhs
  double max_change;
  double max_integral;
};

/// Trapezoid integral of the chain bound against the change of H_delta.
ChainIntegralCheck chain_integral_check(const Trajectory& trajectory, std::size_t delta_index, std::size_t pair_index);

}  // namespace helab
