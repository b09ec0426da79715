#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "helab/field.hpp"

namespace helab {

/// Rough lacunary field
///   f = sum_{j<J} 2^{-j*exponent} sum_m a_{j,m} cos(k_{j,m}.x + phi_{j,m}),
/// with |k_{j,m}| in [2^j, 2^{j+1}) and min(8, shell population) modes per shell.
struct LacunarySpec {
  double exponent = 0.5;  ///< target Holder/Sobolev exponent, in (0,1)
  int octaves = 1;        ///< J, number of dyadic shells
  std::uint64_t seed = 0;
  Rank rank = Rank::scalar;
  bool divergence_free = false;  ///< amplitude vectors orthogonal to k (vector rank only)
  double normalization = 1.0;
};

void validate(const LacunarySpec& spec, const Grid3& grid);

/// Arnold-Beltrami-Childress flow; curl u = u.
PeriodicField abc_flow(double a, double b, double c, const Grid3& grid);

/// u = (sin x cos y cos z, -cos x sin y cos z, 0).
PeriodicField taylor_green(const Grid3& grid);

PeriodicField lacunary_field(const LacunarySpec& spec, const Grid3& grid);

/// Divergence-free, mean-free random-phase vector field occupying every mode
/// of the shells j < octaves, with per-mode amplitude
/// 2^{-j*alpha} / sqrt(shell population). Each shell carries the same
/// W^{alpha,2} spectral seminorm up to the spread of |k| inside the shell.
/// q_target is recorded for validation only; L^q integrability is not tuned.
PeriodicField prescribed_sobolev_field(double alpha, double q_target, int octaves, const Grid3& grid,
                                       std::uint64_t seed);

/// Smooth random field on modes 0 < |k| <= kmax with amplitude 1/(1+|k|)^2,
/// rescaled to unit rms. Solenoidal fields are mean-free.
PeriodicField random_band_limited(const Grid3& grid, std::uint64_t seed, int kmax, Rank rank, bool solenoidal);

/// Integer wavevectors k with 2^shell <= |k| < 2^{shell+1}, one per +/-k pair,
/// in a fixed order.
std::vector<std::array<int, 3>> shell_population(int shell);

/// Counter-based generator: a pure function of (seed, a, b, c).
double counter_uniform(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c);

/// Adds a*exp(i k.x) + conj(a)*exp(-i k.x) to one component.
void add_real_mode(Spectrum& s, int component, int kx, int ky, int kz, Complex amplitude);

}  // namespace helab
