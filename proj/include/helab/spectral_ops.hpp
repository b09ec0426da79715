#pragma once

#include "helab/field.hpp"

namespace helab {

// Differential and nonlocal operators, applied as exact Fourier multipliers
// on the trigonometric interpolant. Odd derivatives drop the Nyquist mode.

/// Raises the rank by one: scalar -> vector, vector -> tensor with
/// T_ij = d_j v_i. Tensor input is rejected.
PeriodicField gradient(const PeriodicField& f);
Spectrum gradient(const Spectrum& f);

PeriodicField curl(const PeriodicField& v);
Spectrum curl(const Spectrum& v);

/// Vector -> scalar; tensor -> vector with (div T)_i = d_j T_ij.
PeriodicField divergence(const PeriodicField& v);
Spectrum divergence(const Spectrum& v);

/// L2-orthogonal projection onto divergence-free fields. The mean is kept.
PeriodicField leray_project(const PeriodicField& v);
Spectrum leray_project(const Spectrum& v);

PeriodicField laplacian(const PeriodicField& f);

enum class MeanMode {
  annihilate,  ///< zero mode silently mapped to 0
  strict,      ///< s < 0 with a nonzero mean is an error
};

/// (-Delta)^s with multiplier |k|^{2s}, s in [-1, 2]. The zero mode is kept
/// for s = 0 and mapped to 0 otherwise.
PeriodicField fractional_laplacian(const PeriodicField& f, double s, MeanMode mode = MeanMode::annihilate);
Spectrum fractional_laplacian(const Spectrum& f, double s, MeanMode mode = MeanMode::annihilate);

/// Velocity with curl u = omega, div u = 0 and zero mean. omega must be
/// mean-free and divergence-free to 1e-10 relative.
PeriodicField biot_savart(const PeriodicField& omega);

/// max |div v| / max |grad v|; 0 for a constant field.
double divergence_residual(const PeriodicField& v);
bool is_solenoidal(const PeriodicField& v, double tolerance = 1e-10);

/// Squared discrete L2 norm computed from the coefficients (Parseval).
double spectral_l2_squared(const Spectrum& f);

/// Discrete L2 inner product h^3 sum f.g over all components.
double inner_product(const PeriodicField& a, const PeriodicField& b);

}  // namespace helab
