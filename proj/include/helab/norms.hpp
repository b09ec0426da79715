#pragma once

#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "helab/field.hpp"

namespace helab {

inline constexpr double infinity = std::numeric_limits<double>::infinity();

enum class SeminormKind { holder, lp, gagliardo, gagliardo_local, besov, spectral_sobolev };

std::string_view seminorm_kind_name(SeminormKind kind) noexcept;

/// Value of a discrete (semi)norm estimator together with what it measured.
/// The estimators are not certified norms: compare exponents and ratios,
/// never absolute constants.
struct SeminormValue {
  SeminormKind kind;
  double exponent = 0.0;  ///< theta or alpha; 0 for Lp
  double p = 2.0;         ///< integrability; infinity allowed
  std::optional<double> delta;
  double value = 0.0;
  int n = 0;
};

/// (h^3 sum |f|^p)^{1/p}; p = infinity gives the grid maximum (a lower bound
/// of the continuum supremum).
double lp_norm(const PeriodicField& f, double p);
SeminormValue lp_seminorm(const PeriodicField& f, double p);

/// max over grid pairs at periodic distance <= cutoff of |f(x)-f(y)|/|x-y|^theta.
/// cutoff in (h, pi].
SeminormValue holder_seminorm(const PeriodicField& f, double theta, double cutoff_radius);

struct GagliardoOptions {
  /// Pairs closer than min_lag_cells * h are dropped (kernel bias at the
  /// smallest lags). Must be >= 1.
  double min_lag_cells = 2.0;
};

/// p-th root of h^6 sum over pairs min_lag <= |x-y| <= delta of
/// |f(x)-f(y)|^p / |x-y|^{alpha p + 3}. alpha in (0,1), p in [1, inf),
/// delta <= pi/2 with at least two cells of reach. p = infinity is rerouted
/// to holder_seminorm. p = 2 uses an exact spectral evaluation.
SeminormValue gagliardo_seminorm_local(const PeriodicField& f, double alpha, double p, double delta,
                                       GagliardoOptions options = {});

/// Full torus double integral; O(N^6), restricted to N <= 16.
SeminormValue gagliardo_seminorm(const PeriodicField& f, double alpha, double p, GagliardoOptions options = {});

/// max over nonzero grid shifts y with |y| <= max_shift of ||f(.+y)-f||_p / |y|^theta.
/// p = 2 uses the autocorrelation; other p scan all shifts.
SeminormValue besov_seminorm(const PeriodicField& f, double theta, double p,
                             double max_shift = std::numeric_limits<double>::infinity());

/// ||(-Delta)^{alpha/2} f||_2, alpha in (-1, 1).
SeminormValue spectral_sobolev_seminorm(const PeriodicField& f, double alpha);

struct ExponentFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  ///< rms of log-space residuals
  std::vector<double> lags;
  std::vector<double> moduli;
};

/// Least-squares slope of log(modulus of continuity) against log(lag) for
/// dyadic axis lags 2h, 4h, ..., 32h (lags beyond N/2 cells are skipped).
/// p = infinity uses the sup modulus, finite p the Lp modulus.
ExponentFit exponent_estimate(const PeriodicField& f, double p);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;
};
/// Plain least squares y = slope*x + intercept; residual is the rms misfit.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace helab
