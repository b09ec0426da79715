#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "helab/dealias.hpp"
#include "helab/field.hpp"

namespace helab {

/// Radial bump rho(x) ~ exp(-1/(1-|x|^2)) on |x| < 1, scaled to radius delta,
/// sampled on the grid and renormalized to unit discrete mass. Convolution
/// multiplies by the transform of the sampled kernel, so constants are
/// reproduced exactly and derivatives commute with mollification.
class Mollifier {
 public:
  /// delta in [4h, pi/2].
  Mollifier(const Grid3& grid, double delta);

  const Grid3& grid() const noexcept { return grid_; }
  double radius() const noexcept { return delta_; }
  /// Kernel samples rho_delta on the grid (min-image placement around 0).
  const std::vector<double>& kernel() const noexcept { return kernel_; }
  /// Real transform rho_hat(k), one value per stored mode.
  const std::vector<double>& transform() const noexcept { return transform_; }

  Spectrum apply(const Spectrum& f) const;
  PeriodicField apply(const PeriodicField& f) const;

 private:
  Grid3 grid_;
  double delta_;
  std::vector<double> kernel_;
  std::vector<double> transform_;
};

PeriodicField mollify(const PeriodicField& f, double delta);

/// f_delta * g_delta - (f * g)_delta with dealiased products. Scalar product:
/// scalar*scalar or vector.vector; tensor product: vector (x) vector.
PeriodicField commutator(const PeriodicField& f, const PeriodicField& g, double delta, ProductKind product);

/// R_delta = u_delta (x) u_delta - (u (x) u)_delta.
PeriodicField reynolds_stress(const PeriodicField& u, double delta);

enum class SweepQuantity { gradient, gradient_curl, commutator_scalar, commutator_tensor };

std::string_view sweep_quantity_name(SweepQuantity q) noexcept;
SweepQuantity parse_sweep_quantity(std::string_view name);

struct SweepPoint {
  double delta;
  double value;
};

struct RateSweep {
  SweepQuantity quantity;
  double norm_p;  ///< infinity allowed
  std::vector<SweepPoint> points;
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;
  std::optional<double> theoretical_exponent;
};

/// Dyadic radii 2^m h for 2^m in [first_cells, last_cells].
std::vector<double> dyadic_deltas(const Grid3& grid, int first_cells, int last_cells);

/// Evaluates the quantity (grad f_delta, grad curl f_delta, or the commutator
/// of f and g) at each delta, takes its Lp norm and fits the log-log slope.
/// Needs at least four dyadic radii in [4h, N h / 4].
RateSweep rate_sweep(SweepQuantity quantity, const PeriodicField& f, const PeriodicField* g,
                     const std::vector<double>& deltas, double norm_p,
                     std::optional<double> theoretical_exponent = std::nullopt);

}  // namespace helab
