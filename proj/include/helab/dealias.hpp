#pragma once

#include <span>
#include <vector>

#include "helab/field.hpp"

namespace helab {

/// Pointwise products by 3/2 zero-padding: coefficients are padded to a
/// 3n/2 grid, multiplied there, and truncated back to the n grid (Nyquist
/// dropped). Retained modes are alias-free.
class Dealiaser {
 public:
  explicit Dealiaser(const Grid3& grid);

  const Grid3& grid() const noexcept { return grid_; }
  int padded_n() const noexcept { return padded_n_; }
  std::size_t padded_points() const noexcept;

  /// Samples of the interpolant of one coefficient block on the padded grid.
  std::vector<double> to_padded(std::span<const Complex> coefficients) const;
  /// Forward transform on the padded grid, truncated to the n grid.
  void from_padded(std::span<const double> samples, std::span<Complex> coefficients) const;

 private:
  Grid3 grid_;
  int padded_n_;
};

/// Dealiased product of two fields: scalar*scalar, scalar*vector,
/// vector.vector (dot) or vector (x) vector (tensor).
enum class ProductKind { scalar, tensor };
Spectrum dealiased_product(const Spectrum& a, const Spectrum& b, ProductKind kind);
PeriodicField dealiased_product(const PeriodicField& a, const PeriodicField& b, ProductKind kind);

}  // namespace helab
