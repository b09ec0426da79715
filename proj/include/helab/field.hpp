#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "helab/grid.hpp"

namespace helab {

using Complex = std::complex<double>;

enum class Rank { scalar, vector3, tensor3x3 };

constexpr int component_count(Rank rank) noexcept {
  switch (rank) {
    case Rank::scalar: return 1;
    case Rank::vector3: return 3;
    case Rank::tensor3x3: return 9;
  }
  return 0;
}

std::string_view rank_name(Rank rank) noexcept;
Rank parse_rank(std::string_view name);

/// Tensor components are stored row-major: T_ij at 3*i + j.
constexpr int tensor_component(int i, int j) noexcept { return 3 * i + j; }

/// Fourier coefficients c_k of f(x) = sum_k c_k exp(i k.x), half layout
/// (see Grid3), one block per component.
class Spectrum {
 public:
  Spectrum(const Grid3& grid, Rank rank);

  const Grid3& grid() const noexcept { return grid_; }
  Rank rank() const noexcept { return rank_; }
  int components() const noexcept { return component_count(rank_); }

  std::span<Complex> component(int c) noexcept {
    return {data_.data() + static_cast<std::size_t>(c) * grid_.modes(), grid_.modes()};
  }
  std::span<const Complex> component(int c) const noexcept {
    return {data_.data() + static_cast<std::size_t>(c) * grid_.modes(), grid_.modes()};
  }
  std::span<Complex> coefficients() noexcept { return data_; }
  std::span<const Complex> coefficients() const noexcept { return data_; }

 private:
  Grid3 grid_;
  Rank rank_;
  std::vector<Complex> data_;
};

/// Real samples of a scalar, vector or tensor field on the periodic grid.
///
/// Value semantics. The spectral coefficients are computed lazily and cached;
/// copies share the (immutable) cache, and any mutable access drops it.
class PeriodicField {
 public:
  PeriodicField(const Grid3& grid, Rank rank);
  /// Throws if the sample count is wrong or any sample is not finite.
  PeriodicField(const Grid3& grid, Rank rank, std::vector<double> values);
  /// Inverse transform; the spectrum becomes the cache.
  explicit PeriodicField(Spectrum spectrum);

  const Grid3& grid() const noexcept { return grid_; }
  Rank rank() const noexcept { return rank_; }
  int components() const noexcept { return component_count(rank_); }

  std::span<const double> values() const noexcept { return values_; }
  std::span<const double> component(int c) const noexcept {
    return {values_.data() + static_cast<std::size_t>(c) * grid_.points(), grid_.points()};
  }
  std::span<double> mutable_values();
  std::span<double> mutable_component(int c);

  double at(int c, int i, int j, int k) const noexcept {
    return values_[static_cast<std::size_t>(c) * grid_.points() + grid_.index(i, j, k)];
  }

  /// Computed on first use; thread-safe.
  const Spectrum& spectrum() const;
  bool has_cached_spectrum() const noexcept;

  PeriodicField& operator+=(const PeriodicField& other);
  PeriodicField& operator-=(const PeriodicField& other);
  PeriodicField& operator*=(double factor);

 private:
  struct Cache {
    std::once_flag once;
    std::optional<Spectrum> spectrum;
  };

  void check_compatible(const PeriodicField& other) const;

  Grid3 grid_;
  Rank rank_;
  std::vector<double> values_;
  std::shared_ptr<Cache> cache_;
};

PeriodicField operator+(PeriodicField a, const PeriodicField& b);
PeriodicField operator-(PeriodicField a, const PeriodicField& b);
PeriodicField operator*(double factor, PeriodicField a);

/// Pointwise magnitude: |f| for scalars, Euclidean norm for vectors,
/// Frobenius norm for tensors.
std::vector<double> pointwise_magnitude(const PeriodicField& f);

/// Discrete integral h^3 * sum f over the grid, per component.
double integral(std::span<const double> samples, const Grid3& grid);

/// Component means (the zero Fourier mode).
std::vector<double> component_means(const PeriodicField& f);

}  // namespace helab
