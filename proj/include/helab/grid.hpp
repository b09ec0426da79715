#pragma once

#include <cstddef>
#include <numbers>

namespace helab {

/// Uniform n^3 sampling of the torus [0, 2pi)^3. Samples are stored x-fastest.
///
/// Spectral data uses the real-to-complex half layout: kz and ky run over all
/// n wavenumbers, kx over 0..n/2. Wavenumbers are symmetric about zero and the
/// Nyquist index n/2 is reported once, as +n/2.
class Grid3 {
 public:
  explicit Grid3(int n);

  int n() const noexcept { return n_; }
  static constexpr double length() noexcept { return 2.0 * std::numbers::pi; }
  double spacing() const noexcept { return length() / n_; }
  double cell_volume() const noexcept {
    const double h = spacing();
    return h * h * h;
  }
  std::size_t points() const noexcept {
    return static_cast<std::size_t>(n_) * n_ * n_;
  }
  int half_n() const noexcept { return n_ / 2 + 1; }
  std::size_t modes() const noexcept {
    return static_cast<std::size_t>(n_) * n_ * half_n();
  }

  std::size_t index(int i, int j, int k) const noexcept {
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(n_) * (j + static_cast<std::size_t>(n_) * k);
  }
  /// Index with periodic wrap of each coordinate.
  std::size_t wrapped_index(long i, long j, long k) const noexcept {
    auto wrap = [n = static_cast<long>(n_)](long v) { return static_cast<int>(((v % n) + n) % n); };
    return index(wrap(i), wrap(j), wrap(k));
  }

  int wavenumber(int axis_index) const noexcept {
    return axis_index <= n_ / 2 ? axis_index : axis_index - n_;
  }
  /// Axis index holding wavenumber k, for |k| <= n/2.
  int axis_index(int k) const noexcept { return k >= 0 ? k : k + n_; }
  bool is_nyquist(int k) const noexcept { return k == n_ / 2 || k == -n_ / 2; }
  /// Wavenumber used by odd derivatives: the Nyquist mode is dropped.
  int derivative_wavenumber(int k) const noexcept { return is_nyquist(k) ? 0 : k; }

  double coordinate(int i) const noexcept { return i * spacing(); }

  friend bool operator==(const Grid3&, const Grid3&) = default;

 private:
  int n_;
};

/// One stored entry of the half spectrum.
struct Mode {
  std::size_t index;
  int kx, ky, kz;
  /// Number of full-spectrum modes the entry stands for (1 or 2).
  double weight;

  long k2() const noexcept { return static_cast<long>(kx) * kx + static_cast<long>(ky) * ky + static_cast<long>(kz) * kz; }
};

template <class Fn>
void for_each_mode(const Grid3& grid, Fn&& fn) {
  const int n = grid.n();
  const int nh = grid.half_n();
  std::size_t idx = 0;
  for (int jz = 0; jz < n; ++jz) {
    const int kz = grid.wavenumber(jz);
    for (int jy = 0; jy < n; ++jy) {
      const int ky = grid.wavenumber(jy);
      for (int kx = 0; kx < nh; ++kx, ++idx) {
        const double weight = (kx == 0 || kx == n / 2) ? 1.0 : 2.0;
        fn(Mode{idx, kx, ky, kz, weight});
      }
    }
  }
}

}  // namespace helab
