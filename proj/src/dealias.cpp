#include "helab/dealias.hpp"

#include "helab/error.hpp"
#include "helab/fft.hpp"

namespace helab {
namespace {

// Calls fn(n_index, m_index) for every non-Nyquist mode of the n grid.
template <class Fn>
void for_each_retained(const Grid3& grid, int padded_n, Fn&& fn) {
  const int n = grid.n();
  const int mh = padded_n / 2 + 1;
  auto padded_axis = [padded_n](int k) { return k >= 0 ? k : k + padded_n; };
  for_each_mode(grid, [&](const Mode& m) {
    if (grid.is_nyquist(m.kx) || grid.is_nyquist(m.ky) || grid.is_nyquist(m.kz)) return;
    const std::size_t target = static_cast<std::size_t>(m.kx) +
                               static_cast<std::size_t>(mh) * (padded_axis(m.ky) + static_cast<std::size_t>(padded_n) * padded_axis(m.kz));
    fn(m.index, target);
  });
  (void)n;
}

}  // namespace

Dealiaser::Dealiaser(const Grid3& grid) : grid_(grid), padded_n_(3 * grid.n() / 2) {}

std::size_t Dealiaser::padded_points() const noexcept { return fft::real_size(padded_n_); }

std::vector<double> Dealiaser::to_padded(std::span<const Complex> coefficients) const {
  std::vector<Complex> padded(fft::half_size(padded_n_), Complex{});
  for_each_retained(grid_, padded_n_, [&](std::size_t from, std::size_t to) { padded[to] = coefficients[from]; });
  std::vector<double> samples(padded_points());
  fft::inverse(padded_n_, padded.data(), samples.data());
  return samples;
}

void Dealiaser::from_padded(std::span<const double> samples, std::span<Complex> coefficients) const {
  std::vector<Complex> padded(fft::half_size(padded_n_));
  fft::forward(padded_n_, samples.data(), padded.data());
  std::fill(coefficients.begin(), coefficients.end(), Complex{});
  for_each_retained(grid_, padded_n_, [&](std::size_t to, std::size_t from) { coefficients[to] = padded[from]; });
}

Spectrum dealiased_product(const Spectrum& a, const Spectrum& b, ProductKind kind) {
  if (!(a.grid() == b.grid())) throw Error(ErrorCode::grid_mismatch, "product: grid mismatch");
  const Dealiaser d(a.grid());
  const std::size_t mp = d.padded_points();

  auto pad_all = [&](const Spectrum& s) {
    std::vector<std::vector<double>> out;
    for (int c = 0; c < s.components(); ++c) out.push_back(d.to_padded(s.component(c)));
    return out;
  };

  if (kind == ProductKind::tensor) {
    if (a.rank() != Rank::vector3 || b.rank() != Rank::vector3) {
      throw Error(ErrorCode::rank_mismatch, "tensor product needs two vector fields");
    }
    const auto pa = pad_all(a);
    const auto pb = pad_all(b);
    Spectrum out(a.grid(), Rank::tensor3x3);
    std::vector<double> prod(mp);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        for (std::size_t x = 0; x < mp; ++x) prod[x] = pa[i][x] * pb[j][x];
        d.from_padded(prod, out.component(tensor_component(i, j)));
      }
    }
    return out;
  }

  if (a.rank() == Rank::scalar || b.rank() == Rank::scalar) {
    const Spectrum& s = a.rank() == Rank::scalar ? a : b;
    const Spectrum& other = a.rank() == Rank::scalar ? b : a;
    const auto ps = d.to_padded(s.component(0));
    Spectrum out(a.grid(), other.rank());
    std::vector<double> prod(mp);
    for (int c = 0; c < other.components(); ++c) {
      const auto po = d.to_padded(other.component(c));
      for (std::size_t x = 0; x < mp; ++x) prod[x] = ps[x] * po[x];
      d.from_padded(prod, out.component(c));
    }
    return out;
  }

  if (a.rank() != b.rank()) throw Error(ErrorCode::rank_mismatch, "scalar product needs matching ranks");
  std::vector<double> sum(mp, 0.0);
  for (int c = 0; c < a.components(); ++c) {
    const auto pa = d.to_padded(a.component(c));
    const auto pb = d.to_padded(b.component(c));
    for (std::size_t x = 0; x < mp; ++x) sum[x] += pa[x] * pb[x];
  }
  Spectrum out(a.grid(), Rank::scalar);
  d.from_padded(sum, out.component(0));
  return out;
}

PeriodicField dealiased_product(const PeriodicField& a, const PeriodicField& b, ProductKind kind) {
  return PeriodicField(dealiased_product(a.spectrum(), b.spectrum(), kind));
}

}  // namespace helab
