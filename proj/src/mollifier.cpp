#include "helab/mollifier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "helab/error.hpp"
#include "helab/fft.hpp"
#include "helab/norms.hpp"
#include "helab/spectral_ops.hpp"

namespace helab {
namespace {

void check_product_ranks(const PeriodicField& f, const PeriodicField& g, ProductKind product) {
  if (!(f.grid() == g.grid())) throw Error(ErrorCode::grid_mismatch, "commutator: grid mismatch");
  if (product == ProductKind::tensor) {
    if (f.rank() != Rank::vector3 || g.rank() != Rank::vector3) {
      throw Error(ErrorCode::rank_mismatch, "commutator: tensor product needs two vector fields");
    }
  } else if (f.rank() != g.rank() || f.rank() == Rank::tensor3x3) {
    throw Error(ErrorCode::rank_mismatch, "commutator: scalar product needs two scalars or two vectors");
  }
}

// f_delta * g_delta - (fg)_delta given the product spectrum of f and g.
Spectrum commutator_spectrum(const Spectrum& f, const Spectrum& g, const Spectrum& product, const Mollifier& m,
                             ProductKind kind) {
  Spectrum out = dealiased_product(m.apply(f), m.apply(g), kind);
  const Spectrum smoothed = m.apply(product);
  auto o = out.coefficients();
  auto s = smoothed.coefficients();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] -= s[i];
  return out;
}

// ||grad s||_p with the Frobenius magnitude, one derivative component at a
// time so the full gradient is never stored.
double gradient_lp_norm(const Spectrum& s, double p) {
  const Grid3& grid = s.grid();
  const std::size_t points = grid.points();
  std::vector<double> magnitude2(points, 0.0);
  std::vector<Complex> coeffs(grid.modes());
  std::vector<double> samples(points);
  for (int c = 0; c < s.components(); ++c) {
    const auto src = s.component(c);
    for (int axis = 0; axis < 3; ++axis) {
      for_each_mode(grid, [&](const Mode& m) {
        const int k = axis == 0 ? m.kx : axis == 1 ? m.ky : m.kz;
        coeffs[m.index] = Complex(0.0, grid.derivative_wavenumber(k)) * src[m.index];
      });
      fft::inverse(grid.n(), coeffs.data(), samples.data());
      for (std::size_t i = 0; i < points; ++i) magnitude2[i] += samples[i] * samples[i];
    }
  }
  if (std::isinf(p)) return std::sqrt(*std::max_element(magnitude2.begin(), magnitude2.end()));
  double sum = 0.0;
  for (double m2 : magnitude2) sum += std::pow(m2, 0.5 * p);
  return std::pow(sum * grid.cell_volume(), 1.0 / p);
}

}  // namespace

Mollifier::Mollifier(const Grid3& grid, double delta) : grid_(grid), delta_(delta) {
  const double h = grid.spacing();
  if (!(delta >= 4.0 * h * (1.0 - 1e-12))) {
    throw Error(ErrorCode::under_resolved_kernel, "mollifier radius below 4h");
  }
  if (delta > std::numbers::pi / 2.0 * (1.0 + 1e-12)) {
    throw Error(ErrorCode::out_of_range, "mollifier radius above pi/2");
  }
  kernel_.assign(grid.points(), 0.0);
  const int reach = static_cast<int>(std::ceil(delta / h));
  double mass = 0.0;
  for (int dz = -reach; dz <= reach; ++dz) {
    for (int dy = -reach; dy <= reach; ++dy) {
      for (int dx = -reach; dx <= reach; ++dx) {
        const double r2 = (dx * dx + dy * dy + dz * dz) * h * h / (delta * delta);
        if (r2 >= 1.0) continue;
        const double value = std::exp(-1.0 / (1.0 - r2));
        kernel_[grid.wrapped_index(dx, dy, dz)] = value;
        mass += value;
      }
    }
  }
  const double scale = 1.0 / (mass * grid.cell_volume());
  for (double& v : kernel_) v *= scale;

  std::vector<Complex> coeffs(grid.modes());
  fft::forward(grid.n(), kernel_.data(), coeffs.data());
  const double volume = std::pow(Grid3::length(), 3);
  transform_.resize(coeffs.size());
  for (std::size_t i = 0; i < coeffs.size(); ++i) transform_[i] = volume * coeffs[i].real();
}

Spectrum Mollifier::apply(const Spectrum& f) const {
  if (!(f.grid() == grid_)) throw Error(ErrorCode::grid_mismatch, "mollify: grid mismatch");
  Spectrum out = f;
  for (int c = 0; c < out.components(); ++c) {
    auto coeffs = out.component(c);
    for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] *= transform_[i];
  }
  return out;
}

PeriodicField Mollifier::apply(const PeriodicField& f) const { return PeriodicField(apply(f.spectrum())); }

PeriodicField mollify(const PeriodicField& f, double delta) { return Mollifier(f.grid(), delta).apply(f); }

PeriodicField commutator(const PeriodicField& f, const PeriodicField& g, double delta, ProductKind product) {
  check_product_ranks(f, g, product);
  const Mollifier m(f.grid(), delta);
  const Spectrum fg = dealiased_product(f.spectrum(), g.spectrum(), product);
  return PeriodicField(commutator_spectrum(f.spectrum(), g.spectrum(), fg, m, product));
}

PeriodicField reynolds_stress(const PeriodicField& u, double delta) { return commutator(u, u, delta, ProductKind::tensor); }

std::string_view sweep_quantity_name(SweepQuantity q) noexcept {
  switch (q) {
    case SweepQuantity::gradient: return "grad";
    case SweepQuantity::gradient_curl: return "grad_curl";
    case SweepQuantity::commutator_scalar: return "commutator_scalar";
    case SweepQuantity::commutator_tensor: return "commutator_tensor";
  }
  return "grad";
}

SweepQuantity parse_sweep_quantity(std::string_view name) {
  if (name == "grad") return SweepQuantity::gradient;
  if (name == "grad_curl") return SweepQuantity::gradient_curl;
  if (name == "commutator_scalar") return SweepQuantity::commutator_scalar;
  if (name == "commutator_tensor") return SweepQuantity::commutator_tensor;
  throw Error(ErrorCode::config, "unknown sweep quantity '" + std::string(name) + "'");
}

std::vector<double> dyadic_deltas(const Grid3& grid, int first_cells, int last_cells) {
  std::vector<double> out;
  for (int c = first_cells; c <= last_cells; c *= 2) out.push_back(c * grid.spacing());
  return out;
}

RateSweep rate_sweep(SweepQuantity quantity, const PeriodicField& f, const PeriodicField* g,
                     const std::vector<double>& deltas, double norm_p, std::optional<double> theoretical_exponent) {
  const Grid3& grid = f.grid();
  if (deltas.size() < 4) throw Error(ErrorCode::precondition, "rate sweep needs at least four radii");
  const double h = grid.spacing();
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    const double cells = deltas[i] / h;
    const double log2cells = std::log2(cells);
    if (std::abs(log2cells - std::round(log2cells)) > 1e-9 || cells < 4.0 - 1e-9 || cells > grid.n() / 4.0 + 1e-9) {
      throw Error(ErrorCode::precondition, "rate sweep radii must be dyadic multiples of h in [4h, N h/4]");
    }
    if (i > 0 && !(deltas[i] > deltas[i - 1])) throw Error(ErrorCode::precondition, "rate sweep radii must increase");
  }
  ProductKind kind = ProductKind::scalar;
  switch (quantity) {
    case SweepQuantity::gradient:
      if (f.rank() == Rank::tensor3x3) throw Error(ErrorCode::unsupported_rank, "grad sweep: tensor input");
      break;
    case SweepQuantity::gradient_curl:
      if (f.rank() != Rank::vector3) throw Error(ErrorCode::unsupported_rank, "grad_curl sweep needs a vector field");
      break;
    case SweepQuantity::commutator_tensor:
      kind = ProductKind::tensor;
      [[fallthrough]];
    case SweepQuantity::commutator_scalar:
      if (g == nullptr) throw Error(ErrorCode::precondition, "commutator sweep needs a second field");
      check_product_ranks(f, *g, kind);
      break;
  }

  RateSweep sweep{quantity, norm_p, {}, 0.0, 0.0, 0.0, theoretical_exponent};
  std::optional<Spectrum> product;
  if (quantity == SweepQuantity::commutator_scalar || quantity == SweepQuantity::commutator_tensor) {
    product.emplace(dealiased_product(f.spectrum(), g->spectrum(), kind));
  }
  for (double delta : deltas) {
    const Mollifier m(grid, delta);
    double value = 0.0;
    switch (quantity) {
      case SweepQuantity::gradient:
        value = gradient_lp_norm(m.apply(f.spectrum()), norm_p);
        break;
      case SweepQuantity::gradient_curl:
        value = gradient_lp_norm(curl(m.apply(f.spectrum())), norm_p);
        break;
      case SweepQuantity::commutator_scalar:
      case SweepQuantity::commutator_tensor:
        value = lp_norm(PeriodicField(commutator_spectrum(f.spectrum(), g->spectrum(), *product, m, kind)), norm_p);
        break;
    }
    if (!(value > 0.0) || !std::isfinite(value)) {
      throw Error(ErrorCode::zero_quantity, "rate sweep quantity vanishes at delta = " + std::to_string(delta));
    }
    sweep.points.push_back({delta, value});
  }
  std::vector<double> x, y;
  for (const auto& pt : sweep.points) {
    x.push_back(std::log(pt.delta));
    y.push_back(std::log(pt.value));
  }
  const LineFit fit = fit_line(x, y);
  sweep.slope = fit.slope;
  sweep.intercept = fit.intercept;
  sweep.residual = fit.residual;
  return sweep;
}

}  // namespace helab
