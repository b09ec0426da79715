#include "helab/spectral_ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "helab/error.hpp"

namespace helab {
namespace {

constexpr Complex I{0.0, 1.0};

struct DerivativeK {
  double x, y, z;
  double norm2() const { return x * x + y * y + z * z; }
};

DerivativeK derivative_k(const Grid3& g, const Mode& m) {
  return {static_cast<double>(g.derivative_wavenumber(m.kx)), static_cast<double>(g.derivative_wavenumber(m.ky)),
          static_cast<double>(g.derivative_wavenumber(m.kz))};
}

void require_rank(const Spectrum& s, Rank rank, const char* op) {
  if (s.rank() != rank) {
    throw Error(ErrorCode::unsupported_rank,
                std::string(op) + ": unsupported rank " + std::string(rank_name(s.rank())));
  }
}

}  // namespace

Spectrum gradient(const Spectrum& f) {
  const Grid3& g = f.grid();
  if (f.rank() == Rank::tensor3x3) throw Error(ErrorCode::unsupported_rank, "gradient: tensor input not supported");
  const bool scalar = f.rank() == Rank::scalar;
  Spectrum out(g, scalar ? Rank::vector3 : Rank::tensor3x3);
  const int in_components = f.components();
  for_each_mode(g, [&](const Mode& m) {
    const DerivativeK k = derivative_k(g, m);
    const double kk[3] = {k.x, k.y, k.z};
    for (int i = 0; i < in_components; ++i) {
      const Complex v = f.component(i)[m.index];
      for (int j = 0; j < 3; ++j) {
        const int oc = scalar ? j : tensor_component(i, j);
        out.component(oc)[m.index] = I * kk[j] * v;
      }
    }
  });
  return out;
}

PeriodicField gradient(const PeriodicField& f) {
  if (f.rank() == Rank::tensor3x3) throw Error(ErrorCode::unsupported_rank, "gradient: tensor input not supported");
  return PeriodicField(gradient(f.spectrum()));
}

Spectrum curl(const Spectrum& v) {
  require_rank(v, Rank::vector3, "curl");
  const Grid3& g = v.grid();
  Spectrum out(g, Rank::vector3);
  auto v0 = v.component(0), v1 = v.component(1), v2 = v.component(2);
  auto o0 = out.component(0), o1 = out.component(1), o2 = out.component(2);
  for_each_mode(g, [&](const Mode& m) {
    const DerivativeK k = derivative_k(g, m);
    const std::size_t i = m.index;
    o0[i] = I * (k.y * v2[i] - k.z * v1[i]);
    o1[i] = I * (k.z * v0[i] - k.x * v2[i]);
    o2[i] = I * (k.x * v1[i] - k.y * v0[i]);
  });
  return out;
}

PeriodicField curl(const PeriodicField& v) {
  if (v.rank() != Rank::vector3) throw Error(ErrorCode::unsupported_rank, "curl: vector input required");
  return PeriodicField(curl(v.spectrum()));
}

Spectrum divergence(const Spectrum& v) {
  const Grid3& g = v.grid();
  if (v.rank() == Rank::scalar) throw Error(ErrorCode::unsupported_rank, "divergence: scalar input not supported");
  const bool tensor = v.rank() == Rank::tensor3x3;
  Spectrum out(g, tensor ? Rank::vector3 : Rank::scalar);
  for_each_mode(g, [&](const Mode& m) {
    const DerivativeK k = derivative_k(g, m);
    const double kk[3] = {k.x, k.y, k.z};
    if (tensor) {
      for (int i = 0; i < 3; ++i) {
        Complex sum = 0.0;
        for (int j = 0; j < 3; ++j) sum += kk[j] * v.component(tensor_component(i, j))[m.index];
        out.component(i)[m.index] = I * sum;
      }
    } else {
      Complex sum = 0.0;
      for (int j = 0; j < 3; ++j) sum += kk[j] * v.component(j)[m.index];
      out.component(0)[m.index] = I * sum;
    }
  });
  return out;
}

PeriodicField divergence(const PeriodicField& v) {
  if (v.rank() == Rank::scalar) throw Error(ErrorCode::unsupported_rank, "divergence: scalar input not supported");
  return PeriodicField(divergence(v.spectrum()));
}

Spectrum leray_project(const Spectrum& v) {
  require_rank(v, Rank::vector3, "leray_project");
  const Grid3& g = v.grid();
  Spectrum out = v;
  auto o0 = out.component(0), o1 = out.component(1), o2 = out.component(2);
  for_each_mode(g, [&](const Mode& m) {
    const DerivativeK k = derivative_k(g, m);
    const double k2 = k.norm2();
    if (k2 == 0.0) return;
    const std::size_t i = m.index;
    const Complex kv = (k.x * o0[i] + k.y * o1[i] + k.z * o2[i]) / k2;
    o0[i] -= k.x * kv;
    o1[i] -= k.y * kv;
    o2[i] -= k.z * kv;
  });
  return out;
}

PeriodicField leray_project(const PeriodicField& v) {
  if (v.rank() != Rank::vector3) throw Error(ErrorCode::unsupported_rank, "leray_project: vector input required");
  return PeriodicField(leray_project(v.spectrum()));
}

PeriodicField laplacian(const PeriodicField& f) {
  Spectrum out = f.spectrum();
  for_each_mode(f.grid(), [&](const Mode& m) {
    const double k2 = static_cast<double>(m.k2());
    for (int c = 0; c < out.components(); ++c) out.component(c)[m.index] *= -k2;
  });
  return PeriodicField(std::move(out));
}

Spectrum fractional_laplacian(const Spectrum& f, double s, MeanMode mode) {
  if (!(s >= -1.0 && s <= 2.0)) {
    throw Error(ErrorCode::out_of_range, "fractional_laplacian: exponent must lie in [-1, 2]");
  }
  Spectrum out = f;
  if (s == 0.0) return out;
  if (s < 0.0 && mode == MeanMode::strict) {
    double scale = 0.0;
    double mean = 0.0;
    for (int c = 0; c < f.components(); ++c) {
      mean = std::max(mean, std::abs(f.component(c)[0]));
      for (const Complex& z : f.component(c)) scale = std::max(scale, std::abs(z));
    }
    if (mean > 1e-14 * scale) {
      throw Error(ErrorCode::mean_mode, "fractional_laplacian: negative exponent on a field with nonzero mean");
    }
  }
  for_each_mode(f.grid(), [&](const Mode& m) {
    const long k2 = m.k2();
    const double factor = k2 == 0 ? 0.0 : std::pow(static_cast<double>(k2), s);
    for (int c = 0; c < out.components(); ++c) out.component(c)[m.index] *= factor;
  });
  return out;
}

PeriodicField fractional_laplacian(const PeriodicField& f, double s, MeanMode mode) {
  return PeriodicField(fractional_laplacian(f.spectrum(), s, mode));
}

PeriodicField biot_savart(const PeriodicField& omega) {
  if (omega.rank() != Rank::vector3) throw Error(ErrorCode::unsupported_rank, "biot_savart: vector input required");
  const Spectrum& w = omega.spectrum();
  const Grid3& g = omega.grid();
  double rms = std::sqrt(spectral_l2_squared(w) / std::pow(Grid3::length(), 3));
  for (int c = 0; c < 3; ++c) {
    if (std::abs(w.component(c)[0]) > 1e-10 * std::max(rms, 1e-300)) {
      throw Error(ErrorCode::precondition, "biot_savart: vorticity must be mean-free");
    }
  }
  if (divergence_residual(omega) > 1e-10) {
    throw Error(ErrorCode::precondition, "biot_savart: vorticity must be divergence-free");
  }
  Spectrum out(g, Rank::vector3);
  auto w0 = w.component(0), w1 = w.component(1), w2 = w.component(2);
  auto o0 = out.component(0), o1 = out.component(1), o2 = out.component(2);
  for_each_mode(g, [&](const Mode& m) {
    const DerivativeK k = derivative_k(g, m);
    const double k2 = k.norm2();
    if (k2 == 0.0) return;
    const std::size_t i = m.index;
    o0[i] = I * (k.y * w2[i] - k.z * w1[i]) / k2;
    o1[i] = I * (k.z * w0[i] - k.x * w2[i]) / k2;
    o2[i] = I * (k.x * w1[i] - k.y * w0[i]) / k2;
  });
  return PeriodicField(std::move(out));
}

double divergence_residual(const PeriodicField& v) {
  const PeriodicField div = divergence(v);
  const PeriodicField grad = gradient(v);
  double max_div = 0.0;
  for (double x : div.values()) max_div = std::max(max_div, std::abs(x));
  double max_grad = 0.0;
  for (double x : pointwise_magnitude(grad)) max_grad = std::max(max_grad, x);
  if (max_grad == 0.0) return 0.0;
  return max_div / max_grad;
}

bool is_solenoidal(const PeriodicField& v, double tolerance) { return divergence_residual(v) <= tolerance; }

double spectral_l2_squared(const Spectrum& f) {
  double sum = 0.0;
  for (int c = 0; c < f.components(); ++c) {
    const auto coeffs = f.component(c);
    for_each_mode(f.grid(), [&](const Mode& m) { sum += m.weight * std::norm(coeffs[m.index]); });
  }
  return sum * std::pow(Grid3::length(), 3);
}

double inner_product(const PeriodicField& a, const PeriodicField& b) {
  if (!(a.grid() == b.grid())) throw Error(ErrorCode::grid_mismatch, "inner_product: grid mismatch");
  if (a.rank() != b.rank()) throw Error(ErrorCode::rank_mismatch, "inner_product: rank mismatch");
  const auto x = a.values();
  const auto y = b.values();
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sum += x[i] * y[i];
  return sum * a.grid().cell_volume();
}

}  // namespace helab
