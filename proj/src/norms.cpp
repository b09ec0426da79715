#include "helab/norms.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "helab/error.hpp"
#include "helab/fft.hpp"
#include "helab/parallel.hpp"
#include "helab/spectral_ops.hpp"

namespace helab {
namespace {

struct Offset {
  int dx, dy, dz;
  double distance;
  int multiplicity = 1;  ///< offsets of the full set this entry stands for
};

// Offsets o with components in (-n/2, n/2], lo <= h|o| <= hi. With half_only,
// one representative of each +/-o class is kept (modulo n, so an n/2
// component is its own negative) and carries multiplicity 2, or 1 when o = -o.
std::vector<Offset> offsets_within(const Grid3& g, double lo, double hi, bool half_only) {
  const int n = g.n();
  const double h = g.spacing();
  const int reach = std::min(n / 2, static_cast<int>(std::floor(hi / h + 1e-9)));
  std::vector<Offset> out;
  for (int dz = -reach; dz <= reach; ++dz) {
    if (dz == -n / 2) continue;
    for (int dy = -reach; dy <= reach; ++dy) {
      if (dy == -n / 2) continue;
      for (int dx = -reach; dx <= reach; ++dx) {
        if (dx == -n / 2) continue;
        if (dx == 0 && dy == 0 && dz == 0) continue;
        int multiplicity = 1;
        if (half_only) {
          auto negate = [n](int c) { return c == n / 2 ? c : -c; };
          const std::array<int, 3> o{dx, dy, dz};
          const std::array<int, 3> minus{negate(dx), negate(dy), negate(dz)};
          if (o < minus) continue;
          multiplicity = o == minus ? 1 : 2;
        }
        const double d = h * std::sqrt(static_cast<double>(dx * dx + dy * dy + dz * dz));
        if (d < lo * (1.0 - 1e-12) || d > hi * (1.0 + 1e-12)) continue;
        out.push_back({dx, dy, dz, d, multiplicity});
      }
    }
  }
  return out;
}

// |f(x) - f(x+o)| for every x, reusing `out`.
void difference_magnitude(const PeriodicField& f, const Offset& o, std::size_t z_begin, std::size_t z_end,
                          std::vector<double>& out) {
  const Grid3& g = f.grid();
  const int n = g.n();
  const int mask = n - 1;
  const std::size_t slab = static_cast<std::size_t>(n) * n;
  out.assign((z_end - z_begin) * slab, 0.0);
  for (int c = 0; c < f.components(); ++c) {
    const double* v = f.component(c).data();
    std::size_t w = 0;
    for (std::size_t k = z_begin; k < z_end; ++k) {
      const int k2 = (static_cast<int>(k) + o.dz) & mask;
      for (int j = 0; j < n; ++j) {
        const int j2 = (j + o.dy) & mask;
        const double* row1 = v + g.index(0, j, static_cast<int>(k));
        const double* row2 = v + g.index(0, j2, k2);
        for (int i = 0; i < n; ++i, ++w) {
          const double d = row1[i] - row2[(i + o.dx) & mask];
          out[w] += d * d;
        }
      }
    }
  }
  for (double& x : out) x = std::sqrt(x);
}

void require_exponent(double value, const char* what) {
  if (!(value > 0.0 && value < 1.0)) {
    throw Error(ErrorCode::out_of_range, std::string(what) + " must lie in (0,1)");
  }
}

double holder_scan(const PeriodicField& f, double theta, double cutoff) {
  const Grid3& g = f.grid();
  const auto offsets = offsets_within(g, 0.0, cutoff, true);
  const std::size_t n = static_cast<std::size_t>(g.n());
  std::vector<double> slab_max(n, 0.0);
  parallel_for(n, [&](std::size_t z0, std::size_t z1) {
    std::vector<double> diff;
    for (std::size_t z = z0; z < z1; ++z) {
      double best = 0.0;
      for (const Offset& o : offsets) {
        difference_magnitude(f, o, z, z + 1, diff);
        const double scale = std::pow(o.distance, -theta);
        for (double d : diff) best = std::max(best, d * scale);
      }
      slab_max[z] = best;
    }
  });
  return *std::max_element(slab_max.begin(), slab_max.end());
}

// h^6 sum_x sum_o |f(x)-f(x+o)|^p / |o|^{alpha p + 3} over the full set represented by half_offsets.
double pair_sum_direct(const PeriodicField& f, const std::vector<Offset>& half_offsets, double alpha, double p) {
  const Grid3& g = f.grid();
  const std::size_t n = static_cast<std::size_t>(g.n());
  std::vector<double> slab_sum(n, 0.0);
  parallel_for(n, [&](std::size_t z0, std::size_t z1) {
    std::vector<double> diff;
    for (std::size_t z = z0; z < z1; ++z) {
      double total = 0.0;
      for (const Offset& o : half_offsets) {
        difference_magnitude(f, o, z, z + 1, diff);
        double s = 0.0;
        if (p == 2.0) {
          for (double d : diff) s += d * d;
        } else {
          for (double d : diff) s += std::pow(d, p);
        }
        total += o.multiplicity * s * std::pow(o.distance, -(alpha * p + 3.0));
      }
      slab_sum[z] = total;
    }
  });
  double sum = 0.0;
  for (double s : slab_sum) sum += s;
  const double h3 = g.cell_volume();
  return sum * h3 * h3;
}

// Same quantity for p = 2 from the spectrum: sum_x |f(x)-f(x+o)|^2 = N^3 sum_k |c_k|^2 (2 - 2 cos(k.o h)).
double pair_sum_spectral(const PeriodicField& f, const std::vector<Offset>& half_offsets, double alpha) {
  const Grid3& g = f.grid();
  const int n = g.n();
  std::vector<double> weights(g.points(), 0.0);
  double total_weight = 0.0;
  for (const Offset& o : half_offsets) {
    const double w = std::pow(o.distance, -(2.0 * alpha + 3.0));
    weights[g.wrapped_index(o.dx, o.dy, o.dz)] += w;
    if (o.multiplicity == 2) weights[g.wrapped_index(-o.dx, -o.dy, -o.dz)] += w;
    total_weight += o.multiplicity * w;
  }
  std::vector<Complex> transform(g.modes());
  fft::forward(n, weights.data(), transform.data());
  const double n3 = static_cast<double>(g.points());
  const Spectrum& s = f.spectrum();
  double sum = 0.0;
  for (int c = 0; c < f.components(); ++c) {
    const auto coeffs = s.component(c);
    for_each_mode(g, [&](const Mode& m) {
      const double cosine_sum = n3 * transform[m.index].real();
      sum += m.weight * std::norm(coeffs[m.index]) * 2.0 * (total_weight - cosine_sum);
    });
  }
  const double h3 = g.cell_volume();
  return std::max(0.0, sum * n3 * h3 * h3);
}

}  // namespace

std::string_view seminorm_kind_name(SeminormKind kind) noexcept {
  switch (kind) {
    case SeminormKind::holder: return "holder";
    case SeminormKind::lp: return "lp";
    case SeminormKind::gagliardo: return "gagliardo";
    case SeminormKind::gagliardo_local: return "gagliardo_local";
    case SeminormKind::besov: return "besov";
    case SeminormKind::spectral_sobolev: return "spectral_sobolev";
  }
  return "lp";
}

double lp_norm(const PeriodicField& f, double p) {
  if (!(p >= 1.0)) throw Error(ErrorCode::out_of_range, "Lp exponent must be >= 1");
  const auto mag = pointwise_magnitude(f);
  if (std::isinf(p)) return mag.empty() ? 0.0 : *std::max_element(mag.begin(), mag.end());
  double sum = 0.0;
  if (p == 1.0) {
    for (double m : mag) sum += m;
  } else if (p == 2.0) {
    for (double m : mag) sum += m * m;
  } else {
    for (double m : mag) sum += std::pow(m, p);
  }
  return std::pow(sum * f.grid().cell_volume(), 1.0 / p);
}

SeminormValue lp_seminorm(const PeriodicField& f, double p) {
  return {SeminormKind::lp, 0.0, p, std::nullopt, lp_norm(f, p), f.grid().n()};
}

SeminormValue holder_seminorm(const PeriodicField& f, double theta, double cutoff_radius) {
  require_exponent(theta, "Holder exponent");
  const Grid3& g = f.grid();
  if (cutoff_radius < g.spacing()) throw Error(ErrorCode::precondition, "Holder cutoff below grid spacing");
  if (cutoff_radius > std::numbers::pi * (1.0 + 1e-12)) throw Error(ErrorCode::out_of_range, "Holder cutoff above pi");
  return {SeminormKind::holder, theta, infinity, cutoff_radius, holder_scan(f, theta, cutoff_radius), g.n()};
}

SeminormValue gagliardo_seminorm_local(const PeriodicField& f, double alpha, double p, double delta,
                                       GagliardoOptions options) {
  require_exponent(alpha, "Sobolev exponent");
  const Grid3& g = f.grid();
  if (!(delta > 0.0) || delta > std::numbers::pi / 2.0 * (1.0 + 1e-12)) {
    throw Error(ErrorCode::out_of_range, "localization radius must lie in (0, pi/2]");
  }
  if (delta * g.n() / Grid3::length() < 2.0 - 1e-12) {
    throw Error(ErrorCode::too_few_neighbors, "localization radius spans fewer than two cells");
  }
  if (std::isinf(p)) {
    SeminormValue v = holder_seminorm(f, alpha, delta);
    v.kind = SeminormKind::gagliardo_local;
    return v;
  }
  if (!(p >= 1.0)) throw Error(ErrorCode::out_of_range, "Gagliardo p must be >= 1");
  if (options.min_lag_cells < 1.0) throw Error(ErrorCode::precondition, "minimum lag must be >= one cell");
  const auto offsets = offsets_within(g, options.min_lag_cells * g.spacing(), delta, true);
  const double sum = p == 2.0 ? pair_sum_spectral(f, offsets, alpha) : pair_sum_direct(f, offsets, alpha, p);
  return {SeminormKind::gagliardo_local, alpha, p, delta, std::pow(sum, 1.0 / p), g.n()};
}

SeminormValue gagliardo_seminorm(const PeriodicField& f, double alpha, double p, GagliardoOptions options) {
  require_exponent(alpha, "Sobolev exponent");
  const Grid3& g = f.grid();
  if (g.n() > 16) throw Error(ErrorCode::precondition, "full Gagliardo seminorm is limited to N <= 16");
  const double diameter = std::numbers::pi * std::sqrt(3.0);
  if (std::isinf(p)) {
    SeminormValue v{SeminormKind::gagliardo, alpha, p, std::nullopt, holder_scan(f, alpha, diameter), g.n()};
    return v;
  }
  if (!(p >= 1.0)) throw Error(ErrorCode::out_of_range, "Gagliardo p must be >= 1");
  const auto offsets = offsets_within(g, options.min_lag_cells * g.spacing(), diameter, true);
  const double sum = pair_sum_direct(f, offsets, alpha, p);
  return {SeminormKind::gagliardo, alpha, p, std::nullopt, std::pow(sum, 1.0 / p), g.n()};
}

SeminormValue besov_seminorm(const PeriodicField& f, double theta, double p, double max_shift) {
  require_exponent(theta, "Besov exponent");
  if (!(p >= 1.0)) throw Error(ErrorCode::out_of_range, "Besov p must be >= 1");
  const Grid3& g = f.grid();
  const int n = g.n();
  const double h = g.spacing();
  double best = 0.0;
  if (p == 2.0) {
    // ||f(.+y)-f||_2^2 = 2 (2pi)^3 (A(0) - A(y)), A the autocorrelation.
    std::vector<Complex> power(g.modes(), Complex{});
    const Spectrum& s = f.spectrum();
    for (int c = 0; c < f.components(); ++c) {
      const auto coeffs = s.component(c);
      for (std::size_t i = 0; i < power.size(); ++i) power[i] += std::norm(coeffs[i]);
    }
    std::vector<double> autocorrelation(g.points());
    fft::inverse(n, power.data(), autocorrelation.data());
    const double volume = std::pow(Grid3::length(), 3);
    for (int dz = -n / 2 + 1; dz <= n / 2; ++dz) {
      for (int dy = -n / 2 + 1; dy <= n / 2; ++dy) {
        for (int dx = -n / 2 + 1; dx <= n / 2; ++dx) {
          if (dx == 0 && dy == 0 && dz == 0) continue;
          const double d = h * std::sqrt(static_cast<double>(dx * dx + dy * dy + dz * dz));
          if (d > max_shift) continue;
          const double sq = 2.0 * volume * (autocorrelation[0] - autocorrelation[g.wrapped_index(dx, dy, dz)]);
          best = std::max(best, std::sqrt(std::max(0.0, sq)) / std::pow(d, theta));
        }
      }
    }
  } else {
    const auto offsets = offsets_within(g, 0.0, std::min(max_shift, std::numbers::pi * std::sqrt(3.0)), true);
    std::vector<double> per_offset(offsets.size(), 0.0);
    parallel_for(offsets.size(), [&](std::size_t b, std::size_t e) {
      std::vector<double> diff;
      for (std::size_t i = b; i < e; ++i) {
        difference_magnitude(f, offsets[i], 0, static_cast<std::size_t>(n), diff);
        double norm = 0.0;
        if (std::isinf(p)) {
          for (double d : diff) norm = std::max(norm, d);
        } else {
          for (double d : diff) norm += std::pow(d, p);
          norm = std::pow(norm * g.cell_volume(), 1.0 / p);
        }
        per_offset[i] = norm / std::pow(offsets[i].distance, theta);
      }
    });
    for (double v : per_offset) best = std::max(best, v);
  }
  return {SeminormKind::besov, theta, p, std::nullopt, best, n};
}

SeminormValue spectral_sobolev_seminorm(const PeriodicField& f, double alpha) {
  if (!(alpha > -1.0 && alpha < 1.0)) throw Error(ErrorCode::out_of_range, "spectral Sobolev exponent must lie in (-1,1)");
  const PeriodicField g = fractional_laplacian(f, alpha / 2.0);
  return {SeminormKind::spectral_sobolev, alpha, 2.0, std::nullopt, lp_norm(g, 2.0), f.grid().n()};
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t m = x.size();
  if (m < 2 || y.size() != m) throw Error(ErrorCode::precondition, "line fit needs at least two points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(m);
  my /= static_cast<double>(m);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw Error(ErrorCode::precondition, "line fit needs distinct abscissae");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double r = y[i] - (fit.slope * x[i] + fit.intercept);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / static_cast<double>(m));
  return fit;
}

ExponentFit exponent_estimate(const PeriodicField& f, double p) {
  if (!(p >= 1.0)) throw Error(ErrorCode::out_of_range, "modulus exponent must be >= 1");
  const Grid3& g = f.grid();
  const int n = g.n();
  ExponentFit fit;
  std::vector<double> diff;
  for (int cells = 2; cells <= 32 && cells <= n / 2; cells *= 2) {
    double modulus = 0.0;
    for (int axis = 0; axis < 3; ++axis) {
      const Offset o{axis == 0 ? cells : 0, axis == 1 ? cells : 0, axis == 2 ? cells : 0, cells * g.spacing()};
      difference_magnitude(f, o, 0, static_cast<std::size_t>(n), diff);
      double m = 0.0;
      if (std::isinf(p)) {
        for (double d : diff) m = std::max(m, d);
      } else {
        for (double d : diff) m += std::pow(d, p);
        m = std::pow(m * g.cell_volume(), 1.0 / p);
      }
      modulus = std::max(modulus, m);
    }
    if (modulus > 0.0 && std::isfinite(modulus)) {
      fit.lags.push_back(cells * g.spacing());
      fit.moduli.push_back(modulus);
    }
  }
  if (fit.lags.size() < 3) throw Error(ErrorCode::too_few_lags, "exponent estimate needs at least three usable lags");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < fit.lags.size(); ++i) {
    lx.push_back(std::log(fit.lags[i]));
    ly.push_back(std::log(fit.moduli[i]));
  }
  const LineFit line = fit_line(lx, ly);
  fit.slope = line.slope;
  fit.intercept = line.intercept;
  fit.residual = line.residual;
  return fit;
}

}  // namespace helab
