#include "helab/field_forge.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <string>

#include "helab/error.hpp"

namespace helab {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

bool canonical(int kx, int ky, int kz) {
  if (kx != 0) return kx > 0;
  if (ky != 0) return ky > 0;
  return kz > 0;
}

// Unit vector from two uniforms (uniform on the sphere).
std::array<double, 3> unit_vector(double u1, double u2) {
  const double z = 2.0 * u1 - 1.0;
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  const double phi = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(phi), r * std::sin(phi), z};
}

// Unit vector orthogonal to k, rotated by an angle drawn from u.
std::array<double, 3> transverse_unit(const std::array<int, 3>& k, double u) {
  const double kn = std::sqrt(static_cast<double>(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]));
  const std::array<double, 3> khat{k[0] / kn, k[1] / kn, k[2] / kn};
  // Seed axis least aligned with k.
  std::array<double, 3> seed{0.0, 0.0, 0.0};
  int axis = 0;
  for (int i = 1; i < 3; ++i) {
    if (std::abs(khat[i]) < std::abs(khat[axis])) axis = i;
  }
  seed[axis] = 1.0;
  const double dot = seed[0] * khat[0] + seed[1] * khat[1] + seed[2] * khat[2];
  std::array<double, 3> e1{seed[0] - dot * khat[0], seed[1] - dot * khat[1], seed[2] - dot * khat[2]};
  const double n1 = std::sqrt(e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]);
  for (double& v : e1) v /= n1;
  const std::array<double, 3> e2{khat[1] * e1[2] - khat[2] * e1[1], khat[2] * e1[0] - khat[0] * e1[2],
                                 khat[0] * e1[1] - khat[1] * e1[0]};
  const double angle = 2.0 * std::numbers::pi * u;
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * e1[0] + s * e2[0], c * e1[1] + s * e2[1], c * e1[2] + s * e2[2]};
}

void require_band(int octaves, const Grid3& grid) {
  if (octaves < 0) throw Error(ErrorCode::precondition, "octave count must be nonnegative");
  if (octaves > 0 && 3.0 * std::ldexp(1.0, octaves) >= grid.n()) {
    throw Error(ErrorCode::resolution, "shell 2^" + std::to_string(octaves) + " exceeds N/3 for N = " +
                                           std::to_string(grid.n()));
  }
}

}  // namespace

double counter_uniform(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  std::uint64_t x = splitmix64(seed);
  x = splitmix64(x ^ a);
  x = splitmix64(x ^ (b * 0x632be59bd9b4e019ULL));
  x = splitmix64(x ^ (c * 0x85157af5ULL));
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

void add_real_mode(Spectrum& s, int component, int kx, int ky, int kz, Complex amplitude) {
  const Grid3& g = s.grid();
  auto coeffs = s.component(component);
  auto at = [&](int x, int y, int z) -> Complex& {
    const std::size_t idx = static_cast<std::size_t>(x) +
                            static_cast<std::size_t>(g.half_n()) * (g.axis_index(y) + static_cast<std::size_t>(g.n()) * g.axis_index(z));
    return coeffs[idx];
  };
  if (kx > 0) {
    at(kx, ky, kz) += amplitude;
  } else if (kx < 0) {
    at(-kx, -ky, -kz) += std::conj(amplitude);
  } else {
    at(0, ky, kz) += amplitude;
    at(0, -ky, -kz) += std::conj(amplitude);
  }
}

std::vector<std::array<int, 3>> shell_population(int shell) {
  const long lo2 = 1L << (2 * shell);
  const long hi2 = 1L << (2 * (shell + 1));
  const int r = 1 << (shell + 1);
  std::vector<std::array<int, 3>> out;
  for (int kz = -r; kz <= r; ++kz) {
    for (int ky = -r; ky <= r; ++ky) {
      for (int kx = 0; kx <= r; ++kx) {
        const long k2 = static_cast<long>(kx) * kx + static_cast<long>(ky) * ky + static_cast<long>(kz) * kz;
        if (k2 < lo2 || k2 >= hi2 || !canonical(kx, ky, kz)) continue;
        out.push_back({kx, ky, kz});
      }
    }
  }
  return out;
}

void validate(const LacunarySpec& spec, const Grid3& grid) {
  if (!(spec.exponent > 0.0 && spec.exponent < 1.0)) {
    throw Error(ErrorCode::out_of_range, "lacunary exponent must lie in (0,1)");
  }
  if (spec.octaves < 1) throw Error(ErrorCode::precondition, "lacunary field needs at least one octave");
  if (spec.divergence_free && spec.rank != Rank::vector3) {
    throw Error(ErrorCode::unsupported_rank, "divergence-free lacunary fields must be vector fields");
  }
  if (spec.rank == Rank::tensor3x3) throw Error(ErrorCode::unsupported_rank, "lacunary tensor fields unsupported");
  if (!std::isfinite(spec.normalization)) throw Error(ErrorCode::precondition, "normalization must be finite");
  require_band(spec.octaves, grid);
}

PeriodicField abc_flow(double a, double b, double c, const Grid3& grid) {
  PeriodicField u(grid, Rank::vector3);
  auto v = u.mutable_values();
  const std::size_t np = grid.points();
  const int n = grid.n();
  for (int k = 0; k < n; ++k) {
    const double z = grid.coordinate(k);
    for (int j = 0; j < n; ++j) {
      const double y = grid.coordinate(j);
      for (int i = 0; i < n; ++i) {
        const double x = grid.coordinate(i);
        const std::size_t idx = grid.index(i, j, k);
        v[idx] = a * std::sin(z) + c * std::cos(y);
        v[np + idx] = b * std::sin(x) + a * std::cos(z);
        v[2 * np + idx] = c * std::sin(y) + b * std::cos(x);
      }
    }
  }
  return u;
}

PeriodicField taylor_green(const Grid3& grid) {
  PeriodicField u(grid, Rank::vector3);
  auto v = u.mutable_values();
  const std::size_t np = grid.points();
  const int n = grid.n();
  for (int k = 0; k < n; ++k) {
    const double cz = std::cos(grid.coordinate(k));
    for (int j = 0; j < n; ++j) {
      const double y = grid.coordinate(j);
      for (int i = 0; i < n; ++i) {
        const double x = grid.coordinate(i);
        const std::size_t idx = grid.index(i, j, k);
        v[idx] = std::sin(x) * std::cos(y) * cz;
        v[np + idx] = -std::cos(x) * std::sin(y) * cz;
      }
    }
  }
  return u;
}

PeriodicField lacunary_field(const LacunarySpec& spec, const Grid3& grid) {
  validate(spec, grid);
  Spectrum s(grid, spec.rank);
  for (int j = 0; j < spec.octaves; ++j) {
    const auto population = shell_population(j);
    const std::size_t modes = std::min<std::size_t>(8, population.size());
    const double amplitude = spec.normalization * std::pow(2.0, -j * spec.exponent) / std::sqrt(static_cast<double>(modes));
    std::set<std::size_t> chosen;
    std::uint64_t draw = 0;
    for (std::size_t m = 0; m < modes; ++m) {
      std::size_t pick = 0;
      do {
        pick = static_cast<std::size_t>(counter_uniform(spec.seed, j, m, draw++) * population.size());
      } while (chosen.count(pick) != 0);
      chosen.insert(pick);
      const auto& k = population[pick];
      const double phase = 2.0 * std::numbers::pi * counter_uniform(spec.seed, j, m, 1000003);
      const Complex a = 0.5 * amplitude * std::polar(1.0, phase);
      if (spec.rank == Rank::scalar) {
        add_real_mode(s, 0, k[0], k[1], k[2], a);
        continue;
      }
      const double u1 = counter_uniform(spec.seed, j, m, 1000033);
      const double u2 = counter_uniform(spec.seed, j, m, 1000037);
      const auto e = spec.divergence_free ? transverse_unit(k, u1) : unit_vector(u1, u2);
      for (int c = 0; c < 3; ++c) add_real_mode(s, c, k[0], k[1], k[2], e[c] * a);
    }
  }
  return PeriodicField(std::move(s));
}

PeriodicField prescribed_sobolev_field(double alpha, double q_target, int octaves, const Grid3& grid,
                                       std::uint64_t seed) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::out_of_range, "alpha must lie in (0,1)");
  if (!(q_target >= 1.0)) throw Error(ErrorCode::out_of_range, "q_target must be >= 1");
  require_band(octaves, grid);
  Spectrum s(grid, Rank::vector3);
  for (int j = 0; j < octaves; ++j) {
    const auto population = shell_population(j);
    const double amplitude = std::pow(2.0, -j * alpha) / std::sqrt(static_cast<double>(population.size()));
    for (std::size_t m = 0; m < population.size(); ++m) {
      const auto& k = population[m];
      const double phase = 2.0 * std::numbers::pi * counter_uniform(seed, j, m, 0);
      const auto e = transverse_unit(k, counter_uniform(seed, j, m, 1));
      const Complex a = 0.5 * amplitude * std::polar(1.0, phase);
      for (int c = 0; c < 3; ++c) add_real_mode(s, c, k[0], k[1], k[2], e[c] * a);
    }
  }
  return PeriodicField(std::move(s));
}

PeriodicField random_band_limited(const Grid3& grid, std::uint64_t seed, int kmax, Rank rank, bool solenoidal) {
  if (kmax < 1 || 2 * kmax >= grid.n()) throw Error(ErrorCode::resolution, "kmax must satisfy 1 <= kmax < N/2");
  if (solenoidal && rank != Rank::vector3) {
    throw Error(ErrorCode::unsupported_rank, "solenoidal random fields must be vector fields");
  }
  Spectrum s(grid, rank);
  std::uint64_t counter = 0;
  for (int kz = -kmax; kz <= kmax; ++kz) {
    for (int ky = -kmax; ky <= kmax; ++ky) {
      for (int kx = 0; kx <= kmax; ++kx, ++counter) {
        const long k2 = static_cast<long>(kx) * kx + static_cast<long>(ky) * ky + static_cast<long>(kz) * kz;
        if (k2 == 0 || k2 > static_cast<long>(kmax) * kmax || !canonical(kx, ky, kz)) continue;
        const double kn = std::sqrt(static_cast<double>(k2));
        const double amplitude = 1.0 / ((1.0 + kn) * (1.0 + kn));
        const double phase = 2.0 * std::numbers::pi * counter_uniform(seed, counter, 0, 0);
        const Complex a = 0.5 * amplitude * std::polar(1.0, phase);
        if (rank == Rank::scalar) {
          add_real_mode(s, 0, kx, ky, kz, a);
          continue;
        }
        const double u1 = counter_uniform(seed, counter, 1, 0);
        const double u2 = counter_uniform(seed, counter, 2, 0);
        if (solenoidal) {
          // Two transverse polarizations with independent phases, so modes carry helicity.
          const auto e1 = transverse_unit({kx, ky, kz}, u1);
          const double kn3[3] = {kx / kn, ky / kn, kz / kn};
          const std::array<double, 3> e2{kn3[1] * e1[2] - kn3[2] * e1[1], kn3[2] * e1[0] - kn3[0] * e1[2],
                                         kn3[0] * e1[1] - kn3[1] * e1[0]};
          const Complex twist = std::polar(1.0, 2.0 * std::numbers::pi * u2);
          for (int c = 0; c < 3; ++c) add_real_mode(s, c, kx, ky, kz, (e1[c] + twist * e2[c]) * a / std::sqrt(2.0));
          continue;
        }
        const auto e = unit_vector(u1, u2);
        const int comps = component_count(rank);
        for (int c = 0; c < comps; ++c) {
          const double weight = c < 3 ? e[c] : counter_uniform(seed, counter, 3, c) - 0.5;
          const Complex spin = std::polar(1.0, 2.0 * std::numbers::pi * counter_uniform(seed, counter, 4, c));
          add_real_mode(s, c, kx, ky, kz, weight * spin * a);
        }
      }
    }
  }
  PeriodicField f(std::move(s));
  double sum = 0.0;
  for (double v : f.values()) sum += v * v;
  const double rms = std::sqrt(sum / static_cast<double>(grid.points()));
  if (rms > 0.0) f *= 1.0 / rms;
  return f;
}

}  // namespace helab
