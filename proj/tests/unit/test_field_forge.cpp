#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helab/error.hpp"
#include "helab/field_forge.hpp"
#include "helab/norms.hpp"
#include "helab/spectral_ops.hpp"
#include "support.hpp"

using namespace helab;

namespace {

constexpr double volume = 8.0 * std::numbers::pi * std::numbers::pi * std::numbers::pi;

// Sum of |c_k|^2 over 2^j <= |k| < 2^{j+1}, all components.
double shell_energy(const PeriodicField& f, int j) {
  const double lo = std::ldexp(1.0, j), hi = std::ldexp(1.0, j + 1);
  double sum = 0.0;
  const Spectrum& s = f.spectrum();
  for (int c = 0; c < f.components(); ++c) {
    const auto coeffs = s.component(c);
    for_each_mode(f.grid(), [&](const Mode& m) {
      const double k = std::sqrt(static_cast<double>(m.k2()));
      if (k >= lo && k < hi) sum += m.weight * std::norm(coeffs[m.index]);
    });
  }
  return sum;
}

}  // namespace

TEST_CASE("abc flow is a unit Beltrami field with H = 3 (2pi)^3") {
  const Grid3 g(32);
  const auto u = abc_flow(1.0, 1.0, 1.0, g);
  CHECK(test::max_abs_diff(curl(u), u) < 1e-13);
  CHECK(is_solenoidal(u));
  const double h = inner_product(u, curl(u));
  CHECK(h == doctest::Approx(inner_product(u, u)).epsilon(1e-14));
  CHECK(h == doctest::Approx(3.0 * volume).epsilon(1e-13));
  const auto v = abc_flow(0.5, 2.0, -1.0, g);
  CHECK(test::max_abs_diff(curl(v), v) < 1e-13);
}

TEST_CASE("taylor green has zero helicity and E = (2pi)^3/8") {
  const Grid3 g(32);
  const auto u = taylor_green(g);
  CHECK(test::max_abs(divergence(u).values()) < 1e-12);
  CHECK(std::abs(inner_product(u, curl(u))) < 1e-12);
  CHECK(0.5 * inner_product(u, u) == doctest::Approx(volume / 8.0).epsilon(1e-12));
}

TEST_CASE("lacunary specs are validated") {
  const Grid3 g(32);
  LacunarySpec spec;
  spec.exponent = 0.4;
  spec.octaves = 4;  // 3 * 16 >= 32
  CHECK_THROWS_AS(lacunary_field(spec, g), Error);
  try {
    lacunary_field(spec, g);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::resolution);
  }
  spec.octaves = 3;
  CHECK_NOTHROW(lacunary_field(spec, g));
  spec.exponent = 1.0;
  CHECK_THROWS_AS(lacunary_field(spec, g), Error);
  spec.exponent = 0.4;
  spec.divergence_free = true;
  CHECK_THROWS_AS(lacunary_field(spec, g), Error);
  spec.rank = Rank::tensor3x3;
  spec.divergence_free = false;
  CHECK_THROWS_AS(lacunary_field(spec, g), Error);
}

TEST_CASE("single-shell lacunary field is a trigonometric polynomial with finite Holder seminorm") {
  const Grid3 g(16);
  LacunarySpec spec;
  spec.exponent = 0.5;
  spec.octaves = 1;
  spec.seed = 3;
  const auto f = lacunary_field(spec, g);
  CHECK(shell_energy(f, 0) == doctest::Approx(spectral_l2_squared(f.spectrum()) / volume).epsilon(1e-12));
  const double holder = holder_seminorm(f, 0.5, std::numbers::pi).value;
  CHECK(std::isfinite(holder));
  CHECK(holder > 0.0);
}

TEST_CASE("lacunary shell energies follow 2^{-2 j theta}") {
  const Grid3 g(64);
  for (Rank rank : {Rank::scalar, Rank::vector3}) {
    LacunarySpec spec;
    spec.exponent = 0.4;
    spec.octaves = 4;
    spec.seed = 7;
    spec.rank = rank;
    spec.normalization = 1.5;
    const auto f = lacunary_field(spec, g);
    for (int j = 0; j < 4; ++j) {
      const double expected = 0.5 * 1.5 * 1.5 * std::pow(2.0, -2.0 * j * 0.4);
      CHECK(shell_energy(f, j) == doctest::Approx(expected).epsilon(1e-12));
    }
    CHECK(shell_energy(f, 4) == 0.0);
  }
}

TEST_CASE("lacunary generation is deterministic and honours divergence_free") {
  const Grid3 g(32);
  LacunarySpec spec;
  spec.exponent = 0.3;
  spec.octaves = 3;
  spec.seed = 99;
  spec.rank = Rank::vector3;
  spec.divergence_free = true;
  const auto a = lacunary_field(spec, g);
  const auto b = lacunary_field(spec, g);
  CHECK(test::max_abs_diff(a, b) == 0.0);
  CHECK(divergence_residual(a) < 1e-10);
  spec.seed = 100;
  CHECK(test::max_abs_diff(lacunary_field(spec, g), a) > 0.1);
}

TEST_CASE("lacunary theta = 0.4 round trips through the exponent estimator") {
  const Grid3 g(128);
  LacunarySpec spec;
  spec.exponent = 0.4;
  spec.octaves = 5;
  spec.seed = 7;
  const auto fit = exponent_estimate(lacunary_field(spec, g), infinity);
  CHECK(fit.slope >= 0.3);
  CHECK(fit.slope <= 0.5);
}

TEST_CASE("prescribed sobolev fields are solenoidal, mean-free and shell-uniform") {
  const Grid3 g(128);
  const double alpha = 0.9;
  std::vector<double> squares;
  for (int octaves = 0; octaves <= 5; ++octaves) {
    const auto f = prescribed_sobolev_field(alpha, 2.0, octaves, g, 4);
    if (octaves == 0) {
      CHECK(test::max_abs(f.values()) == 0.0);
    } else {
      CHECK(divergence_residual(f) < 1e-10);
      for (double m : component_means(f)) CHECK(std::abs(m) < 1e-14);
    }
    squares.push_back(std::pow(spectral_sobolev_seminorm(f, alpha).value, 2));
  }
  // Shell j adds a seminorm^2 share within the spread of |k|^{2 alpha} across one octave.
  const double first = squares[1] - squares[0];
  for (int j = 1; j < 5; ++j) {
    const double share = squares[j + 1] - squares[j];
    CHECK(share / first >= std::pow(2.0, -2.0 * alpha));
    CHECK(share / first <= std::pow(2.0, 2.0 * alpha));
  }
  CHECK_THROWS_AS(prescribed_sobolev_field(1.0, 2.0, 2, g, 1), Error);
  CHECK_THROWS_AS(prescribed_sobolev_field(0.5, 2.0, 6, g, 1), Error);
}

TEST_CASE("localized Gagliardo and spectral W^{0.3,2} seminorms agree within a factor 3") {
  const Grid3 g(128);
  const auto f = prescribed_sobolev_field(0.3, 2.0, 5, g, 3);
  const double spectral = spectral_sobolev_seminorm(f, 0.3).value;
  const double local = gagliardo_seminorm_local(f, 0.3, 2.0, std::numbers::pi / 16.0).value;
  CHECK(local / spectral > 1.0 / 3.0);
  CHECK(local / spectral < 3.0);
}

TEST_CASE("random band-limited fields") {
  const Grid3 g(32);
  const auto v = random_band_limited(g, 1, 6, Rank::vector3, true);
  CHECK(divergence_residual(v) < 1e-10);
  for (double m : component_means(v)) CHECK(std::abs(m) < 1e-14);
  double rms = 0.0;
  for (double x : v.values()) rms += x * x;
  CHECK(std::sqrt(rms / static_cast<double>(g.points())) == doctest::Approx(1.0).epsilon(1e-12));
  double outside = 0.0;
  for_each_mode(g, [&](const Mode& m) {
    if (std::abs(m.kx) > 6 || std::abs(m.ky) > 6 || std::abs(m.kz) > 6) {
      for (int c = 0; c < 3; ++c) outside = std::max(outside, std::abs(v.spectrum().component(c)[m.index]));
    }
  });
  CHECK(outside < 1e-15);
  CHECK(std::abs(inner_product(v, curl(v))) > 0.1 * inner_product(v, v));
  CHECK_THROWS_AS(random_band_limited(g, 1, 16, Rank::scalar, false), Error);
  CHECK_THROWS_AS(random_band_limited(g, 1, 0, Rank::scalar, false), Error);
  CHECK_THROWS_AS(random_band_limited(g, 1, 4, Rank::scalar, true), Error);
}

TEST_CASE("shell population and counter generator") {
  CHECK(shell_population(0).size() == 13u);
  for (const auto& k : shell_population(2)) {
    const int k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    CHECK(k2 >= 16);
    CHECK(k2 < 64);
  }
  const double u = counter_uniform(1, 2, 3, 4);
  CHECK(u == counter_uniform(1, 2, 3, 4));
  CHECK(u != counter_uniform(1, 2, 3, 5));
  double lo = 1.0, hi = 0.0, mean = 0.0;
  for (std::uint64_t i = 0; i < 10000; ++i) {
    const double x = counter_uniform(42, i, 0, 0);
    lo = std::min(lo, x);
    hi = std::max(hi, x);
    mean += x / 10000.0;
  }
  CHECK(lo >= 0.0);
  CHECK(hi < 1.0);
  CHECK(mean == doctest::Approx(0.5).epsilon(0.02));
}
