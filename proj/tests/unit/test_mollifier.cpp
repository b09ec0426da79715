#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helab/error.hpp"
#include "helab/field_forge.hpp"
#include "helab/mollifier.hpp"
#include "helab/norms.hpp"
#include "helab/spectral_ops.hpp"
#include "support.hpp"

using namespace helab;
using helab::test::max_abs;
using helab::test::max_abs_diff;
using helab::test::sample;

namespace {

// Circular convolution h^3 sum_y rho(y) f(x - y) over the kernel support.
PeriodicField direct_convolution(const PeriodicField& f, const Mollifier& m) {
  const Grid3& g = f.grid();
  const int n = g.n();
  std::vector<std::array<int, 4>> support;
  const auto& kernel = m.kernel();
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        if (kernel[g.index(i, j, k)] != 0.0) support.push_back({i, j, k, 0});
  std::vector<double> out(f.values().size(), 0.0);
  for (int c = 0; c < f.components(); ++c) {
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          double sum = 0.0;
          for (const auto& s : support) {
            sum += kernel[g.index(s[0], s[1], s[2])] * f.values()[c * g.points() + g.wrapped_index(i - s[0], j - s[1], k - s[2])];
          }
          out[c * g.points() + g.index(i, j, k)] = sum * g.cell_volume();
        }
  }
  return PeriodicField(g, f.rank(), std::move(out));
}

double periodic_distance(const Grid3& g, int i, int j, int k, int i0, int j0, int k0) {
  auto d = [n = g.n()](int a, int b) {
    const int r = std::abs(a - b) % n;
    return std::min(r, n - r);
  };
  const double h = g.spacing();
  return h * std::sqrt(static_cast<double>(d(i, i0) * d(i, i0) + d(j, j0) * d(j, j0) + d(k, k0) * d(k, k0)));
}

}  // namespace

TEST_CASE("kernel is a nonnegative unit-mass bump supported in the ball") {
  const Grid3 g(32);
  const double delta = 6.0 * g.spacing();
  const Mollifier m(g, delta);
  double mass = 0.0;
  for (int k = 0; k < 32; ++k)
    for (int j = 0; j < 32; ++j)
      for (int i = 0; i < 32; ++i) {
        const double v = m.kernel()[g.index(i, j, k)];
        CHECK(v >= 0.0);
        if (v > 0.0) CHECK(periodic_distance(g, i, j, k, 0, 0, 0) < delta);
        mass += v;
      }
  CHECK(std::abs(mass * g.cell_volume() - 1.0) < 1e-14);
  CHECK(m.transform()[0] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("kernel radius is validated") {
  const Grid3 g(32);
  try {
    Mollifier(g, 3.0 * g.spacing());
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::under_resolved_kernel);
  }
  CHECK_NOTHROW(Mollifier(g, 4.0 * g.spacing()));
  CHECK_NOTHROW(Mollifier(g, std::numbers::pi / 2.0));
  CHECK_THROWS_AS(Mollifier(g, 2.0), Error);
}

TEST_CASE("mollification reproduces constants and contracts L2") {
  const Grid3 g(32);
  const auto c = sample(g, Rank::vector3, [](int i, double, double, double) { return 1.5 - i; });
  CHECK(max_abs_diff(mollify(c, 0.9), c) < 1e-14);
  const auto f = random_band_limited(g, 4, 10, Rank::vector3, false);
  for (double delta : {0.8, 1.2, 1.5}) CHECK(lp_norm(mollify(f, delta), 2.0) <= lp_norm(f, 2.0));
}

TEST_CASE("spectral mollification matches direct-space convolution") {
  const Grid3 g(32);
  const Mollifier m(g, 5.0 * g.spacing());
  const auto f = random_band_limited(g, 8, 12, Rank::scalar, false);
  CHECK(max_abs_diff(m.apply(f), direct_convolution(f, m)) < 1e-10);

  // A single mode is an eigenfunction with eigenvalue h^3 sum_y rho(y) cos(k.y).
  const auto s = sample(g, Rank::scalar, [](int, double x, double y, double) { return std::sin(2.0 * x + y); });
  double eigen = 0.0;
  for (int k = 0; k < 32; ++k)
    for (int j = 0; j < 32; ++j)
      for (int i = 0; i < 32; ++i) {
        const double w = m.kernel()[g.index(i, j, k)];
        if (w == 0.0) continue;
        const int x = g.wavenumber(i), y = g.wavenumber(j);
        eigen += w * std::cos((2.0 * x + y) * g.spacing());
      }
  eigen *= g.cell_volume();
  CHECK(max_abs_diff(m.apply(s), eigen * s) < 1e-12);
}

TEST_CASE("mollification commutes with derivatives") {
  const Grid3 g(32);
  const auto u = random_band_limited(g, 9, 10, Rank::vector3, false);
  const Mollifier m(g, 0.9);
  CHECK(test::relative_l2(gradient(m.apply(u)), m.apply(gradient(u))) < 1e-12);
  CHECK(test::relative_l2(curl(m.apply(u)), m.apply(curl(u))) < 1e-12);
}

TEST_CASE("mollification only sees the field within distance delta") {
  const Grid3 g(32);
  const double h = g.spacing();
  const double delta = 5.0 * h;
  const double radius = 3.0 * h;
  const auto f = random_band_limited(g, 10, 8, Rank::scalar, false);
  // Smooth compactly supported bump around grid point (16, 16, 16).
  const double c0 = g.coordinate(16);
  const auto bump = sample(g, Rank::scalar, [&](int, double x, double y, double z) {
    const double r2 = ((x - c0) * (x - c0) + (y - c0) * (y - c0) + (z - c0) * (z - c0)) / (radius * radius);
    return r2 < 1.0 ? std::exp(-1.0 / (1.0 - r2)) : 0.0;
  });
  const auto base = mollify(f, delta);
  const auto perturbed = mollify(f + bump, delta);
  double far_change = 0.0, near_change = 0.0;
  for (int k = 0; k < 32; ++k)
    for (int j = 0; j < 32; ++j)
      for (int i = 0; i < 32; ++i) {
        const double d = periodic_distance(g, i, j, k, 16, 16, 16);
        const double change = std::abs(perturbed.at(0, i, j, k) - base.at(0, i, j, k));
        if (d > delta + radius + 2.0 * h) far_change = std::max(far_change, change);
        if (d < h) near_change = std::max(near_change, change);
      }
  CHECK(far_change < 1e-12);
  CHECK(near_change > 1e-3);
}

TEST_CASE("commutator vanishes for constant factors") {
  const Grid3 g(32);
  const auto c = sample(g, Rank::scalar, [](int, double, double, double) { return 2.0; });
  const auto f = random_band_limited(g, 11, 9, Rank::scalar, false);
  CHECK(max_abs(commutator(c, f, 0.9, ProductKind::scalar).values()) < 1e-13);
  CHECK(max_abs(commutator(f, c, 0.9, ProductKind::scalar).values()) < 1e-13);
  const auto u = sample(g, Rank::vector3, [](int i, double, double, double) { return 1.0 + i; });
  CHECK(max_abs(reynolds_stress(u, 0.9).values()) < 1e-13);
}

TEST_CASE("commutator of sin x with itself matches the direct-space oracle") {
  const Grid3 g(32);
  const Mollifier m(g, 6.0 * g.spacing());
  const auto s = sample(g, Rank::scalar, [](int, double x, double, double) { return std::sin(x); });
  const auto s2 = sample(g, Rank::scalar, [](int, double x, double, double) { return std::sin(x) * std::sin(x); });
  const auto sd = direct_convolution(s, m);
  std::vector<double> expected(g.points());
  const auto s2d = direct_convolution(s2, m);
  for (std::size_t p = 0; p < g.points(); ++p) expected[p] = sd.values()[p] * sd.values()[p] - s2d.values()[p];
  const PeriodicField oracle(g, Rank::scalar, expected);
  CHECK(max_abs_diff(commutator(s, s, m.radius(), ProductKind::scalar), oracle) < 1e-10);
}

TEST_CASE("commutator is bilinear and checks ranks") {
  const Grid3 g(16);
  const double delta = std::numbers::pi / 2.0;
  const auto f1 = random_band_limited(g, 1, 5, Rank::vector3, false);
  const auto f2 = random_band_limited(g, 2, 5, Rank::vector3, false);
  const auto k = random_band_limited(g, 3, 5, Rank::vector3, false);
  for (ProductKind kind : {ProductKind::scalar, ProductKind::tensor}) {
    const auto lhs = commutator(f1 + f2, k, delta, kind);
    const auto rhs = commutator(f1, k, delta, kind) + commutator(f2, k, delta, kind);
    CHECK(max_abs_diff(lhs, rhs) < 1e-12 * max_abs(lhs.values()));
  }
  const auto s = random_band_limited(g, 4, 5, Rank::scalar, false);
  CHECK_THROWS_AS(commutator(s, k, delta, ProductKind::tensor), Error);
  CHECK_THROWS_AS(commutator(s, k, delta, ProductKind::scalar), Error);
  CHECK_THROWS_AS(commutator(f1, random_band_limited(Grid3(32), 1, 5, Rank::vector3, false), delta, ProductKind::scalar), Error);
}

TEST_CASE("reynolds stress is the symmetric tensor commutator") {
  const Grid3 g(32);
  const auto u = abc_flow(1.0, 1.0, 1.0, g);
  const double delta = 8.0 * g.spacing();
  const auto r = reynolds_stress(u, delta);
  CHECK(max_abs_diff(r, commutator(u, u, delta, ProductKind::tensor)) == 0.0);
  const auto v = random_band_limited(g, 5, 8, Rank::vector3, true);
  const auto rv = reynolds_stress(v, delta);
  double asym = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const auto a = rv.component(tensor_component(i, j));
      const auto b = rv.component(tensor_component(j, i));
      for (std::size_t p = 0; p < a.size(); ++p) asym = std::max(asym, std::abs(a[p] - b[p]));
    }
  CHECK(asym < 1e-13 * max_abs(rv.values()));
}

TEST_CASE("dyadic radii") {
  const Grid3 g(64);
  const auto d = dyadic_deltas(g, 4, 16);
  REQUIRE(d.size() == 3u);
  CHECK(d[0] == doctest::Approx(4.0 * g.spacing()));
  CHECK(d[2] == doctest::Approx(16.0 * g.spacing()));
  CHECK(parse_sweep_quantity("grad_curl") == SweepQuantity::gradient_curl);
  CHECK(sweep_quantity_name(SweepQuantity::commutator_tensor) == "commutator_tensor");
  CHECK_THROWS_AS(parse_sweep_quantity("hessian"), Error);
}

TEST_CASE("rate sweep preconditions") {
  const Grid3 g(64);
  const auto f = random_band_limited(g, 1, 3, Rank::scalar, false);
  const auto ok = dyadic_deltas(g, 2, 16);
  CHECK_THROWS_AS(rate_sweep(SweepQuantity::gradient, f, nullptr, dyadic_deltas(g, 4, 16), infinity), Error);
  CHECK_THROWS_AS(rate_sweep(SweepQuantity::gradient, f, nullptr, ok, infinity), Error);
  CHECK_THROWS_AS(rate_sweep(SweepQuantity::gradient, f, nullptr, {0.4, 0.5, 0.6, 0.7}, infinity), Error);
  const auto h = g.spacing();
  CHECK_THROWS_AS(rate_sweep(SweepQuantity::gradient, f, nullptr, {4 * h, 16 * h, 8 * h, 4 * h}, infinity), Error);
  CHECK_THROWS_AS(rate_sweep(SweepQuantity::gradient, f, nullptr, {4 * h, 8 * h, 16 * h, 32 * h}, infinity), Error);
  CHECK_THROWS_AS(rate_sweep(SweepQuantity::gradient_curl, f, nullptr, {4 * h, 4 * h, 8 * h, 16 * h}, 2.0), Error);
  const Grid3 g2(128);
  const auto f2 = random_band_limited(g2, 1, 3, Rank::scalar, false);
  const auto radii = dyadic_deltas(g2, 4, 32);
  CHECK_THROWS_AS(rate_sweep(SweepQuantity::gradient_curl, f2, nullptr, radii, 2.0), Error);
  CHECK_THROWS_AS(rate_sweep(SweepQuantity::commutator_scalar, f2, nullptr, radii, 2.0), Error);
  const auto c = sample(g2, Rank::scalar, [](int, double, double, double) { return 1.0; });
  try {
    rate_sweep(SweepQuantity::gradient, c, nullptr, radii, 2.0);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::zero_quantity);
  }
}

TEST_CASE("smooth fields saturate and slopes ignore scaling") {
  const Grid3 g(128);
  const auto f = random_band_limited(g, 3, 1, Rank::scalar, false);
  const auto radii = dyadic_deltas(g, 4, 32);
  const auto sweep = rate_sweep(SweepQuantity::gradient, f, nullptr, {radii[0], radii[1], radii[2], radii[3]}, infinity, 0.0);
  CHECK(sweep.points.size() == 4u);
  CHECK(std::abs(sweep.slope) < 0.1);
  CHECK(sweep.theoretical_exponent.value() == 0.0);

  LacunarySpec spec;
  spec.exponent = 0.4;
  spec.octaves = 5;
  spec.seed = 7;
  const auto rough = lacunary_field(spec, g);
  const auto a = rate_sweep(SweepQuantity::gradient, rough, nullptr, radii, 2.0);
  const auto b = rate_sweep(SweepQuantity::gradient, -3.0 * rough, nullptr, radii, 2.0);
  CHECK(a.slope < 0.0);
  CHECK(b.slope == doctest::Approx(a.slope).epsilon(1e-12));
  CHECK(b.points[1].value == doctest::Approx(3.0 * a.points[1].value).epsilon(1e-12));
}

TEST_CASE("commutator rates: the constant of the mixed-norm estimate is stable") {
  const Grid3 g(64);
  LacunarySpec fs, gs;
  fs.exponent = 0.4;
  fs.octaves = 4;
  fs.seed = 7;
  gs.exponent = 0.3;
  gs.octaves = 4;
  gs.seed = 11;
  const auto f = lacunary_field(fs, g);
  const auto k = lacunary_field(gs, g);
  std::vector<double> constants;
  for (int cells : {4, 6, 8}) {
    const double delta = cells * g.spacing();
    const double value = lp_norm(commutator(f, k, delta, ProductKind::scalar), 2.0);
    const double sf = gagliardo_seminorm_local(f, 0.4, 4.0, delta).value;
    const double sk = gagliardo_seminorm_local(k, 0.3, 4.0, delta).value;
    CHECK(value > 0.0);
    constants.push_back(value / (std::pow(delta, 0.7) * sf * sk));
  }
  const double mean = (constants[0] + constants[1] + constants[2]) / 3.0;
  for (double c : constants) {
    CHECK(c >= 0.5 * mean);
    CHECK(c <= 1.5 * mean);
  }
}
