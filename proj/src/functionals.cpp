#include "helab/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "helab/dealias.hpp"
#include "helab/error.hpp"
#include "helab/mollifier.hpp"
#include "helab/norms.hpp"
#include "helab/parallel.hpp"
#include "helab/spectral_ops.hpp"

namespace helab {
namespace {

void require_vector(const PeriodicField& u, const char* what) {
  if (u.rank() != Rank::vector3) throw Error(ErrorCode::unsupported_rank, std::string(what) + " needs a vector field");
}

Spectrum component_of(const Spectrum& s, int c) {
  Spectrum out(s.grid(), Rank::scalar);
  auto src = s.component(c);
  std::copy(src.begin(), src.end(), out.component(0).begin());
  return out;
}

Spectrum stack(const std::array<Spectrum, 3>& parts) {
  Spectrum out(parts[0].grid(), Rank::vector3);
  for (int c = 0; c < 3; ++c) {
    auto src = parts[c].component(0);
    std::copy(src.begin(), src.end(), out.component(c).begin());
  }
  return out;
}

Spectrum dot(const Spectrum& a, const Spectrum& b) { return dealiased_product(a, b, ProductKind::scalar); }

// (a.grad) b for vectors a, b.
Spectrum advect(const Spectrum& a, const Spectrum& b) {
  return stack({dot(a, gradient(component_of(b, 0))), dot(a, gradient(component_of(b, 1))),
                dot(a, gradient(component_of(b, 2)))});
}

double l2(const Spectrum& s) { return std::sqrt(spectral_l2_squared(s)); }

Spectrum combine(const Spectrum& a, double ca, const Spectrum& b, double cb) {
  Spectrum out(a.grid(), a.rank());
  auto o = out.coefficients();
  auto x = a.coefficients();
  auto y = b.coefficients();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = ca * x[i] + cb * y[i];
  return out;
}

}  // namespace

double energy(const PeriodicField& u) {
  require_vector(u, "energy");
  double sum = 0.0;
  for (double v : u.values()) sum += v * v;
  return 0.5 * sum * u.grid().cell_volume();
}

double helicity(const PeriodicField& u) {
  require_vector(u, "helicity");
  return inner_product(u, curl(u));
}

double helicity_dual(const PeriodicField& u, bool* mean_dropped) {
  require_vector(u, "helicity_dual");
  if (mean_dropped != nullptr) {
    double scale = 0.0;
    for (double v : u.values()) scale = std::max(scale, std::abs(v));
    bool nonzero = false;
    for (double m : component_means(u)) nonzero = nonzero || std::abs(m) > 1e-13 * scale;
    *mean_dropped = nonzero;
  }
  const PeriodicField left = fractional_laplacian(u, 0.25);
  const PeriodicField right = fractional_laplacian(curl(u), -0.25);
  return inner_product(left, right);
}

double helicity_mollified(const PeriodicField& u, double delta) {
  require_vector(u, "helicity_mollified");
  const Mollifier m(u.grid(), delta);
  const Spectrum ud = m.apply(u.spectrum());
  return inner_product(PeriodicField(ud), PeriodicField(curl(ud)));
}

double helicity_flux(const PeriodicField& u, double delta) { return delta_diagnostics(u, delta, {}).flux; }

const std::vector<ConjugatePair>& conjugate_pair_menu() {
  static const std::vector<ConjugatePair> menu = {
      {1.0, infinity}, {infinity, 1.0}, {1.2, 6.0}, {6.0, 1.2}, {1.5, 3.0}, {3.0, 1.5}, {2.0, 2.0},
  };
  return menu;
}

void check_conjugate_pair(const ConjugatePair& pair) {
  for (const auto& entry : conjugate_pair_menu()) {
    if (entry == pair) return;
  }
  throw Error(ErrorCode::out_of_range, "exponent pair (" + std::to_string(pair.p) + ", " + std::to_string(pair.q) +
                                           ") is not on the conjugate menu");
}

ChainValue helicity_chain(const PeriodicField& u, double delta, ConjugatePair pair) {
  const DeltaDiagnostics d = delta_diagnostics(u, delta, {pair});
  return {d.flux, d.chain_rhs.front()};
}

DeltaDiagnostics delta_diagnostics(const PeriodicField& u, double delta, const std::vector<ConjugatePair>& pairs) {
  require_vector(u, "helicity flux");
  for (const auto& pair : pairs) check_conjugate_pair(pair);
  if (!is_solenoidal(u)) throw Error(ErrorCode::precondition, "helicity flux needs a divergence-free velocity");

  const Mollifier m(u.grid(), delta);
  const Spectrum& us = u.spectrum();
  const Spectrum ud = m.apply(us);
  const Spectrum wd = curl(ud);
  const Spectrum stress = combine(dealiased_product(ud, ud, ProductKind::tensor), 1.0,
                                  m.apply(dealiased_product(us, us, ProductKind::tensor)), -1.0);
  const PeriodicField grad_w(gradient(wd));
  const PeriodicField reynolds(stress);

  DeltaDiagnostics out;
  out.delta = delta;
  out.helicity = inner_product(PeriodicField(ud), PeriodicField(wd));
  out.flux = -2.0 * inner_product(grad_w, reynolds);
  for (const auto& pair : pairs) out.chain_rhs.push_back(2.0 * lp_norm(grad_w, pair.q) * lp_norm(reynolds, pair.p));
  return out;
}

HelicityReport diagnose(const PeriodicField& u, const std::vector<double>& deltas,
                        const std::vector<ConjugatePair>& pairs) {
  require_vector(u, "diagnose");
  HelicityReport report;
  report.helicity_direct = helicity(u);
  report.helicity_dual = helicity_dual(u, &report.mean_dropped);
  report.energy = energy(u);
  report.pairs = pairs;
  report.per_delta.resize(deltas.size());
  (void)u.spectrum();
  parallel_for(deltas.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) report.per_delta[i] = delta_diagnostics(u, deltas[i], pairs);
  });
  return report;
}

IdentityResiduals smooth_identity_residuals(const PeriodicField& u, const PeriodicField& p) {
  require_vector(u, "smooth_identity_residuals");
  if (p.rank() != Rank::scalar) throw Error(ErrorCode::unsupported_rank, "pressure must be a scalar field");
  if (!(u.grid() == p.grid())) throw Error(ErrorCode::grid_mismatch, "smooth_identity_residuals: grid mismatch");
  const Spectrum& us = u.spectrum();
  const Spectrum& ps = p.spectrum();
  const Spectrum ws = curl(us);
  IdentityResiduals out;

  {
    const Spectrum a = dot(ws, advect(us, us));
    const Spectrum b = dot(us, advect(us, ws));
    const Spectrum c = divergence(dealiased_product(dot(us, ws), us, ProductKind::scalar));
    out.residual[0] = l2(combine(combine(a, 1.0, b, 1.0), 1.0, c, -1.0));
    out.scale[0] = l2(a) + l2(b) + l2(c);
  }
  {
    const Spectrum a = dot(us, advect(ws, us));
    const Spectrum b = divergence(dealiased_product(dot(us, us), ws, ProductKind::scalar));
    out.residual[1] = l2(combine(a, 1.0, b, -0.5));
    out.scale[1] = l2(a) + 0.5 * l2(b);
  }
  {
    const Spectrum a = dot(ws, gradient(ps));
    const Spectrum b = divergence(dealiased_product(ps, ws, ProductKind::scalar));
    out.residual[2] = l2(combine(a, 1.0, b, -1.0));
    out.scale[2] = l2(a) + l2(b);
  }
  return out;
}

PeriodicField solve_pressure(const PeriodicField& u) {
  require_vector(u, "solve_pressure");
  const Spectrum& us = u.spectrum();
  const Spectrum source = divergence(divergence(dealiased_product(us, us, ProductKind::tensor)));
  return PeriodicField(fractional_laplacian(source, -1.0));
}

}  // namespace helab
