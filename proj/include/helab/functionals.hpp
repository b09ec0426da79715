#pragma once

#include <array>
#include <vector>

#include "helab/field.hpp"

namespace helab {

/// (1/2) h^3 sum |u|^2.
double energy(const PeriodicField& u);

/// h^3 sum u . curl u.
double helicity(const PeriodicField& u);

/// h^3 sum ((-Delta)^{1/4} u) . ((-Delta)^{-1/4} curl u). A nonzero mean of u
/// is dropped; mean_dropped reports it.
double helicity_dual(const PeriodicField& u, bool* mean_dropped = nullptr);

/// h^3 sum u_delta . omega_delta, omega = curl u.
double helicity_mollified(const PeriodicField& u, double delta);

/// -2 h^3 sum grad(omega_delta) : R_delta. u must be solenoidal.
double helicity_flux(const PeriodicField& u, double delta);

/// Conjugate exponents 1/p + 1/q = 1; p applies to R_delta, q to grad omega_delta.
struct ConjugatePair {
  double p;
  double q;
  friend bool operator==(const ConjugatePair&, const ConjugatePair&) = default;
};

/// (1,inf), (6/5,6), (3/2,3), (2,2) and their swaps.
const std::vector<ConjugatePair>& conjugate_pair_menu();
/// Throws out_of_range unless the pair is on the menu.
void check_conjugate_pair(const ConjugatePair& pair);

struct ChainValue {
  double flux;
  double rhs;  ///< 2 ||grad omega_delta||_q ||R_delta||_p
};

ChainValue helicity_chain(const PeriodicField& u, double delta, ConjugatePair pair);

struct DeltaDiagnostics {
  double delta;
  double helicity;  ///< H_delta
  double flux;
  std::vector<double> chain_rhs;  ///< one per configured pair
};

struct HelicityReport {
  double helicity_direct;
  double helicity_dual;
  double energy;
  bool mean_dropped;
  std::vector<ConjugatePair> pairs;
  std::vector<DeltaDiagnostics> per_delta;
};

/// Full report; the mollified quantities are evaluated for each delta in
/// parallel. Flux entries need a solenoidal u.
HelicityReport diagnose(const PeriodicField& u, const std::vector<double>& deltas,
                        const std::vector<ConjugatePair>& pairs);

/// Mollified-helicity quantities at one radius, sharing the mollified fields.
DeltaDiagnostics delta_diagnostics(const PeriodicField& u, double delta, const std::vector<ConjugatePair>& pairs);

/// L2 norms of the pointwise residuals of
///   (i)   w.(u.grad)u + u.(u.grad)w - div(u (u.w))
///   (ii)  u.(w.grad)u - div(|u|^2 w)/2
///   (iii) w.grad p - div(p w)
/// with w = curl u, plus the summed L2 norms of the terms as scales. Products
/// are dealiased; they are exact when 3 kmax < N/2.
struct IdentityResiduals {
  std::array<double, 3> residual{};
  std::array<double, 3> scale{};
};
IdentityResiduals smooth_identity_residuals(const PeriodicField& u, const PeriodicField& p);

/// Mean-free p with Delta p + div div(u (x) u) = 0.
PeriodicField solve_pressure(const PeriodicField& u);

}  // namespace helab
