#pragma once

// Gauge weight Phi_{k'}(f, t), the cancellation identity it is built for, and
// the gauged energies.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "torus3/equation.hpp"
#include "torus3/spectral.hpp"

namespace torus3 {

struct GaugeContext {
  SobolevIndex k_prime;
  double t = 0.0;
  TorusFunction a3;       ///< dF/dw3 along f
  TorusFunction phi;      ///< |a3|^{(2k'-15)/6} exp(int_0^x (P/a3 - [P/a3]_ave) / 3)
  TorusFunction phi_inv;  ///< built independently as the reciprocal weight
  TorusFunction p_field;
  TorusFunction q_field;
  double resonance_average = 0.0;  ///< [P/a3]_ave
  std::uint64_t source_fingerprint = 0;
};

/// Throws DegenerateDispersion when inf|dF/dw3| <= kDeltaTolerance.
GaugeContext build_gauge(const Equation& eq, const TorusFunction& f, double t, SobolevIndex k_prime);

struct IdentityResidual {
  double absolute = 0.0;  ///< sup_x |lhs - Q|
  double relative = 0.0;  ///< absolute / (|P|_inf + |Q|_inf), or absolute when both vanish
};

/// Residual of  (k' - 15/2) a3' + 3 Phi (Phi^{-1})' a3 + P = Q.
IdentityResidual crucial_identity_residual(const Equation& eq, const TorusFunction& f, double t,
                                           SobolevIndex k_prime);
IdentityResidual crucial_identity_residual(const GaugeContext& ctx);

/// max(k' - 3, 9/2 + eta): the index of the undifferentiated part of the energy.
SobolevIndex energy_low_index(SobolevIndex k_prime, double eta = kDefaultEta);

/// |Phi(f) d^6 f - Phi(g) d^6 g|^2_{H^{k'-6}} + |f - g|^2_{H^{max(k'-3, 9/2+)}}.
///
/// When g is identically zero the Phi(g) term is dropped rather than
/// evaluated, so equations that degenerate at u = 0 still have an energy.
double energy_diff(const Equation& eq, const TorusFunction& f, const TorusFunction& g, double t,
                   SobolevIndex k_prime);
/// energy_diff(eq, f, 0, t, k').
double energy(const Equation& eq, const TorusFunction& f, double t, SobolevIndex k_prime);

struct NormEquivalence {
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  std::size_t used = 0;
  std::size_t skipped = 0;  ///< identical pairs
};

/// Extremal E(f,g)/|f-g|^2_{H^{k'}} over the pairs.  Every segment
/// theta f + (1-theta) g, theta in {0, 0.1, ..., 1}, must be nondegenerate;
/// otherwise DegenerateDispersion names the pair and theta.
NormEquivalence norm_equivalence_report(const Equation& eq,
                                        const std::vector<std::pair<TorusFunction, TorusFunction>>& pairs,
                                        double t, SobolevIndex k_prime);

}  // namespace torus3
