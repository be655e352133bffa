#pragma once

#include <complex>
#include <iosfwd>

#include "cuspspectra/trace_expansion.hpp"

namespace cusp {

// Residues of the Mellin integral int_0^inf t^{s-1}(R(t)-h) dt (that is, of
// Gamma(s)*zeta(s)): a0/(s-1), a10/(s-1/2), -a11/(s-1/2)^2, (a2-h)/s. These
// are intrinsic; the split point does not move them.
struct PolePart {
  double residue_at_one = 0.0;      //  a0
  double residue_at_half = 0.0;     //  a10
  double double_pole_at_half = 0.0; // -a11
  double residue_at_zero = 0.0;     //  a2 - h
};

struct ZetaDiagnostics {
  double small_t_quad_error = 0.0;  // regularized integral below the split
  double large_t_quad_error = 0.0;  // tail integral above the split
  double zeta_prime_analytic = 0.0;
  double zeta_prime_fd = 0.0;       // central differences across s = 0
  double method_gap = 0.0;          // |analytic - fd|
  double remainder_ratio = 0.0;     // max sampled |theta(t)|/sqrt(t)
};

struct ZetaResult {
  double zeta_prime_at_zero = 0.0;
  double determinant = 1.0;  // exp(-zeta_prime_at_zero), kept consistent
  PolePart pole_part;
  ZetaDiagnostics diagnostics;
};

struct ZetaOptions {
  double split_point = 1.0;     // where the Mellin integral is cut in two
  double quad_rel_tol = 1e-12;
  double method_tol = 1e-6;     // allowed gap between the two zeta'(0) routes
  double fd_step = 1e-2;        // Richardson pair (step, step/2)
  double remainder_bound = 0.0; // 0: derived from the coefficient scale
  int max_panels = 6000;
};

// Direct Mellin integral (1/Gamma(s)) int_0^inf t^{s-1}(R(t)-h) dt for
// Re(s) > 1, adaptive quadrature split at the configured point.
std::complex<double> relative_zeta(const RelativeTrace& trace,
                                   std::complex<double> s,
                                   const ZetaOptions& opts = {});

// Meromorphic continuation to Re(s) > -1/2 minus the poles {1, 1/2}: the
// divergent part of the small-time integral is replaced by its closed form
// and the remainder theta(t) = R(t) - (a0/t + (a10+a11 log t)/sqrt t + a2)
// is integrated directly (it is O(sqrt t) when the declared coefficients are
// honest; the remainder check raises ModelMismatchError otherwise).
std::complex<double> relative_zeta_continued(const RelativeTrace& trace,
                                             std::complex<double> s,
                                             const ZetaOptions& opts = {});

// zeta'(0) computed two independent ways (symbolic expansion at s = 0 and
// central finite differences of the continuation) plus the determinant
// exp(-zeta'(0)). Disagreement beyond method_tol raises MethodDisagreement
// carrying both values.
ZetaResult zeta_prime_zero(const RelativeTrace& trace,
                           const ZetaOptions& opts = {});

double relative_determinant(const RelativeTrace& trace,
                            const ZetaOptions& opts = {});

// {"zeta_prime_0":..., "determinant":..., "diagnostics":{...}} with stable
// keys and 17 significant digits.
void write_zeta_json(std::ostream& os, const ZetaResult& result);

}  // namespace cusp
