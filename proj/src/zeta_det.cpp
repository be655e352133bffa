#include "cuspspectra/zeta_det.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include "cuspspectra/errors.hpp"
#include "cuspspectra/numerics.hpp"

namespace cusp {

namespace {

using Cplx = std::complex<double>;

double theta_remainder(const RelativeTrace& trace, double t) {
  // R - h - [a0/t + (a10 + a11 log t)/sqrt t + (a2 - h)]; the offsets cancel.
  if (trace.small_t_remainder) return trace.small_t_remainder(t);
  return trace.eval(t) - eval_expansion(trace.coeffs, t);
}

double coefficient_scale(const RelativeTrace& trace) {
  const auto& c = trace.coeffs;
  const double h = static_cast<double>(trace.kernel_offset);
  return std::max({1.0, std::abs(c.a0), std::abs(c.a10), std::abs(c.a11),
                   std::abs(c.a2 - h)});
}

// Empirical O(sqrt t) check below the split. Returns the worst sampled
// |theta|/sqrt(t); throws when it exceeds the configured bound.
double check_remainder(const RelativeTrace& trace, const ZetaOptions& opts) {
  const double bound = opts.remainder_bound > 0.0
                           ? opts.remainder_bound
                           : 100.0 * coefficient_scale(trace);
  const double hi = opts.split_point;
  const double lo = 1e-8 * hi;
  double worst_ratio = 0.0;
  double worst_t = lo;
  constexpr int kProbes = 33;
  for (int i = 0; i < kProbes; ++i) {
    const double t =
        lo * std::pow(hi / lo, static_cast<double>(i) / (kProbes - 1));
    const double ratio = std::abs(theta_remainder(trace, t)) / std::sqrt(t);
    if (ratio > worst_ratio) {
      worst_ratio = ratio;
      worst_t = t;
    }
  }
  if (worst_ratio > bound)
    throw ModelMismatchError(
        "zeta: remainder after subtracting the declared expansion is not "
        "O(sqrt t); worst t = " +
            std::to_string(worst_t),
        worst_t);
  return worst_ratio;
}

// Truncation height for integrals of exp(-rate*u) tails: beyond it the
// integrand is below 1e-18 of its scale.
double tail_cut(double rate) {
  return std::clamp(42.0 / rate, 10.0, 2000.0);
}

struct TailIntegral {
  Cplx value;
  double error;
};

// int_{t0}^T t^{s-1} (R(t)-h) dt with T chosen by probing the decay.
TailIntegral upper_mellin(const RelativeTrace& trace, Cplx s,
                          const ZetaOptions& opts) {
  const double h = static_cast<double>(trace.kernel_offset);
  const double t0 = opts.split_point;

  auto weight = [&](double t) {
    return std::abs(trace.eval(t) - h) * std::pow(t, s.real() - 1.0);
  };
  const double base = weight(t0);
  if (base == 0.0) {
    // Plateau probe: R == h beyond the split within representable range.
    bool flat = true;
    for (double t : {2.0 * t0, 4.0 * t0, 8.0 * t0})
      if (weight(t) != 0.0) flat = false;
    if (flat) return {Cplx(0.0), 0.0};
  }
  if (!(trace.decay_rate > 0.0))
    throw ModelMismatchError(
        "zeta: trace does not decay toward its kernel offset (decay_rate <= "
        "0)",
        t0);

  double T = t0 + tail_cut(trace.decay_rate);
  const double floor = std::max(base, 1e-30) * 1e-18;
  while (weight(T) > floor && T < 1e6) T *= 2.0;

  QuadratureOptions qopts;
  qopts.rel_tol = opts.quad_rel_tol;
  qopts.abs_tol = 1e-300;
  qopts.max_panels = opts.max_panels;
  auto f = [&trace, s, h](double t) -> Cplx {
    return std::pow(Cplx(t), s - Cplx(1.0)) * (trace.eval(t) - h);
  };
  const auto r = integrate_complex(f, t0, T, qopts);
  return {r.value, r.error};
}

// int_0^{t0} t^{s-1} theta(t) dt via t = t0 exp(-u); converges for
// Re(s) > -1/2 because theta is O(sqrt t).
TailIntegral lower_regularized(const RelativeTrace& trace, Cplx s,
                               const ZetaOptions& opts) {
  const double t0 = opts.split_point;
  if (!(s.real() > -0.5))
    throw std::domain_error("zeta continuation: Re(s) must exceed -1/2");
  const double cut = tail_cut(s.real() + 0.5);
  QuadratureOptions qopts;
  qopts.rel_tol = opts.quad_rel_tol;
  qopts.abs_tol = 1e-300;
  qopts.max_panels = opts.max_panels;
  auto f = [&trace, s, t0](double u) -> Cplx {
    const double t = t0 * std::exp(-u);
    return std::exp(-s * u) * theta_remainder(trace, t);
  };
  const auto r = integrate_complex(f, 0.0, cut, qopts);
  return {std::pow(Cplx(t0), s) * r.value, r.error * std::pow(t0, s.real())};
}

// int_0^{t0} t^{s-1} (R(t)-h) dt for Re(s) > 1, same substitution. The
// integrand grows like a0 e^{(1-s)u} toward u = inf, so the cut is set by
// the slowest surviving exponent.
TailIntegral lower_direct(const RelativeTrace& trace, Cplx s,
                          const ZetaOptions& opts) {
  const double t0 = opts.split_point;
  const double h = static_cast<double>(trace.kernel_offset);
  const double slowest =
      (trace.coeffs.a0 != 0.0) ? s.real() - 1.0 : s.real() - 0.5;
  const double cut = tail_cut(slowest);
  QuadratureOptions qopts;
  qopts.rel_tol = opts.quad_rel_tol;
  qopts.abs_tol = 1e-300;
  qopts.max_panels = opts.max_panels;
  auto f = [&trace, s, t0, h](double u) -> Cplx {
    const double t = t0 * std::exp(-u);
    return std::exp(-s * u) * (trace.eval(t) - h);
  };
  const auto r = integrate_complex(f, 0.0, cut, qopts);
  return {std::pow(Cplx(t0), s) * r.value, r.error * std::pow(t0, s.real())};
}

}  // namespace

std::complex<double> relative_zeta(const RelativeTrace& trace, Cplx s,
                                   const ZetaOptions& opts) {
  if (!(s.real() > 1.0))
    throw std::domain_error("relative_zeta: direct branch needs Re(s) > 1");
  const TailIntegral lower = lower_direct(trace, s, opts);
  const TailIntegral upper = upper_mellin(trace, s, opts);
  return reciprocal_gamma(s) * (lower.value + upper.value);
}

std::complex<double> relative_zeta_continued(const RelativeTrace& trace,
                                             Cplx s, const ZetaOptions& opts) {
  if (std::abs(s - Cplx(1.0)) < 1e-12 || std::abs(s - Cplx(0.5)) < 1e-12)
    throw std::domain_error("relative_zeta_continued: s is a pole");
  check_remainder(trace, opts);

  const double t0 = opts.split_point;
  const auto& c = trace.coeffs;
  const double h = static_cast<double>(trace.kernel_offset);
  const TailIntegral lower = lower_regularized(trace, s, opts);
  const TailIntegral upper = upper_mellin(trace, s, opts);

  // Gamma(s) zeta(s) = a0 t0^{s-1}/(s-1) + a10 t0^{s-1/2}/(s-1/2)
  //                  + a11 t0^{s-1/2} (log t0/(s-1/2) - 1/(s-1/2)^2)
  //                  + (a2-h) t0^s / s + I1(s) + I2(s).
  // Multiplying by 1/Gamma(s) = s/Gamma(s+1) keeps the s = 0 limit explicit:
  // the only term without the factor s is (a2-h) t0^s / Gamma(s+1).
  const Cplx sm1 = s - Cplx(1.0);
  const Cplx smh = s - Cplx(0.5);
  const Cplx pole_block =
      c.a0 * std::pow(Cplx(t0), sm1) / sm1 +
      std::pow(Cplx(t0), smh) *
          (c.a10 / smh + c.a11 * (std::log(t0) / smh - 1.0 / (smh * smh)));
  const Cplx regular = lower.value + upper.value;
  return reciprocal_gamma(s + Cplx(1.0)) *
         (s * (pole_block + regular) + (c.a2 - h) * std::pow(Cplx(t0), s));
}

ZetaResult zeta_prime_zero(const RelativeTrace& trace,
                           const ZetaOptions& opts) {
  ZetaResult out;
  const auto& c = trace.coeffs;
  const double h = static_cast<double>(trace.kernel_offset);
  const double t0 = opts.split_point;

  out.pole_part = {c.a0, c.a10, -c.a11, c.a2 - h};
  out.diagnostics.remainder_ratio = check_remainder(trace, opts);

  const TailIntegral lower = lower_regularized(trace, Cplx(0.0), opts);
  const TailIntegral upper = upper_mellin(trace, Cplx(0.0), opts);
  out.diagnostics.small_t_quad_error = lower.error;
  out.diagnostics.large_t_quad_error = upper.error;

  // Differentiate zeta(s) = (s p(s) + (a2-h) t0^s) / Gamma(s+1) at s = 0,
  // where p collects the pole block and the two regular integrals. With
  // 1/Gamma(1+s) = 1 + gamma s + O(s^2):
  //   zeta(0)  = a2 - h,
  //   zeta'(0) = gamma (a2-h) + (a2-h) log t0 + p(0),
  // and evaluating the pole block at s = 0 gives
  //   p(0) = -a0/t0 - (2 a10 + a11 (2 log t0 + 4))/sqrt(t0) + I1(0) + I2(0).
  const double lt0 = std::log(t0);
  const double pole_at_zero =
      -c.a0 / t0 - (2.0 * c.a10 + c.a11 * (2.0 * lt0 + 4.0)) / std::sqrt(t0);
  const double analytic = euler_gamma * (c.a2 - h) + (c.a2 - h) * lt0 +
                          pole_at_zero + lower.value.real() +
                          upper.value.real();

  // Independent route: Richardson-extrapolated central differences of the
  // continuation across s = 0.
  auto d = [&](double eps) {
    const Cplx plus = relative_zeta_continued(trace, Cplx(eps), opts);
    const Cplx minus = relative_zeta_continued(trace, Cplx(-eps), opts);
    return (plus.real() - minus.real()) / (2.0 * eps);
  };
  const double e = opts.fd_step;
  const double fd = (4.0 * d(e / 2.0) - d(e)) / 3.0;

  out.diagnostics.zeta_prime_analytic = analytic;
  out.diagnostics.zeta_prime_fd = fd;
  out.diagnostics.method_gap = std::abs(analytic - fd);
  if (out.diagnostics.method_gap > opts.method_tol)
    throw MethodDisagreement(
        "zeta'(0): symbolic and finite-difference routes disagree", analytic,
        fd);

  out.zeta_prime_at_zero = analytic;
  out.determinant = std::exp(-analytic);
  return out;
}

double relative_determinant(const RelativeTrace& trace,
                            const ZetaOptions& opts) {
  return zeta_prime_zero(trace, opts).determinant;
}

void write_zeta_json(std::ostream& os, const ZetaResult& r) {
  os << "{\n";
  os << "  \"zeta_prime_0\": " << repr17(r.zeta_prime_at_zero) << ",\n";
  os << "  \"determinant\": " << repr17(r.determinant) << ",\n";
  os << "  \"diagnostics\": {\n";
  os << "    \"small_t_quad_error\": " << repr17(r.diagnostics.small_t_quad_error)
     << ",\n";
  os << "    \"large_t_quad_error\": " << repr17(r.diagnostics.large_t_quad_error)
     << ",\n";
  os << "    \"zeta_prime_analytic\": "
     << repr17(r.diagnostics.zeta_prime_analytic) << ",\n";
  os << "    \"zeta_prime_fd\": " << repr17(r.diagnostics.zeta_prime_fd) << ",\n";
  os << "    \"method_gap\": " << repr17(r.diagnostics.method_gap) << ",\n";
  os << "    \"remainder_ratio\": " << repr17(r.diagnostics.remainder_ratio)
     << ",\n";
  os << "    \"residue_at_one\": " << repr17(r.pole_part.residue_at_one) << ",\n";
  os << "    \"residue_at_half\": " << repr17(r.pole_part.residue_at_half)
     << ",\n";
  os << "    \"double_pole_at_half\": "
     << repr17(r.pole_part.double_pole_at_half) << ",\n";
  os << "    \"residue_at_zero\": " << repr17(r.pole_part.residue_at_zero)
     << "\n";
  os << "  }\n";
  os << "}\n";
}

}  // namespace cusp
