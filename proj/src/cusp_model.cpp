#include "cuspspectra/cusp_model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cuspspectra/errors.hpp"

namespace cusp {

namespace {

void require_time(double t) {
  if (!(t > 0.0)) throw std::domain_error("model cusp: time must be positive");
}

void require_base(double a) {
  if (!(a >= 1.0))
    throw std::domain_error("model cusp: base height must be >= 1");
}

}  // namespace

ModelCuspPair::ModelCuspPair(double a_, CuspDomain domain_)
    : a(a_), domain(domain_) {
  require_base(a);
}

MultiCuspModel::MultiCuspModel(std::vector<double> starts_)
    : starts(std::move(starts_)) {
  if (starts.empty())
    throw std::domain_error("multi cusp model: need at least one cusp");
  for (double a : starts) require_base(a);
}

double model_heat_kernel(double a, double y, double yp, double t) {
  require_time(t);
  require_base(a);
  if (!(y > 0.0) || !(yp > 0.0))
    throw std::domain_error("model cusp: heights must be positive");
  if (y <= a || yp <= a) return 0.0;
  const double pref = std::exp(-t / 4.0) / std::sqrt(4.0 * std::numbers::pi * t);
  const double direct = std::log(y / yp);
  // Dirichlet image charge: reflect y' across the base height in the
  // logarithmic coordinate, log(y*y'/a^2).
  const double image = std::log(y * yp) - 2.0 * std::log(a);
  return pref * std::sqrt(y * yp) *
         (std::exp(-direct * direct / (4.0 * t)) -
          std::exp(-image * image / (4.0 * t)));
}

double relative_trace_exact(const ModelCuspPair& pair, double t) {
  require_time(t);
  if (pair.a == 1.0) return 0.0;  // identical operators
  const double pref = std::exp(-t / 4.0) / std::sqrt(4.0 * std::numbers::pi);
  const double la = std::log(pair.a);
  switch (pair.domain) {
    case CuspDomain::full_half_line:
      return -pref / std::sqrt(t) * la;
    case CuspDomain::restricted:
      return -pref * erf_integral(la / std::sqrt(t));
  }
  throw std::logic_error("relative_trace_exact: unknown domain");
}

double relative_trace_quadrature(const ModelCuspPair& pair, double t,
                                 double tol) {
  require_time(t);
  if (!(tol > 0.0))
    throw std::domain_error("relative_trace_quadrature: tolerance must be positive");
  if (pair.a == 1.0) return 0.0;

  const double a = pair.a;
  const double la = std::log(a);
  // Diagonal difference against the measure, in the substitution u = log y:
  // (p_a - p_1)(y, y, t) y^-2 dy = [p_a - p_1](e^u, e^u, t) e^-u du.
  auto integrand = [a, t](double u) {
    const double y = std::exp(u);
    return (model_heat_kernel(a, y, y, t) - model_heat_kernel(1.0, y, y, t)) /
           y;
  };

  // Beyond the base height both kernel terms differ by Gaussians
  // exp(-u^2/t) and exp(-(u - log a)^2/t); cut where the slower one has
  // fallen below tol/100 of its peak:
  //   exp(-(U - log a)^2 / t) <= tol/100  =>  U = log a + sqrt(t log(100/tol)).
  const double cut = la + std::sqrt(t * std::log(100.0 / tol));

  QuadratureOptions opts;
  opts.rel_tol = tol * 0.1;
  opts.abs_tol = 1e-300;  // the relative goal governs
  opts.max_panels = 8000;

  const double lo = (pair.domain == CuspDomain::full_half_line) ? 0.0 : la;
  // Split at the base height: the integrand is only C^0 there on the full
  // half-line, and the pieces are smooth.
  double total = 0.0;
  if (lo < la) total += integrate(integrand, lo, la, opts).value;
  total += integrate(integrand, la, cut, opts).value;
  return total;
}

double multi_cusp_trace(const MultiCuspModel& model, double t) {
  require_time(t);
  CompensatedSum sum;
  for (double a : model.starts)
    sum.add(relative_trace_exact({a, CuspDomain::full_half_line}, t));
  return sum.value();
}

}  // namespace cusp
