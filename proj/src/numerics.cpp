#include "cuspspectra/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <thread>

#include "cuspspectra/errors.hpp"

namespace cusp {

double erf_integral(double s) {
  // erf(s) = (2/sqrt(pi)) * \int_0^s exp(-v^2) dv, hence the factor here.
  return 0.5 * std::sqrt(std::numbers::pi) * std::erf(s);
}

namespace {

// Kronrod 15-point abscissae on [0,1] side (symmetric) with the embedded
// 7-point Gauss rule at the odd indices. QUADPACK dqk15 constants.
constexpr double kXgk[8] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
    0.7415311855993944, 0.5860872354676911, 0.4058451513773972,
    0.2077849550078985, 0.0};
constexpr double kWgk[8] = {
    0.02293532201052922, 0.06309209262997855, 0.10479001032225018,
    0.14065325971552592, 0.16900472663926790, 0.19035057806478542,
    0.20443294007529889, 0.20948214108472783};
constexpr double kWg[4] = {0.12948496616886969, 0.27970539148927664,
                           0.38183005050511894, 0.41795918367346939};

template <typename Value>
struct Panel {
  double lo, hi;
  Value value;
  double error;
};

template <typename Value, typename F>
Panel<Value> evaluate_panel(const F& f, double lo, double hi) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  Value kronrod{};
  Value gauss{};
  const Value fc = f(center);
  kronrod += kWgk[7] * fc;
  gauss += kWg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const Value fsum = f(center - half * kXgk[j]) + f(center + half * kXgk[j]);
    kronrod += kWgk[j] * fsum;
    if (j % 2 == 1) gauss += kWg[j / 2] * fsum;
  }
  const double err = std::abs(kronrod - gauss) * half;
  return {lo, hi, kronrod * half, err};
}

template <typename Value>
Value compensated_total(std::vector<Panel<Value>>& panels, double* error_out) {
  std::sort(panels.begin(), panels.end(),
            [](const Panel<Value>& a, const Panel<Value>& b) { return a.lo < b.lo; });
  CompensatedSum err;
  if constexpr (std::is_same_v<Value, double>) {
    CompensatedSum total;
    for (const auto& p : panels) {
      total.add(p.value);
      err.add(p.error);
    }
    *error_out = err.value();
    return total.value();
  } else {
    CompensatedSum re, im;
    for (const auto& p : panels) {
      re.add(p.value.real());
      im.add(p.value.imag());
      err.add(p.error);
    }
    *error_out = err.value();
    return Value(re.value(), im.value());
  }
}

template <typename Value, typename F>
QuadratureOutcome<Value> integrate_impl(const F& f, double lo, double hi,
                                        const QuadratureOptions& opts) {
  if (!(lo <= hi)) throw std::domain_error("integrate: reversed interval");
  if (lo == hi) return {Value{}, 0.0, 0};

  std::vector<Panel<Value>> panels;
  panels.reserve(64);
  panels.push_back(evaluate_panel<Value>(f, lo, hi));

  auto total_error = [&panels]() {
    double e = 0;
    for (const auto& p : panels) e += p.error;
    return e;
  };
  auto total_mag = [&panels]() {
    double v = 0;
    for (const auto& p : panels) v += std::abs(p.value);
    return v;
  };

  while (static_cast<int>(panels.size()) < opts.max_panels) {
    const double err = total_error();
    const double goal = std::max(opts.abs_tol, opts.rel_tol * total_mag());
    if (err <= goal) break;
    // Worst panel first; ties broken by left endpoint for determinism.
    size_t worst = 0;
    for (size_t i = 1; i < panels.size(); ++i) {
      if (panels[i].error > panels[worst].error ||
          (panels[i].error == panels[worst].error &&
           panels[i].lo < panels[worst].lo))
        worst = i;
    }
    const Panel<Value> p = panels[worst];
    const double mid = 0.5 * (p.lo + p.hi);
    if (mid <= p.lo || mid >= p.hi) break;  // interval at rounding resolution
    panels[worst] = evaluate_panel<Value>(f, p.lo, mid);
    panels.push_back(evaluate_panel<Value>(f, mid, p.hi));
  }

  double achieved = 0;
  Value total = compensated_total(panels, &achieved);
  const double goal = std::max(opts.abs_tol, opts.rel_tol * std::abs(total));
  if (achieved > goal && static_cast<int>(panels.size()) >= opts.max_panels)
    throw ConvergenceError("integrate: panel budget exhausted", achieved);
  return {total, achieved, static_cast<int>(panels.size())};
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double lo,
                           double hi, const QuadratureOptions& opts) {
  return integrate_impl<double>(f, lo, hi, opts);
}

ComplexQuadratureResult integrate_complex(
    const std::function<std::complex<double>(double)>& f, double lo, double hi,
    const QuadratureOptions& opts) {
  return integrate_impl<std::complex<double>>(f, lo, hi, opts);
}

namespace {

// Lanczos approximation, g = 7, 9 terms. Relative accuracy ~1e-13 near the
// real axis, which covers every use here (real s plus small imaginary
// perturbations).
constexpr double kLanczos[9] = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

std::complex<double> log_gamma_core(std::complex<double> z) {
  // Valid for Re z >= 0.5.
  z -= 1.0;
  std::complex<double> a = kLanczos[0];
  for (int i = 1; i < 9; ++i) a += kLanczos[i] / (z + static_cast<double>(i));
  const std::complex<double> t = z + 7.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t +
         std::log(a);
}

}  // namespace

std::complex<double> log_gamma(std::complex<double> z) {
  if (z.real() >= 0.5) return log_gamma_core(z);
  // Reflection. Principal logs are fine near the real axis.
  const std::complex<double> pi = std::numbers::pi;
  return std::log(pi / std::sin(pi * z)) - log_gamma_core(1.0 - z);
}

std::complex<double> reciprocal_gamma(std::complex<double> z) {
  if (z.real() >= 0.5) return std::exp(-log_gamma_core(z));
  // 1/Gamma(z) = sin(pi z) Gamma(1-z) / pi is entire and vanishes at the
  // poles of Gamma without any cancellation.
  const double pi = std::numbers::pi;
  return std::sin(pi * z) * std::exp(log_gamma_core(1.0 - z)) / pi;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::domain_error("fit_line: need at least two paired samples");
  const double n = static_cast<double>(x.size());
  CompensatedSum sx, sy;
  for (size_t i = 0; i < x.size(); ++i) {
    sx.add(x[i]);
    sy.add(y[i]);
  }
  const double mx = sx.value() / n;
  const double my = sy.value() / n;
  CompensatedSum sxx, sxy;
  for (size_t i = 0; i < x.size(); ++i) {
    sxx.add((x[i] - mx) * (x[i] - mx));
    sxy.add((x[i] - mx) * (y[i] - my));
  }
  if (sxx.value() == 0.0)
    throw std::domain_error("fit_line: degenerate abscissae");
  LineFit fit;
  fit.slope = sxy.value() / sxx.value();
  fit.intercept = my - fit.slope * mx;
  for (size_t i = 0; i < x.size(); ++i)
    fit.max_abs_residual = std::max(
        fit.max_abs_residual, std::abs(y[i] - fit.slope * x[i] - fit.intercept));
  return fit;
}

std::string repr17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void parallel_for(int n, int threads, const std::function<void(int, int)>& fn) {
  if (n <= 0) return;
  threads = std::max(1, threads);
  if (threads == 1 || n < 2 * threads) {
    fn(0, n);
    return;
  }
  const int chunk = (n + threads - 1) / threads;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    const int begin = t * chunk;
    const int end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&fn, begin, end]() { fn(begin, end); });
  }
  for (auto& th : pool) th.join();
}

}  // namespace cusp
