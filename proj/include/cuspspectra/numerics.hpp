#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace cusp {

inline constexpr double euler_gamma = 0.57721566490153286060651209008240243;

// Integral form of the error function, \int_0^s exp(-v^2) dv, without the
// usual 2/sqrt(pi) normalization. This is the single conversion point from
// the standard library convention; everything downstream uses this one.
double erf_integral(double s);

// Neumaier-compensated accumulator. Needed wherever many panel or per-site
// contributions of mixed magnitude are summed and the total is near a
// cancellation (surface integrals, quadrature panel sums).
class CompensatedSum {
public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct QuadratureOptions {
  double rel_tol = 1e-11;
  double abs_tol = 1e-15;
  int max_panels = 4000;
};

template <typename Value>
struct QuadratureOutcome {
  Value value{};
  double error = 0.0;  // achieved absolute error estimate
  int panels = 0;
};

using QuadratureResult = QuadratureOutcome<double>;
using ComplexQuadratureResult = QuadratureOutcome<std::complex<double>>;

// Adaptive Gauss-Kronrod 7/15 on [lo, hi]. Splits the worst panel until the
// summed error estimate meets max(abs_tol, rel_tol*|I|) or the panel budget
// is exhausted (ConvergenceError carrying the achieved estimate). Panel
// subdivision order is deterministic and the final sum is accumulated in
// interval order with compensation, so results are reproducible bit for bit.
QuadratureResult integrate(const std::function<double(double)>& f, double lo,
                           double hi, const QuadratureOptions& opts = {});

ComplexQuadratureResult integrate_complex(
    const std::function<std::complex<double>(double)>& f, double lo, double hi,
    const QuadratureOptions& opts = {});

// log Gamma on the principal branch (Lanczos, reflection for Re z < 1/2).
std::complex<double> log_gamma(std::complex<double> z);

// 1/Gamma as an entire function; exactly 0 at the poles of Gamma.
std::complex<double> reciprocal_gamma(std::complex<double> z);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double max_abs_residual = 0.0;
};

// Ordinary least squares for y ~ slope*x + intercept.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// 17 significant digits, enough to round-trip a double. All emitted floats
// go through this one formatter so outputs are byte-stable.
std::string repr17(double v);

// Runs fn(begin, end) over a fixed contiguous partition of [0, n) on
// `threads` std::threads. Chunks are the same for a given (n, threads), and
// the caller guarantees disjoint writes, so the result is deterministic.
void parallel_for(int n, int threads,
                  const std::function<void(int, int)>& fn);

}  // namespace cusp
