#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cuspspectra/errors.hpp>
#include <cuspspectra/numerics.hpp>

#include <atomic>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

using namespace cusp;

TEST_CASE("kronrod rule integrates smooth polynomials to machine precision") {
  // Both embedded rules are exact through degree 13, so the error estimate
  // vanishes and the driver must accept a single panel.
  auto r = integrate([](double x) { return std::pow(x, 13); }, 0.0, 1.0);
  CHECK(r.value == doctest::Approx(1.0 / 14.0).epsilon(1e-15));
  CHECK(r.panels == 1);
  // Above the Gauss degree the estimator forces subdivision but the value
  // still lands on the exact answer.
  auto r22 = integrate([](double x) { return std::pow(x, 22); }, 0.0, 1.0);
  CHECK(r22.value == doctest::Approx(1.0 / 23.0).epsilon(1e-14));
}

TEST_CASE("quadrature reproduces the gamma function as a Mellin integral") {
  // Independent reference: std::tgamma.
  for (double s : {1.5, 2.5, 4.0}) {
    auto r = integrate(
        [s](double t) { return std::pow(t, s - 1.0) * std::exp(-t); }, 0.0,
        60.0, {1e-13, 1e-300, 4000});
    CHECK(r.value == doctest::Approx(std::tgamma(s)).epsilon(1e-12));
  }
  CHECK(std::tgamma(2.5) == doctest::Approx(1.32934038817913702047));
}

TEST_CASE("quadrature splits stiff integrands and reports panel counts") {
  // Narrow Gaussian far from the panel center forces adaptivity.
  auto r = integrate(
      [](double x) { return std::exp(-1e4 * (x - 0.123) * (x - 0.123)); }, 0.0,
      1.0, {1e-12, 1e-300, 4000});
  const double exact = std::sqrt(std::numbers::pi / 1e4);  // tails negligible
  CHECK(r.value == doctest::Approx(exact).epsilon(1e-10));
  CHECK(r.panels > 4);
}

TEST_CASE("quadrature raises ConvergenceError when the panel budget is spent") {
  QuadratureOptions opts;
  opts.rel_tol = 1e-15;
  opts.abs_tol = 1e-300;
  opts.max_panels = 2;
  bool threw = false;
  try {
    integrate([](double x) { return std::exp(-1e6 * (x - 0.3) * (x - 0.3)) +
                                    std::exp(-1e6 * (x - 0.7) * (x - 0.7)); },
              0.0, 1.0, opts);
  } catch (const ConvergenceError& e) {
    threw = true;
    CHECK(e.achieved() > 0.0);
  }
  CHECK(threw);
}

TEST_CASE("complex quadrature matches the real driver on each component") {
  auto f = [](double x) {
    return std::complex<double>(std::cos(3.0 * x), std::exp(-x));
  };
  auto r = integrate_complex(f, 0.0, 2.0);
  CHECK(r.value.real() == doctest::Approx(std::sin(6.0) / 3.0).epsilon(1e-12));
  CHECK(r.value.imag() == doctest::Approx(1.0 - std::exp(-2.0)).epsilon(1e-12));
}

TEST_CASE("erf_integral carries the unnormalized convention") {
  CHECK(erf_integral(0.7) ==
        doctest::Approx(0.600685668082744245414).epsilon(1e-15));
  // Against direct quadrature of its own definition.
  for (double s : {0.2, 1.0, 2.5, 6.0}) {
    auto q = integrate([](double v) { return std::exp(-v * v); }, 0.0, s);
    CHECK(erf_integral(s) == doctest::Approx(q.value).epsilon(1e-12));
  }
  CHECK(erf_integral(0.0) == 0.0);
  CHECK(erf_integral(-1.0) == doctest::Approx(-erf_integral(1.0)));
  // Saturation at sqrt(pi)/2.
  CHECK(erf_integral(40.0) ==
        doctest::Approx(0.5 * std::sqrt(std::numbers::pi)).epsilon(1e-16));
}

TEST_CASE("log_gamma agrees with the standard library on the real axis") {
  for (double x : {0.1, 0.51, 1.0, 2.0, 3.7, 11.25, 30.0}) {
    const auto lg = log_gamma(std::complex<double>(x, 0.0));
    CHECK(lg.real() == doctest::Approx(std::lgamma(x)).epsilon(5e-14));
    CHECK(std::abs(lg.imag()) < 1e-13);
  }
}

TEST_CASE("log_gamma matches a frozen complex reference") {
  const auto lg = log_gamma(std::complex<double>(0.3, -2.0));
  CHECK(lg.real() == doctest::Approx(-2.35944935593757101359).epsilon(1e-13));
  CHECK(lg.imag() == doctest::Approx(0.916907613518669736975).epsilon(1e-13));
}

TEST_CASE("reciprocal_gamma is entire and vanishes at the poles") {
  for (double pole : {0.0, -1.0, -2.0, -7.0}) {
    const auto v = reciprocal_gamma(std::complex<double>(pole, 0.0));
    // The zero is simple with slope (-1)^n n!, so roundoff in the argument
    // shows up amplified by n! in the value.
    CHECK(std::abs(v) < 1e-13 * std::max(1.0, std::tgamma(-pole + 1.0)) * 10);
  }
  CHECK(reciprocal_gamma({1.0, 0.0}).real() == doctest::Approx(1.0));
  CHECK(reciprocal_gamma({3.0, 0.0}).real() == doctest::Approx(0.5));

  const auto a = reciprocal_gamma(std::complex<double>(0.5, 3.0));
  CHECK(a.real() == doctest::Approx(42.2949802096916806744).epsilon(1e-12));
  CHECK(a.imag() == doctest::Approx(-13.5398177088654991371).epsilon(1e-12));
  const auto b = reciprocal_gamma(std::complex<double>(-2.5, 1.5));
  CHECK(b.real() == doctest::Approx(5.781199320943614778).epsilon(1e-12));
  CHECK(b.imag() == doctest::Approx(40.7539082001808902507).epsilon(1e-12));
}

TEST_CASE("compensated summation survives adversarial cancellation") {
  CompensatedSum s;
  s.add(1.0);
  for (int i = 0; i < 10; ++i) s.add(1e16);
  for (int i = 0; i < 10; ++i) s.add(-1e16);
  CHECK(s.value() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("fit_line recovers exact affine data and reports residuals") {
  std::vector<double> x, y;
  for (int i = 0; i < 12; ++i) {
    x.push_back(0.5 * i);
    y.push_back(-0.25 * x.back() + 3.0);
  }
  auto f = fit_line(x, y);
  CHECK(f.slope == doctest::Approx(-0.25).epsilon(1e-13));
  CHECK(f.intercept == doctest::Approx(3.0).epsilon(1e-13));
  CHECK(f.max_abs_residual < 1e-12);

  y[5] += 0.1;  // one outlier must show up in the residual report
  auto g = fit_line(x, y);
  CHECK(g.max_abs_residual > 0.05);
}

TEST_CASE("parallel_for partitions deterministically and covers every index") {
  const int n = 1001;
  for (int threads : {1, 2, 4, 7}) {
    std::vector<std::atomic<int>> hits(n);
    parallel_for(n, threads, [&](int lo, int hi) {
      for (int i = lo; i < hi; ++i) hits[i].fetch_add(1);
    });
    for (int i = 0; i < n; ++i) CHECK(hits[i].load() == 1);
  }
}
