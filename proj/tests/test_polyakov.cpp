#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cuspspectra/errors.hpp>
#include <cuspspectra/polyakov.hpp>
#include <cuspspectra/surface.hpp>
#include <cuspspectra/synthetic.hpp>

#include <cmath>
#include <vector>

using namespace cusp;

namespace {

ConformalFactor constant_factor(const DiscreteSurface& surf, double c) {
  return {std::vector<double>(surf.n_sites(), c), 2,
          std::abs(c) * 64.0 + 1.0};
}

double weighted_sum(const DiscreteSurface& surf,
                    const std::vector<double>& f) {
  double s = 0.0;
  for (int i = 0; i < surf.n_sites(); ++i) s += surf.weights[i] * f[i];
  return s;
}

}  // namespace

TEST_CASE("constant factors shift the log-determinant by c(2 - chi/3)") {
  const auto g2 = make_synthetic_genus2(12);     // chi = -2
  const auto cusped = make_cusp_torus(6.0, 16, 8);  // chi = -1
  for (double c : {0.5, -0.2}) {
    const auto dg2 = polyakov_delta(g2, constant_factor(g2, c));
    CHECK(dg2.energy_term == doctest::Approx(0.0));
    CHECK(dg2.total() ==
          doctest::Approx(c * (2.0 + 2.0 / 3.0)).epsilon(1e-12));
    const auto dct = polyakov_delta(cusped, constant_factor(cusped, c));
    CHECK(dct.total() == doctest::Approx(c * 7.0 / 3.0).epsilon(1e-12));
    // normalized() drops exactly the area term.
    CHECK(dct.total() - dct.normalized() ==
          doctest::Approx(2.0 * c).epsilon(1e-12));
  }
}

TEST_CASE("mean-zero directions do not move the determinant at first order") {
  const auto surf = make_cusp_torus(6.0, 16, 8);  // K constant = -1
  const int n = surf.n_sites();
  std::vector<double> psi(n);
  for (int i = 0; i < n; ++i) psi[i] = std::sin(0.7 * i);
  const double mean = weighted_sum(surf, psi) / surf.area();
  for (int i = 0; i < n; ++i) psi[i] -= mean;
  const auto zero = constant_factor(surf, 0.0);
  CHECK(std::abs(polyakov_directional(surf, zero, psi)) < 1e-12);
}

TEST_CASE("directional derivative matches central differences") {
  const auto surf = make_synthetic_genus2(10);
  const auto phi = random_decaying_factor(surf, 11, 0.15);
  const int n = surf.n_sites();
  std::vector<double> psi(n);
  for (int i = 0; i < n; ++i) psi[i] = 0.3 * std::cos(1.1 * i) + 0.1;

  const double analytic = polyakov_directional(surf, phi, psi);
  const double eps = 1e-5;
  auto shifted = [&](double e) {
    ConformalFactor f = phi;
    for (int i = 0; i < n; ++i) f.values[i] += e * psi[i];
    f.bound += std::abs(e) * 64.0;
    return polyakov_delta(surf, f).total();
  };
  const double fd = (shifted(eps) - shifted(-eps)) / (2.0 * eps);
  CHECK(analytic == doctest::Approx(fd).epsilon(1e-6));
}

TEST_CASE("the change formula composes as a cocycle") {
  for (int seed : {1, 2, 3}) {
    const auto surf = make_cusp_torus(6.0, 16, 8);
    const auto phi = random_decaying_factor(surf, seed, 0.2);
    const auto psi = random_decaying_factor(surf, seed + 100, 0.15);
    CHECK(std::abs(cocycle_residual(surf, phi, psi)) < 1e-12);
  }
  const auto g2 = make_synthetic_genus2(12);
  CHECK(std::abs(cocycle_residual(g2, random_decaying_factor(g2, 5, 0.3),
                                  random_decaying_factor(g2, 6, 0.3))) <
        1e-12);
}

TEST_CASE("functional value, gradient pairing, and translation identity") {
  const auto surf = make_cusp_torus(6.0, 16, 8);
  const int n = surf.n_sites();
  const double chi = surf.euler_characteristic();

  // Zero factor: F(0) = -pi chi log A_g.
  const std::vector<double> zero(n, 0.0);
  CHECK(ops_functional(surf, zero) ==
        doctest::Approx(-M_PI * chi * std::log(surf.area())).epsilon(1e-13));

  std::vector<double> phi(n);
  for (int i = 0; i < n; ++i) phi[i] = 0.05 * std::sin(0.9 * i);

  // Difference against the determinant change: F(phi) - F(0) =
  // -6 pi total + pi (6 - chi) log(A_h/A_g).
  ConformalFactor f{phi, 2, 10.0};
  const auto delta = polyakov_delta(surf, f);
  const double lhs = ops_functional(surf, phi) - ops_functional(surf, zero);
  const double rhs = -6.0 * M_PI * delta.total() +
                     M_PI * (6.0 - chi) * delta.area_term;
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));

  // <r, 1>_w equals the curvature-integral defect, identically zero here.
  const auto r = ops_gradient(surf, phi);
  CHECK(std::abs(weighted_sum(surf, r)) < 1e-11);

  // Translation: F(phi + c) - F(phi) = c * (sum wK - 2 pi chi) = 0 exactly
  // up to rounding on this surface.
  for (double c : {1.0, -1.0, 5.0, -5.0}) {
    std::vector<double> shifted(phi);
    for (double& v : shifted) v += c;
    CHECK(std::abs(ops_functional(surf, shifted) - ops_functional(surf, phi)) <
          1e-9);
  }
}

TEST_CASE("the functional is convex along segments for negative chi") {
  const auto surf = make_synthetic_genus2(10);
  const int n = surf.n_sites();
  std::vector<double> u(n), v(n), mid(n);
  for (int i = 0; i < n; ++i) {
    u[i] = 0.4 * std::sin(0.31 * i);
    v[i] = 0.3 * std::cos(0.77 * i) - 0.1;
    mid[i] = 0.5 * (u[i] + v[i]);
  }
  CHECK(ops_functional(surf, mid) <=
        0.5 * (ops_functional(surf, u) + ops_functional(surf, v)) + 1e-12);
}

TEST_CASE("minimizer accepts a stationary start without stepping") {
  // K = -1 = 2 pi chi / A exactly: phi = 0 is already extremal.
  const auto surf = make_cusp_torus(6.0, 16, 8);
  const auto report =
      minimize_ops(surf, constant_factor(surf, 0.0));
  CHECK(report.status == MinimizeStatus::converged);
  CHECK(report.iterations == 0);
  CHECK(report.curvature.rel_stddev < 1e-12);
  CHECK(report.curvature.mean == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("minimizer flattens curvature on a wobbly genus-2 surface") {
  const auto surf = make_synthetic_genus2(12);
  const auto report = minimize_ops(surf, constant_factor(surf, 0.0));
  CHECK(report.status == MinimizeStatus::converged);
  CHECK(report.curvature.rel_stddev < 1e-3);
  // Area normalization makes the constant curvature exactly -1.
  CHECK(report.curvature.mean == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(report.area_final ==
        doctest::Approx(-2.0 * M_PI * surf.euler_characteristic())
            .epsilon(1e-10));
  CHECK(report.functional_final <= report.functional_initial);

  // Accepted steps never raise the functional; ties appear only once the
  // Armijo decrement drops below one ulp of the value.
  REQUIRE(!report.history.empty());
  for (size_t i = 1; i < report.history.size(); ++i)
    CHECK(report.history[i].functional <= report.history[i - 1].functional);
  CHECK(report.history.back().functional < report.history.front().functional);
}

TEST_CASE("minimizer recovers from a seeded perturbation on a cusp torus") {
  const auto surf = make_cusp_torus(6.0, 24, 12);
  const auto start = random_decaying_factor(surf, 9, 0.1);
  MinimizeOptions opts;
  opts.grad_tol = 1e-8;
  const auto report = minimize_ops(surf, start, opts);
  CHECK(report.status == MinimizeStatus::converged);
  CHECK(report.grad_norm <= opts.grad_tol);
  CHECK(report.curvature.rel_stddev < 1e-6);
  CHECK(report.curvature.mean == doctest::Approx(-1.0).epsilon(1e-8));

  // The anchored outer row moves only by the final uniform area gauge,
  // which is O(grad_tol) here.
  const auto mask = frozen_site_mask(surf);
  int frozen = 0;
  double gauge = 0.0;
  for (int i = 0; i < surf.n_sites(); ++i)
    if (mask[i]) {
      if (frozen == 0) gauge = report.factor.values[i];
      CHECK(report.factor.values[i] == gauge);
      ++frozen;
    }
  CHECK(frozen == 12);  // one grid row
  CHECK(std::abs(gauge) < 1e-6);

  // Without the gauge shift the anchor stays at exactly zero.
  MinimizeOptions raw = opts;
  raw.normalize_area = false;
  const auto anchored = minimize_ops(surf, start, raw);
  for (int i = 0; i < surf.n_sites(); ++i)
    if (mask[i]) CHECK(anchored.factor.values[i] == 0.0);
}

TEST_CASE("minimizer refuses surfaces outside its class") {
  CHECK_THROWS_AS(
      minimize_ops(make_flat_torus(6), constant_factor(make_flat_torus(6), 0.0)),
      ContractError);
  const auto fragment = build_cusp_grid(1.0, 8.0, 12, 6);
  CHECK_THROWS_AS(minimize_ops(fragment, constant_factor(fragment, 0.0)),
                  ContractError);
}

TEST_CASE("curvature statistics skip the anchored boundary row") {
  const auto surf = make_cusp_torus(6.0, 16, 8);
  const auto stats = curvature_constancy(surf, constant_factor(surf, 0.0));
  CHECK(stats.interior_sites == surf.n_sites() - 8);
  CHECK(stats.mean == doctest::Approx(-1.0));
  CHECK(stats.stddev < 1e-14);
  CHECK(stats.min <= stats.mean);
  CHECK(stats.max >= stats.mean);
}
