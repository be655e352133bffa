// Acceptance gate: one line per criterion, exit code = number of failures.
// Tolerances are pinned here on purpose; loosening them is a release
// decision, not a test edit.

#include <cuspspectra/cusp_model.hpp>
#include <cuspspectra/errors.hpp>
#include <cuspspectra/polyakov.hpp>
#include <cuspspectra/surface.hpp>
#include <cuspspectra/synthetic.hpp>
#include <cuspspectra/trace_expansion.hpp>
#include <cuspspectra/zeta_det.hpp>

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

using namespace cusp;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int idx, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", idx,
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

void guarded(int idx, const std::function<void(int)>& body) {
  try {
    body(idx);
  } catch (const std::exception& e) {
    report(idx, false, std::string("exception: ") + e.what());
  }
}

std::vector<double> geometric_grid(double lo, double hi, int n) {
  std::vector<double> t(n);
  for (int i = 0; i < n; ++i)
    t[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
  return t;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* pattern, ...) {
  char buf[512];
  va_list args;
  va_start(args, pattern);
  std::vsnprintf(buf, sizeof buf, pattern, args);
  va_end(args);
  return buf;
}

// 1. Quadrature oracle vs the closed-form model trace.
void criterion1(int idx) {
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (double a : {1.5, 2.0, std::exp(1.0), 4.0}) {
    const ModelCuspPair pair{a, CuspDomain::full_half_line};
    for (double t : geometric_grid(0.01, 10.0, 40)) {
      const double exact = relative_trace_exact(pair, t);
      const double quad = relative_trace_quadrature(pair, t);
      worst = std::max(worst, std::abs(quad - exact) / std::abs(exact));
    }
  }
  const double elapsed = seconds_since(t0);
  report(idx, worst < 1e-8 && elapsed < 5.0,
         fmt("model trace quadrature vs closed form, worst rel err %.3e "
             "(tol 1e-8), %.2f s (limit 5 s)",
             worst, elapsed));
}

// 2. Restricted-domain constant term -1/4.
void criterion2(int idx) {
  double worst = 0.0;
  for (double a : {2.0, 4.0}) {
    std::vector<std::pair<double, double>> samples;
    for (double t : geometric_grid(1e-6, 1e-2, 30))
      samples.emplace_back(t,
                           relative_trace_exact({a, CuspDomain::restricted}, t));
    const auto fit = fit_expansion(samples);
    worst = std::max(worst, std::abs(fit.coeffs.a2 + 0.25));
  }
  report(idx, worst < 1e-4,
         fmt("restricted small-t constant vs -1/4, worst |err| %.3e "
             "(tol 1e-4)",
             worst));
}

// 3. Determinant oracle through the full zeta pipeline.
void criterion3(int idx) {
  double worst_det = 0.0, worst_gap = 0.0, worst_time = 0.0;
  for (double a : {2.0, 4.0, std::exp(2.0)}) {
    const auto t0 = Clock::now();
    const auto r =
        zeta_prime_zero(model_relative_trace({a, CuspDomain::full_half_line}));
    worst_time = std::max(worst_time, seconds_since(t0));
    worst_det = std::max(worst_det,
                         std::abs(r.determinant - 1.0 / std::sqrt(a)));
    worst_gap = std::max(worst_gap, r.diagnostics.method_gap);
  }
  report(idx,
         worst_det < 1e-6 && worst_gap < 1e-6 && worst_time < 10.0,
         fmt("det vs a^{-1/2}, worst |err| %.3e, method gap %.3e "
             "(tol 1e-6 each), slowest case %.2f s (limit 10 s)",
             worst_det, worst_gap, worst_time));
}

// 4. Coefficient recovery under an injected higher-order remainder.
void criterion4(int idx) {
  const auto c = expansion_from_geometry(4.0 * M_PI, -1, 1);
  std::vector<std::pair<double, double>> samples;
  for (double t : geometric_grid(1e-6, 1e-2, 40))
    samples.emplace_back(t, eval_expansion(c, t) + 0.3 * std::pow(t, 1.5));
  const auto fit = fit_expansion(samples);
  const double worst = std::max(
      {std::abs(fit.coeffs.a0 - c.a0), std::abs(fit.coeffs.a10 - c.a10),
       std::abs(fit.coeffs.a11 - c.a11), std::abs(fit.coeffs.a2 - c.a2)});
  report(idx, worst < 1e-3,
         fmt("coefficient recovery with 0.3 t^{3/2} injected, worst |err| "
             "%.3e (tol 1e-3)",
             worst));
}

// 5. Gauss-Bonnet invariance under random decaying conformal factors.
void criterion5(int idx) {
  double worst_ratio = 0.0;
  const std::vector<DiscreteSurface> shapes = {
      make_flat_torus(24), make_synthetic_genus2(32),
      make_cusp_torus(6.0, 48, 24), make_cusp_torus(6.0, 96, 48)};
  for (const auto& surf : shapes) {
    const double before = gauss_bonnet(surf).integral;
    for (unsigned seed = 1; seed <= 20; ++seed) {
      const auto phi = random_decaying_factor(surf, seed, 0.1);
      const double after =
          gauss_bonnet(conformal_transform(surf, phi)).integral;
      worst_ratio = std::max(
          worst_ratio, std::abs(after - before) / (10.0 * surf.mesh_tolerance));
    }
  }
  report(idx, worst_ratio < 1.0,
         fmt("curvature integral drift over 4 surfaces x 20 factors, worst "
             "%.3e of the 10x-tolerance budget",
             worst_ratio));
}

// 6. Cocycle identity plus refinement behavior.
void criterion6(int idx) {
  double worst = 0.0;
  const std::vector<DiscreteSurface> shapes = {
      make_flat_torus(24), make_synthetic_genus2(32),
      make_cusp_torus(6.0, 48, 24)};
  for (const auto& surf : shapes) {
    const auto phi = random_decaying_factor(surf, 21, 0.2);
    const auto psi = random_decaying_factor(surf, 22, 0.15);
    worst = std::max(worst, std::abs(cocycle_residual(surf, phi, psi)) /
                                (10.0 * surf.mesh_tolerance));
  }

  // Refinement: the identity is exact in exact arithmetic, so on refinement
  // the residual must halve or stay at the rounding floor.
  const auto coarse_surf = make_cusp_torus(6.0, 48, 24);
  const auto fine_surf = make_cusp_torus(6.0, 96, 48);
  const double coarse = std::abs(cocycle_residual(
      coarse_surf, random_decaying_factor(coarse_surf, 21, 0.2),
      random_decaying_factor(coarse_surf, 22, 0.15)));
  const double fine = std::abs(cocycle_residual(
      fine_surf, random_decaying_factor(fine_surf, 21, 0.2),
      random_decaying_factor(fine_surf, 22, 0.15)));
  const double floor = 1e-14;  // rounding on O(1) functional values
  const bool shrank = fine <= std::max(coarse / 2.0, floor);
  report(idx, worst < 1.0 && shrank,
         fmt("cocycle residual worst %.3e of budget; refinement %.3e -> "
             "%.3e (needs <= max(coarse/2, %.0e))",
             worst, coarse, fine, floor));
}

// 7. Directional derivative vs central differences.
void criterion7(int idx) {
  const auto g2 = make_synthetic_genus2(16);
  const auto ct = make_cusp_torus(6.0, 32, 16);
  double worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    const auto& surf = (k % 2 == 0) ? ct : g2;
    const auto phi = random_decaying_factor(surf, 100 + k, 0.15);
    const auto dir = random_decaying_factor(surf, 200 + k, 1.0);
    const double analytic = polyakov_directional(surf, phi, dir.values);
    const double eps = 1e-5;
    auto total_at = [&](double e) {
      ConformalFactor f = phi;
      for (size_t i = 0; i < f.values.size(); ++i)
        f.values[i] += e * dir.values[i];
      f.bound += std::abs(e) * dir.bound + 1.0;
      return polyakov_delta(surf, f).total();
    };
    const double fd = (total_at(eps) - total_at(-eps)) / (2.0 * eps);
    worst = std::max(worst,
                     std::abs(analytic - fd) / std::max(1e-12, std::abs(fd)));
  }
  report(idx, worst < 1e-5,
         fmt("directional derivative vs central differences over 10 seeded "
             "pairs, worst rel err %.3e (tol 1e-5)",
             worst));
}

// 8. Extremal convergence on a ten-thousand-site cusp torus.
void criterion8(int idx) {
  const auto t0 = Clock::now();
  const auto surf = make_cusp_torus(6.0, 100, 100);  // 10100 sites
  const auto start = random_decaying_factor(surf, 42, 0.05);
  MinimizeOptions opts;
  // 1e-6 on the weighted gradient norm pins the curvature spread three
  // orders below the 1e-3 targets checked here; see the options doc.
  opts.grad_tol = 1e-6;
  const auto rep = minimize_ops(surf, start, opts);
  const double elapsed = seconds_since(t0);
  const double target_mean =
      2.0 * M_PI * surf.euler_characteristic() / rep.area_final;
  const bool pass = rep.status == MinimizeStatus::converged &&
                    rep.curvature.rel_stddev < 1e-3 &&
                    std::abs(rep.curvature.mean - target_mean) < 1e-3 &&
                    std::abs(rep.curvature.mean + 1.0) < 1e-3 &&
                    elapsed < 60.0;
  report(idx, pass,
         fmt("minimizer on %d sites: %s in %d iterations, rel stddev %.3e "
             "(tol 1e-3), mean K %.6f vs -1, %.1f s (limit 60 s)",
             surf.n_sites(),
             rep.status == MinimizeStatus::converged ? "converged"
                                                     : "did not converge",
             rep.iterations, rep.curvature.rel_stddev, rep.curvature.mean,
             elapsed));
}

// 9. Translation response of the extremal functional.
void criterion9(int idx) {
  const auto surf = make_cusp_torus(6.0, 48, 24);
  const int n = surf.n_sites();
  std::vector<double> phi(n);
  for (int i = 0; i < n; ++i) phi[i] = 0.05 * std::sin(0.9 * i);
  const double base = ops_functional(surf, phi);
  const double gb_residual = gauss_bonnet(surf).residual;

  // Exact statement: F(phi+c) - F(phi) = c * residual. The bundled surfaces
  // satisfy Gauss-Bonnet to rounding, so the bound is checked against the
  // identity with a floating-point floor on top.
  const double floor = 1e-11 * std::max(1.0, std::abs(base));
  double worst = 0.0;
  for (double c : {1.0, -1.0, 5.0, -5.0}) {
    std::vector<double> shifted(phi);
    for (double& v : shifted) v += c;
    const double lhs = std::abs(ops_functional(surf, shifted) - base);
    worst = std::max(worst, lhs - std::abs(c) * std::abs(gb_residual));
  }
  report(idx, worst <= floor,
         fmt("translation drift beyond |c|*|GB residual|: %.3e (rounding "
             "floor %.3e)",
             worst, floor));
}

}  // namespace

int main() {
  std::printf("acceptance gate: 9 criteria\n");
  const std::function<void(int)> bodies[] = {
      criterion1, criterion2, criterion3, criterion4, criterion5,
      criterion6, criterion7, criterion8, criterion9};
  for (int i = 0; i < 9; ++i) guarded(i + 1, bodies[i]);
  std::printf("%d of 9 criteria passed\n", 9 - g_failures);
  return g_failures;
}
