#include <cuspspectra/polyakov.hpp>

#include <cuspspectra/errors.hpp>
#include <cuspspectra/numerics.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace cusp {

namespace {

double weighted_dot(const std::vector<double>& w, const std::vector<double>& a,
                    const std::vector<double>& b) {
  CompensatedSum s;
  for (size_t i = 0; i < w.size(); ++i) s.add(w[i] * a[i] * b[i]);
  return s.value();
}

double conformal_area(const DiscreteSurface& surface,
                      const std::vector<double>& phi) {
  CompensatedSum s;
  for (int i = 0; i < surface.n_sites(); ++i)
    s.add(surface.weights[i] * std::exp(2.0 * phi[i]));
  return s.value();
}

ConformalFactor combine(const ConformalFactor& a, const ConformalFactor& b) {
  // |a + b| y^k <= a.bound + b.bound at the weaker order, since y >= 1.
  ConformalFactor sum;
  sum.decay_order = std::min(a.decay_order, b.decay_order);
  sum.bound = a.bound + b.bound;
  sum.values = a.values;
  for (size_t i = 0; i < sum.values.size(); ++i) sum.values[i] += b.values[i];
  return sum;
}

}  // namespace

PolyakovDelta polyakov_delta(const DiscreteSurface& surface,
                             const ConformalFactor& factor) {
  check_conformal_factor(surface, factor);
  const std::vector<double>& phi = factor.values;
  PolyakovDelta d;
  d.energy_term = -dirichlet_energy(surface, phi) / (12.0 * M_PI);
  CompensatedSum wk;
  for (int i = 0; i < surface.n_sites(); ++i)
    wk.add(surface.weights[i] * surface.curvature[i] * phi[i]);
  d.curvature_term = -wk.value() / (6.0 * M_PI);
  d.area_term = std::log(conformal_area(surface, phi) / surface.area());
  return d;
}

double polyakov_directional(const DiscreteSurface& surface,
                            const ConformalFactor& factor,
                            const std::vector<double>& direction) {
  check_conformal_factor(surface, factor);
  const int n = surface.n_sites();
  if (static_cast<int>(direction.size()) != n)
    throw ContractError("direction size does not match surface");
  for (double v : direction)
    if (!std::isfinite(v))
      throw ContractError("direction has non-finite entries");

  const std::vector<double> lap_phi = laplace_apply(surface, factor.values);
  const double area_h = conformal_area(surface, factor.values);
  CompensatedSum curv, area;
  for (int i = 0; i < n; ++i) {
    curv.add(surface.weights[i] * direction[i] *
             (lap_phi[i] + surface.curvature[i]));
    area.add(surface.weights[i] * direction[i] *
             std::exp(2.0 * factor.values[i]));
  }
  return -curv.value() / (6.0 * M_PI) + 2.0 * area.value() / area_h;
}

double cocycle_residual(const DiscreteSurface& surface,
                        const ConformalFactor& phi,
                        const ConformalFactor& psi) {
  const double one_step = polyakov_delta(surface, combine(phi, psi)).total();
  const double first = polyakov_delta(surface, phi).total();
  const DiscreteSurface mid = conformal_transform(surface, phi);
  const double second = polyakov_delta(mid, psi).total();
  return one_step - first - second;
}

double ops_functional(const DiscreteSurface& surface,
                      const std::vector<double>& phi) {
  const double energy = dirichlet_energy(surface, phi);
  CompensatedSum wk;
  for (int i = 0; i < surface.n_sites(); ++i)
    wk.add(surface.weights[i] * surface.curvature[i] * phi[i]);
  const double pichi = M_PI * surface.euler_characteristic();
  return 0.5 * energy + wk.value() -
         pichi * std::log(conformal_area(surface, phi));
}

std::vector<double> ops_gradient(const DiscreteSurface& surface,
                                 const std::vector<double>& phi) {
  const int n = surface.n_sites();
  std::vector<double> r = laplace_apply(surface, phi);
  const double coeff =
      2.0 * M_PI * surface.euler_characteristic() / conformal_area(surface, phi);
  for (int i = 0; i < n; ++i)
    r[i] += surface.curvature[i] - coeff * std::exp(2.0 * phi[i]);
  return r;
}

std::vector<bool> frozen_site_mask(const DiscreteSurface& surface) {
  std::vector<bool> mask(surface.n_sites(), false);
  for (const CuspPatch& patch : surface.cusps) {
    double y_max = 0.0;
    for (double y : patch.y) y_max = std::max(y_max, y);
    for (size_t k = 0; k < patch.sites.size(); ++k)
      if (patch.y[k] >= y_max * (1.0 - 1e-12)) mask[patch.sites[k]] = true;
  }
  return mask;
}

CurvatureStats curvature_constancy(const DiscreteSurface& surface,
                                   const ConformalFactor& factor) {
  const DiscreteSurface h = conformal_transform(surface, factor);
  const std::vector<bool> frozen = frozen_site_mask(surface);

  CurvatureStats stats;
  stats.min = std::numeric_limits<double>::infinity();
  stats.max = -std::numeric_limits<double>::infinity();
  CompensatedSum wsum, wksum;
  for (int i = 0; i < h.n_sites(); ++i) {
    if (frozen[i]) continue;
    ++stats.interior_sites;
    wsum.add(h.weights[i]);
    wksum.add(h.weights[i] * h.curvature[i]);
    stats.min = std::min(stats.min, h.curvature[i]);
    stats.max = std::max(stats.max, h.curvature[i]);
  }
  if (stats.interior_sites == 0)
    throw ContractError("no interior sites for curvature statistics");
  stats.mean = wksum.value() / wsum.value();
  CompensatedSum var;
  for (int i = 0; i < h.n_sites(); ++i) {
    if (frozen[i]) continue;
    const double d = h.curvature[i] - stats.mean;
    var.add(h.weights[i] * d * d);
  }
  stats.stddev = std::sqrt(std::max(var.value(), 0.0) / wsum.value());
  stats.rel_stddev =
      stats.mean != 0.0 ? stats.stddev / std::abs(stats.mean) : stats.stddev;
  return stats;
}

ExtremalReport minimize_ops(const DiscreteSurface& surface,
                            const ConformalFactor& start,
                            const MinimizeOptions& options) {
  if (!surface.complete)
    throw ContractError("minimize_ops needs a complete surface");
  if (surface.euler_characteristic() >= 0)
    throw ContractError(
        "minimize_ops needs negative Euler characteristic; the functional is "
        "not convex otherwise");
  check_conformal_factor(surface, start);

  const int n = surface.n_sites();
  const std::vector<double>& w = surface.weights;
  const std::vector<bool> frozen = frozen_site_mask(surface);

  std::vector<double> phi = start.values;
  for (int i = 0; i < n; ++i)
    if (frozen[i]) phi[i] = 0.0;

  auto gradient = [&](const std::vector<double>& p) {
    std::vector<double> r = ops_gradient(surface, p);
    for (int i = 0; i < n; ++i)
      if (frozen[i]) r[i] = 0.0;
    return r;
  };

  ExtremalReport report;
  report.area_initial = conformal_area(surface, phi);

  double f = ops_functional(surface, phi);
  std::vector<double> r = gradient(phi);
  double rr = weighted_dot(w, r, r);
  double gnorm = std::sqrt(rr);
  report.functional_initial = f;
  if (options.record_history)
    report.history.push_back({0, f, gnorm, 0.0});

  std::vector<double> prev_phi, prev_r;
  double step = options.initial_step;
  report.status = MinimizeStatus::max_iterations;

  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    if (gnorm <= options.grad_tol) {
      report.status = MinimizeStatus::converged;
      break;
    }

    // Barzilai-Borwein trial steps from the last accepted move, in the
    // w-inner product, alternating the long and short variants (the mesh is
    // stiff: cell weights span three orders of magnitude, and a single BB
    // rule under monotone backtracking crawls). Fall back to the last
    // accepted step size.
    double trial = step;
    if (!prev_phi.empty()) {
      std::vector<double> s(n), g(n);
      for (int i = 0; i < n; ++i) {
        s[i] = phi[i] - prev_phi[i];
        g[i] = r[i] - prev_r[i];
      }
      const double ss = weighted_dot(w, s, s);
      const double sg = weighted_dot(w, s, g);
      const double gg = weighted_dot(w, g, g);
      if (std::isfinite(sg) && sg > 0.0) {
        const double bb = (iter % 2 == 0) ? ss / sg : sg / std::max(gg, 1e-300);
        trial = std::clamp(bb, 1e-12, 1e6);
      }
    }

    double alpha = trial;
    bool accepted = false;
    std::vector<double> cand(n);
    double fc = f;
    for (int bt = 0; bt <= options.max_backtracks; ++bt) {
      for (int i = 0; i < n; ++i) cand[i] = phi[i] - alpha * r[i];
      fc = ops_functional(surface, cand);
      if (fc <= f - 1e-4 * alpha * rr) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      report.status = MinimizeStatus::line_search_failure;
      break;
    }

    prev_phi = phi;
    prev_r = r;
    phi = cand;
    f = fc;
    r = gradient(phi);
    rr = weighted_dot(w, r, r);
    gnorm = std::sqrt(rr);
    step = alpha;
    report.iterations = iter;
    if (options.record_history)
      report.history.push_back({iter, f, gnorm, alpha});
    if (iter == options.max_iterations && gnorm <= options.grad_tol)
      report.status = MinimizeStatus::converged;
  }
  if (gnorm <= options.grad_tol) report.status = MinimizeStatus::converged;

  // Constant shifts leave the gradient field unchanged, so normalizing the
  // area afterwards costs nothing: pick exp(2c) A = -2 pi chi, which makes
  // the stationary curvature exactly -1.
  if (options.normalize_area) {
    const double target = -2.0 * M_PI * surface.euler_characteristic();
    const double c = 0.5 * std::log(target / conformal_area(surface, phi));
    for (double& v : phi) v += c;
  }

  report.factor.values = phi;
  report.factor.decay_order = start.decay_order;
  double grown = 0.0;
  for (const CuspPatch& patch : surface.cusps)
    for (size_t k = 0; k < patch.sites.size(); ++k)
      grown = std::max(grown,
                       std::abs(phi[patch.sites[k]]) *
                           std::pow(patch.y[k], report.factor.decay_order));
  report.factor.bound = grown * (1.0 + 1e-9) + 1e-12;

  report.functional_final = ops_functional(surface, phi);
  report.area_final = conformal_area(surface, phi);
  std::vector<double> r_final = gradient(phi);
  report.grad_norm = std::sqrt(weighted_dot(w, r_final, r_final));
  report.curvature = curvature_constancy(surface, report.factor);
  return report;
}

}  // namespace cusp
