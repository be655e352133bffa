#pragma once

#include <cuspspectra/surface.hpp>

#include <vector>

namespace cusp {

// Change of the log-determinant under exp(2 phi) with the area dependence
// split off. `normalized` tracks the area-scaled determinant; `total` adds
// the explicit area ratio back in. Both are anchored at the reference
// metric, so no absolute determinant is ever needed.
struct PolyakovDelta {
  double energy_term = 0.0;     // -(1/12 pi) phi^T L phi
  double curvature_term = 0.0;  // -(1/6 pi) sum w K phi
  double area_term = 0.0;       // log(A_h / A_g)
  double normalized() const { return energy_term + curvature_term; }
  double total() const { return energy_term + curvature_term + area_term; }
};

PolyakovDelta polyakov_delta(const DiscreteSurface& surface,
                             const ConformalFactor& factor);

// d/de at e = 0 of total() along phi + e psi.
double polyakov_directional(const DiscreteSurface& surface,
                            const ConformalFactor& factor,
                            const std::vector<double>& direction);

// total(phi + psi) - total(phi) - total(psi on the phi-transformed surface).
// Zero up to rounding: the identity needs only symmetry of the form.
double cocycle_residual(const DiscreteSurface& surface,
                        const ConformalFactor& phi, const ConformalFactor& psi);

// The functional whose minimizers have constant transformed curvature:
//   F(phi) = 1/2 phi^T L phi + sum w K phi - pi chi log(sum w exp(2 phi)).
// Convex for chi < 0, flat along constant shifts when the curvature
// integral matches 2 pi chi.
double ops_functional(const DiscreteSurface& surface,
                      const std::vector<double>& phi);

// Weighted gradient r with dF = sum w_i r_i dphi_i:
//   r = (L phi)/w + K - (2 pi chi / A(phi)) exp(2 phi).
// At a zero of r the transformed curvature is the constant 2 pi chi / A.
std::vector<double> ops_gradient(const DiscreteSurface& surface,
                                 const std::vector<double>& phi);

struct MinimizeOptions {
  int max_iterations = 20000;
  double grad_tol = 1e-8;      // on the w-weighted L2 norm of the gradient
  double initial_step = 1.0;
  int max_backtracks = 60;
  bool normalize_area = true;  // final shift to area -2 pi chi, so K = -1
  bool record_history = true;
};

enum class MinimizeStatus { converged, line_search_failure, max_iterations };

struct IterationRecord {
  int iteration = 0;
  double functional = 0.0;
  double grad_norm = 0.0;
  double step = 0.0;
};

struct CurvatureStats {
  double mean = 0.0;    // area-weighted, interior sites only
  double stddev = 0.0;
  double rel_stddev = 0.0;
  double min = 0.0;
  double max = 0.0;
  int interior_sites = 0;
};

struct ExtremalReport {
  ConformalFactor factor;
  MinimizeStatus status = MinimizeStatus::max_iterations;
  int iterations = 0;
  double functional_initial = 0.0;
  double functional_final = 0.0;
  double grad_norm = 0.0;
  double area_initial = 0.0;
  double area_final = 0.0;
  CurvatureStats curvature;
  std::vector<IterationRecord> history;
};

// Gradient descent with a Barzilai-Borwein trial step and monotone
// backtracking. Needs chi < 0 and a complete surface. The outermost row of
// each cusp patch is held at phi = 0 throughout the descent; it anchors the
// truncated end and is excluded from the curvature statistics. The
// normalize_area gauge applies one uniform shift at the very end (constant
// shifts leave the gradient invariant), so with it enabled the anchor row
// lands on the shift constant instead of exact zero.
ExtremalReport minimize_ops(const DiscreteSurface& surface,
                            const ConformalFactor& start,
                            const MinimizeOptions& options = {});

// Area-weighted spread of the transformed curvature over interior sites
// (everything except the outermost row of each cusp patch).
CurvatureStats curvature_constancy(const DiscreteSurface& surface,
                                   const ConformalFactor& factor);

// Sites pinned by minimize_ops and skipped by curvature_constancy.
std::vector<bool> frozen_site_mask(const DiscreteSurface& surface);

}  // namespace cusp
