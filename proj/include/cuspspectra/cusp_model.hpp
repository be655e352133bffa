#pragma once

#include <vector>

#include "cuspspectra/numerics.hpp"

namespace cusp {

// Where the operator pair (base height a vs reference height 1) acts.
//   full_half_line: both operators on L^2([1,inf), y^-2 dy); the a-operator
//                   is extended by zero below its base height.
//   restricted:     each operator on its own L^2([a_i,inf), y^-2 dy).
enum class CuspDomain { full_half_line, restricted };

// Dirichlet model operator -y^2 d^2/dy^2 at base height a, paired with the
// reference at base height 1.
struct ModelCuspPair {
  double a;
  CuspDomain domain;
  ModelCuspPair(double a, CuspDomain domain);  // requires a >= 1
};

// Direct sum of full-half-line model pairs, one per cusp.
struct MultiCuspModel {
  std::vector<double> starts;  // per-cusp base heights, all >= 1
  explicit MultiCuspModel(std::vector<double> starts);  // requires non-empty
};

// Heat kernel of the Dirichlet model operator at base height a, evaluated at
// (y, y', t). Identically zero if either argument is at or below a.
double model_heat_kernel(double a, double y, double yp, double t);

// Closed form of tr(exp(-t H_a) - exp(-t H_1)) for the pair.
double relative_trace_exact(const ModelCuspPair& pair, double t);

// Independent check: integrates the heat-kernel diagonal difference against
// y^-2 dy over the pair's domain. `tol` is the relative tolerance; failure to
// reach it within the panel budget raises ConvergenceError with the achieved
// estimate. Never consults relative_trace_exact.
double relative_trace_quadrature(const ModelCuspPair& pair, double t,
                                 double tol = 1e-10);

// Sum of per-cusp full-half-line traces.
double multi_cusp_trace(const MultiCuspModel& model, double t);

}  // namespace cusp
