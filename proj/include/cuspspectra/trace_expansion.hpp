#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "cuspspectra/cusp_model.hpp"

namespace cusp {

// Small-time model R(t) ~ a0/t + (a10 + a11 log t)/sqrt(t) + a2 + O(sqrt(t)).
// a11 = 0 whenever the trace has no logarithmic term.
struct ExpansionCoeffs {
  double a0 = 0.0;
  double a10 = 0.0;
  double a11 = 0.0;
  double a2 = 0.0;
};

// A relative heat trace R(t) = tr(exp(-tH1) - exp(-tH0)) together with the
// data the zeta pipeline needs: its small-time coefficients, the kernel
// dimension offset h = dim ker H1 - dim ker H0 (so R(t) - h -> 0), and a
// decay rate c > 0 with R(t) - h = O(exp(-c t)).
struct RelativeTrace {
  std::function<double(double)> eval;  // must be safe for concurrent calls
  ExpansionCoeffs coeffs;
  int kernel_offset = 0;
  double decay_rate = 0.0;
  // Optional cancellation-free form of eval(t) - expansion(t). Deep in the
  // small-t regime the naive subtraction loses every digit (both sides grow
  // like t^{-1/2} while the difference shrinks like sqrt t), so factories
  // that know a stable expression install it here and the Mellin
  // continuation prefers it.
  std::function<double(double)> small_t_remainder;
};

// Coefficients for a surface of area `area` with Euler characteristic
// `euler_char` and `num_cusps` cusps, all cusps based at height 1:
//   a0 = area/(4 pi), a10 = gamma*m/(2 sqrt(4 pi)),
//   a11 = m/(2 sqrt(4 pi)), a2 = chi/6 + m/4.
ExpansionCoeffs expansion_from_geometry(double area, int euler_char,
                                        int num_cusps);

// a0/t + (a10 + a11 log t)/sqrt(t) + a2. Subtracting the kernel offset is the
// caller's business.
double eval_expansion(const ExpansionCoeffs& c, double t);

struct ExpansionFit {
  ExpansionCoeffs coeffs;
  double max_residual = 0.0;        // max |R(t_i) - model(t_i)|
  double max_residual_ratio = 0.0;  // max |residual|/sqrt(t_i): O(sqrt t) check
  double condition = 0.0;           // column-scaled condition of the design
  double spacing_ratio = 0.0;       // max/min consecutive log-t gap
};

// Weighted linear least squares in the basis {1/t, 1/sqrt(t), log(t)/sqrt(t),
// 1}, sample i weighted by sqrt(t_i) so an O(sqrt t) remainder enters as
// bounded equation error. Requires >= 8 samples with t <= 1/10. Geometric
// grids are the documented sample layout: the fit refuses collapsed spacing
// (ConditioningError carrying the condition estimate), which linear grids
// trip by design.
ExpansionFit fit_expansion(std::vector<std::pair<double, double>> samples);

struct DecayFit {
  bool exact_plateau = false;  // R(t) == h everywhere on the grid
  double rate = 0.0;           // fitted c in log|R(t)-h| ~ -c t + b
  double intercept = 0.0;
  bool monotone = false;  // |R(t)-h| non-increasing along the grid
  double max_fit_residual = 0.0;
};

// Fits the large-time decay rate on an increasing grid with min >= 1.
DecayFit check_large_t(const RelativeTrace& trace,
                       const std::vector<double>& t_grid);

// Two numeric columns (t, value); comma or whitespace separated; lines
// starting with '#' are comments; one optional header line. Anything else is
// a LoadError.
std::vector<std::pair<double, double>> parse_samples_csv(std::istream& in);
std::vector<std::pair<double, double>> read_samples_csv(
    const std::string& path);

// Ready-made traces for the model pairs (closed-form eval, exact
// coefficients, h = 0, decay rate 1/4).
RelativeTrace model_relative_trace(const ModelCuspPair& pair);
RelativeTrace multi_cusp_relative_trace(const MultiCuspModel& model);

// Builds a trace from measured samples: monotone cubic interpolation in
// log t inside the sampled range, the fitted expansion below it, and a
// fitted exponential decay model above it. Needs small-time samples
// satisfying fit_expansion's preconditions and at least 4 samples with
// t >= 1 for the decay fit.
RelativeTrace sampled_relative_trace(
    std::vector<std::pair<double, double>> samples, int kernel_offset);

}  // namespace cusp
