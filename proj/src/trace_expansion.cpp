#include "cuspspectra/trace_expansion.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <numbers>
#include <sstream>

#include "cuspspectra/errors.hpp"
#include "cuspspectra/numerics.hpp"

namespace cusp {

ExpansionCoeffs expansion_from_geometry(double area, int euler_char,
                                        int num_cusps) {
  if (!(area > 0.0))
    throw std::domain_error("expansion_from_geometry: area must be positive");
  if (num_cusps < 0)
    throw std::domain_error("expansion_from_geometry: negative cusp count");
  const double root4pi = std::sqrt(4.0 * std::numbers::pi);
  ExpansionCoeffs c;
  c.a0 = area / (4.0 * std::numbers::pi);
  c.a10 = euler_gamma * num_cusps / (2.0 * root4pi);
  c.a11 = num_cusps / (2.0 * root4pi);
  c.a2 = euler_char / 6.0 + num_cusps / 4.0;
  return c;
}

double eval_expansion(const ExpansionCoeffs& c, double t) {
  if (!(t > 0.0)) throw std::domain_error("eval_expansion: t must be positive");
  const double rt = std::sqrt(t);
  return c.a0 / t + (c.a10 + c.a11 * std::log(t)) / rt + c.a2;
}

namespace {

constexpr double kMaxFitTime = 0.1;
constexpr double kMaxCondition = 1e3;
constexpr double kMaxSpacingRatio = 20.0;
constexpr double kMinSpan = 100.0;  // two decades

void sort_and_merge(std::vector<std::pair<double, double>>& samples) {
  std::sort(samples.begin(), samples.end());
  // Repeated abscissae are averaged; they carry no spacing information.
  std::vector<std::pair<double, double>> merged;
  merged.reserve(samples.size());
  size_t i = 0;
  while (i < samples.size()) {
    size_t j = i;
    double acc = 0.0;
    while (j < samples.size() && samples[j].first == samples[i].first)
      acc += samples[j++].second;
    merged.emplace_back(samples[i].first, acc / static_cast<double>(j - i));
    i = j;
  }
  samples.swap(merged);
}

}  // namespace

ExpansionFit fit_expansion(std::vector<std::pair<double, double>> samples) {
  sort_and_merge(samples);
  const size_t n = samples.size();
  if (n < 8)
    throw std::domain_error("fit_expansion: need at least 8 distinct samples");
  for (const auto& [t, v] : samples) {
    if (!(t > 0.0) || t > kMaxFitTime)
      throw std::domain_error(
          "fit_expansion: samples must satisfy 0 < t <= 0.1");
  }

  ExpansionFit fit;
  const double span = samples.back().first / samples.front().first;
  double min_gap = std::numeric_limits<double>::infinity(), max_gap = 0.0;
  for (size_t i = 0; i + 1 < n; ++i) {
    const double gap =
        std::log(samples[i + 1].first) - std::log(samples[i].first);
    min_gap = std::min(min_gap, gap);
    max_gap = std::max(max_gap, gap);
  }
  fit.spacing_ratio = max_gap / min_gap;

  // Two extra columns (sqrt t, t) soak up the leading remainder orders so
  // they cannot bias the reported coefficients; they are fitted and dropped.
  constexpr int kCols = 6;
  Eigen::MatrixXd design(n, kCols);
  Eigen::VectorXd rhs(n);
  for (size_t i = 0; i < n; ++i) {
    const double t = samples[i].first;
    const double w = std::sqrt(t);
    const double rt = std::sqrt(t);
    design(i, 0) = w / t;
    design(i, 1) = w / rt;
    design(i, 2) = w * std::log(t) / rt;
    design(i, 3) = w;
    design(i, 4) = w * rt;
    design(i, 5) = w * t;
    rhs(i) = w * samples[i].second;
  }

  Eigen::VectorXd col_scale(kCols);
  for (int k = 0; k < kCols; ++k) col_scale(k) = design.col(k).norm();
  Eigen::MatrixXd scaled = design * col_scale.cwiseInverse().asDiagonal();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      scaled, Eigen::ComputeThinU | Eigen::ComputeThinV);
  fit.condition = svd.singularValues()(0) / svd.singularValues()(kCols - 1);

  if (span < kMinSpan)
    throw ConditioningError(
        "fit_expansion: samples span fewer than two decades of t",
        fit.condition);
  if (fit.condition > kMaxCondition)
    throw ConditioningError("fit_expansion: basis nearly collinear on these samples",
                            fit.condition);
  if (fit.spacing_ratio > kMaxSpacingRatio)
    throw ConditioningError(
        "fit_expansion: collapsed sample spacing (use a geometric grid)",
        fit.condition);

  Eigen::VectorXd c = col_scale.cwiseInverse().asDiagonal() * svd.solve(rhs);
  fit.coeffs = {c(0), c(1), c(2), c(3)};
  for (size_t i = 0; i < n; ++i) {
    const double t = samples[i].first;
    const double r = samples[i].second - eval_expansion(fit.coeffs, t);
    fit.max_residual = std::max(fit.max_residual, std::abs(r));
    fit.max_residual_ratio =
        std::max(fit.max_residual_ratio, std::abs(r) / std::sqrt(t));
  }
  return fit;
}

DecayFit check_large_t(const RelativeTrace& trace,
                       const std::vector<double>& t_grid) {
  if (t_grid.size() < 2)
    throw std::domain_error("check_large_t: need at least two grid points");
  if (!(t_grid.front() >= 1.0))
    throw std::domain_error("check_large_t: grid must start at t >= 1");
  for (size_t i = 0; i + 1 < t_grid.size(); ++i)
    if (!(t_grid[i] < t_grid[i + 1]))
      throw std::domain_error("check_large_t: grid must be increasing");

  const double h = static_cast<double>(trace.kernel_offset);
  std::vector<double> ts, logs;
  bool monotone = true;
  double prev = std::numeric_limits<double>::infinity();
  bool all_zero = true;
  for (double t : t_grid) {
    const double d = std::abs(trace.eval(t) - h);
    if (d > prev) monotone = false;
    prev = d;
    if (d == 0.0) continue;  // below representable decay; skip in the fit
    all_zero = false;
    ts.push_back(t);
    logs.push_back(std::log(d));
  }

  DecayFit out;
  out.monotone = monotone;
  if (all_zero || ts.size() < 2) {
    out.exact_plateau = true;
    return out;
  }
  const LineFit line = fit_line(ts, logs);
  out.rate = -line.slope;
  out.intercept = line.intercept;
  out.max_fit_residual = line.max_abs_residual;
  return out;
}

std::vector<std::pair<double, double>> parse_samples_csv(std::istream& in) {
  std::vector<std::pair<double, double>> samples;
  std::string line;
  bool header_allowed = true;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string body = line;
    if (const auto hash = body.find('#'); hash != std::string::npos)
      body.erase(hash);
    for (char& ch : body)
      if (ch == ',' || ch == '\t' || ch == '\r') ch = ' ';
    std::istringstream row(body);
    std::vector<std::string> tokens;
    for (std::string tok; row >> tok;) tokens.push_back(tok);
    if (tokens.empty()) continue;

    double t = 0, v = 0;
    size_t pos_t = 0, pos_v = 0;
    bool numeric = tokens.size() == 2;
    if (numeric) {
      try {
        t = std::stod(tokens[0], &pos_t);
        v = std::stod(tokens[1], &pos_v);
      } catch (const std::exception&) {
        numeric = false;
      }
      if (pos_t != tokens[0].size() || pos_v != tokens[1].size())
        numeric = false;
    }
    if (!numeric) {
      if (header_allowed) {
        header_allowed = false;  // one header line is tolerated
        continue;
      }
      throw LoadError("csv: malformed sample line " + std::to_string(line_no) +
                      ": '" + line + "'");
    }
    header_allowed = false;
    samples.emplace_back(t, v);
  }
  if (samples.empty()) throw LoadError("csv: no samples found");
  return samples;
}

std::vector<std::pair<double, double>> read_samples_csv(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("csv: cannot open '" + path + "'");
  return parse_samples_csv(in);
}

RelativeTrace model_relative_trace(const ModelCuspPair& pair) {
  RelativeTrace trace;
  trace.eval = [pair](double t) { return relative_trace_exact(pair, t); };
  trace.kernel_offset = 0;
  trace.decay_rate = 0.25;
  const double root4pi = std::sqrt(4.0 * std::numbers::pi);
  if (pair.a > 1.0) {
    if (pair.domain == CuspDomain::full_half_line) {
      const double c = std::log(pair.a) / root4pi;
      trace.coeffs.a10 = -c;
      trace.small_t_remainder = [c](double t) {
        return -(c / std::sqrt(t)) * std::expm1(-0.25 * t);
      };
    } else {
      trace.coeffs.a2 = -0.25;  // Erf saturates; remainder is O(t)
      const double log_a = std::log(pair.a);
      trace.small_t_remainder = [log_a](double t) {
        // 1/4 - e^{-t/4} Erf(log a / sqrt t)/sqrt(4 pi), split into two
        // nonnegative pieces so nothing cancels.
        const double decay = std::exp(-0.25 * t);
        return 0.25 * (-std::expm1(-0.25 * t) +
                       decay * std::erfc(log_a / std::sqrt(t)));
      };
    }
  }
  return trace;
}

RelativeTrace multi_cusp_relative_trace(const MultiCuspModel& model) {
  RelativeTrace trace;
  trace.eval = [model](double t) { return multi_cusp_trace(model, t); };
  trace.kernel_offset = 0;
  trace.decay_rate = 0.25;
  CompensatedSum la;
  for (double a : model.starts) la.add(std::log(a));
  const double c = la.value() / std::sqrt(4.0 * std::numbers::pi);
  trace.coeffs.a10 = -c;
  if (c != 0.0)
    trace.small_t_remainder = [c](double t) {
      return -(c / std::sqrt(t)) * std::expm1(-0.25 * t);
    };
  return trace;
}

namespace {

// Monotone piecewise-cubic interpolation (Fritsch-Carlson slopes) on a
// strictly increasing abscissa.
class Pchip {
public:
  Pchip(std::vector<double> x, std::vector<double> y)
      : x_(std::move(x)), y_(std::move(y)), d_(x_.size(), 0.0) {
    const size_t n = x_.size();
    std::vector<double> h(n - 1), m(n - 1);
    for (size_t i = 0; i + 1 < n; ++i) {
      h[i] = x_[i + 1] - x_[i];
      m[i] = (y_[i + 1] - y_[i]) / h[i];
    }
    if (n == 2) {
      d_[0] = d_[1] = m[0];
      return;
    }
    for (size_t i = 1; i + 1 < n; ++i) {
      if (m[i - 1] * m[i] <= 0.0) {
        d_[i] = 0.0;
      } else {
        const double w1 = 2.0 * h[i] + h[i - 1];
        const double w2 = h[i] + 2.0 * h[i - 1];
        d_[i] = (w1 + w2) / (w1 / m[i - 1] + w2 / m[i]);
      }
    }
    d_[0] = edge_slope(h[0], h[1], m[0], m[1]);
    d_[n - 1] = edge_slope(h[n - 2], h[n - 3], m[n - 2], m[n - 3]);
  }

  double operator()(double x) const {
    size_t k =
        std::upper_bound(x_.begin(), x_.end(), x) - x_.begin();
    k = std::clamp<size_t>(k, 1, x_.size() - 1) - 1;
    const double h = x_[k + 1] - x_[k];
    const double s = (x - x_[k]) / h;
    const double s2 = s * s, s3 = s2 * s;
    return y_[k] * (2 * s3 - 3 * s2 + 1) + h * d_[k] * (s3 - 2 * s2 + s) +
           y_[k + 1] * (-2 * s3 + 3 * s2) + h * d_[k + 1] * (s3 - s2);
  }

private:
  static double edge_slope(double h0, double h1, double m0, double m1) {
    double d = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
    if (d * m0 <= 0.0) return 0.0;
    if (m0 * m1 <= 0.0 && std::abs(d) > 3.0 * std::abs(m0)) return 3.0 * m0;
    return d;
  }

  std::vector<double> x_, y_, d_;
};

}  // namespace

RelativeTrace sampled_relative_trace(
    std::vector<std::pair<double, double>> samples, int kernel_offset) {
  sort_and_merge(samples);
  if (samples.size() < 12)
    throw std::domain_error("sampled_relative_trace: too few samples");

  std::vector<std::pair<double, double>> small;
  for (const auto& s : samples)
    if (s.first <= kMaxFitTime) small.push_back(s);
  const ExpansionFit fit = fit_expansion(small);

  std::vector<double> large;
  for (const auto& s : samples)
    if (s.first >= 1.0) large.push_back(s.first);
  if (large.size() < 4)
    throw std::domain_error(
        "sampled_relative_trace: need at least 4 samples with t >= 1 for the "
        "decay fit");

  RelativeTrace probe;  // decay fit runs on the raw interpolant
  std::vector<double> us, vs;
  us.reserve(samples.size());
  vs.reserve(samples.size());
  for (const auto& [t, v] : samples) {
    us.push_back(std::log(t));
    vs.push_back(v);
  }
  auto interp = std::make_shared<Pchip>(std::move(us), std::move(vs));
  const double t_min = samples.front().first;
  const double t_max = samples.back().first;
  const double v_max = samples.back().second;

  probe.eval = [interp](double t) { return (*interp)(std::log(t)); };
  probe.kernel_offset = kernel_offset;
  std::vector<double> grid(large.begin(), large.end());
  const DecayFit decay = check_large_t(probe, grid);
  if (!decay.exact_plateau && !(decay.rate > 0.0))
    throw ModelMismatchError(
        "sampled_relative_trace: samples do not decay toward the kernel "
        "offset",
        t_max);

  RelativeTrace trace;
  trace.coeffs = fit.coeffs;
  trace.kernel_offset = kernel_offset;
  trace.decay_rate = decay.exact_plateau ? 1.0 : decay.rate;
  const double h = static_cast<double>(kernel_offset);
  const double tail_amp = v_max - h;
  const double rate = trace.decay_rate;
  const ExpansionCoeffs coeffs = fit.coeffs;
  trace.eval = [interp, coeffs, t_min, t_max, tail_amp, rate,
                h](double t) {
    if (!(t > 0.0))
      throw std::domain_error("sampled trace: t must be positive");
    if (t < t_min) return eval_expansion(coeffs, t);
    if (t > t_max) return h + tail_amp * std::exp(-rate * (t - t_max));
    return (*interp)(std::log(t));
  };
  return trace;
}

}  // namespace cusp
