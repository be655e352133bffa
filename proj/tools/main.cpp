// Batch front end: every subcommand reads files or builtin models, runs one
// computation, and emits machine-readable CSV/JSON with 17-digit floats.
// Exit codes: 0 ok, 2 usage or parse problem, 3 contract violation,
// 4 numerical failure (non-convergence, mismatch, tolerance breach).

#include <CLI11.hpp>

#include <cuspspectra/cusp_model.hpp>
#include <cuspspectra/errors.hpp>
#include <cuspspectra/numerics.hpp>
#include <cuspspectra/polyakov.hpp>
#include <cuspspectra/surface.hpp>
#include <cuspspectra/trace_expansion.hpp>
#include <cuspspectra/zeta_det.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace {

using cusp::repr17;

struct GlobalOpts {
  std::string out;
  double tol = -1.0;  // unset; per-command defaults apply
  unsigned long long seed = 1;
  int threads = 1;
};

// start:stop:count or start:stop:geometric|linear:count; geometric default.
std::vector<double> parse_grid(const std::string& text) {
  std::vector<std::string> tok;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, ':')) tok.push_back(cur);
  if (tok.size() != 3 && tok.size() != 4)
    throw std::invalid_argument("grid must be start:stop[:mode]:count, got '" +
                                text + "'");
  bool geometric = true;
  if (tok.size() == 4) {
    if (tok[2] == "geometric")
      geometric = true;
    else if (tok[2] == "linear")
      geometric = false;
    else
      throw std::invalid_argument("grid mode must be geometric or linear");
  }
  double start = 0.0, stop = 0.0;
  long count = 0;
  try {
    size_t pos = 0;
    start = std::stod(tok[0], &pos);
    if (pos != tok[0].size()) throw std::invalid_argument("");
    stop = std::stod(tok[1], &pos);
    if (pos != tok[1].size()) throw std::invalid_argument("");
    count = std::stol(tok.back(), &pos);
    if (pos != tok.back().size()) throw std::invalid_argument("");
  } catch (const std::exception&) {
    throw std::invalid_argument("grid fields must be numeric: '" + text + "'");
  }
  if (count < 1 || count > 1000000)
    throw std::invalid_argument("grid count out of range");
  if (!(stop > start) && count > 1)
    throw std::invalid_argument("grid needs stop > start");
  if (geometric && !(start > 0.0))
    throw std::invalid_argument("geometric grid needs start > 0");

  std::vector<double> t(count);
  if (count == 1) {
    t[0] = start;
    return t;
  }
  for (long i = 0; i < count; ++i) {
    const double f = static_cast<double>(i) / (count - 1);
    t[i] = geometric ? start * std::pow(stop / start, f)
                     : start + f * (stop - start);
  }
  t.back() = stop;
  return t;
}

cusp::CuspDomain parse_domain(const std::string& name) {
  if (name == "full") return cusp::CuspDomain::full_half_line;
  if (name == "restricted") return cusp::CuspDomain::restricted;
  throw std::invalid_argument("domain must be full or restricted");
}

std::vector<double> read_field_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw cusp::LoadError("cannot open field file: " + path);
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    double v;
    while (ls >> v) values.push_back(v);
    if (!ls.eof() && ls.fail()) {
      ls.clear();
      std::string junk;
      if (ls >> junk)
        throw cusp::LoadError("field file has non-numeric token: " + junk);
    }
  }
  if (values.empty()) throw cusp::LoadError("field file is empty: " + path);
  return values;
}

cusp::ConformalFactor factor_from_values(const cusp::DiscreteSurface& surf,
                                         std::vector<double> values,
                                         int decay_order) {
  cusp::ConformalFactor f;
  f.values = std::move(values);
  f.decay_order = decay_order;
  double grown = 0.0;
  for (const cusp::CuspPatch& patch : surf.cusps)
    for (size_t k = 0; k < patch.sites.size(); ++k)
      if (patch.sites[k] >= 0 &&
          patch.sites[k] < static_cast<int>(f.values.size()))
        grown = std::max(grown, std::abs(f.values[patch.sites[k]]) *
                                    std::pow(patch.y[k], decay_order));
  f.bound = grown * (1.0 + 1e-9) + 1e-12;
  return f;
}

// Output sink: --out path is validated before any computation starts.
class Sink {
public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_)
        throw std::invalid_argument("cannot open output path: " + path);
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
  std::unique_ptr<std::ofstream> file_;
};

int cmd_model_trace(const GlobalOpts& g, double a, const std::string& domain,
                    const std::string& grid_text) {
  Sink sink(g.out);
  const double tol = g.tol > 0.0 ? g.tol : 1e-8;
  const cusp::ModelCuspPair pair(a, parse_domain(domain));
  const std::vector<double> t = parse_grid(grid_text);
  const int n = static_cast<int>(t.size());

  std::vector<double> exact(n), quad(n);
  cusp::parallel_for(n, g.threads, [&](int lo, int hi) {
    for (int i = lo; i < hi; ++i) {
      exact[i] = cusp::relative_trace_exact(pair, t[i]);
      quad[i] = cusp::relative_trace_quadrature(pair, t[i]);
    }
  });

  std::ostream& os = sink.stream();
  os << "t,exact,quadrature,abs_diff\n";
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    const double diff = std::abs(exact[i] - quad[i]);
    worst = std::max(worst, diff);
    os << repr17(t[i]) << ',' << repr17(exact[i]) << ',' << repr17(quad[i])
       << ',' << repr17(diff) << '\n';
  }
  if (worst > tol) {
    std::cerr << "model-trace: methods disagree by " << repr17(worst)
              << " (tol " << repr17(tol) << ")\n";
    return 4;
  }
  return 0;
}

int cmd_det(const GlobalOpts& g, double a, const std::string& domain,
            const std::string& samples, int kernel_offset, double t0) {
  Sink sink(g.out);
  cusp::RelativeTrace trace;
  if (!samples.empty()) {
    trace = cusp::sampled_relative_trace(cusp::read_samples_csv(samples),
                                         kernel_offset);
  } else {
    trace = cusp::model_relative_trace(cusp::ModelCuspPair(a, parse_domain(domain)));
  }
  cusp::ZetaOptions opts;
  opts.split_point = t0;
  if (g.tol > 0.0) opts.method_tol = g.tol;
  const cusp::ZetaResult result = cusp::zeta_prime_zero(trace, opts);
  cusp::write_zeta_json(sink.stream(), result);
  return 0;
}

int cmd_fit_expansion(const GlobalOpts& g, const std::string& samples) {
  Sink sink(g.out);
  const cusp::ExpansionFit fit =
      cusp::fit_expansion(cusp::read_samples_csv(samples));
  std::ostream& os = sink.stream();
  os << "{\n";
  os << "  \"a0\": " << repr17(fit.coeffs.a0) << ",\n";
  os << "  \"a10\": " << repr17(fit.coeffs.a10) << ",\n";
  os << "  \"a11\": " << repr17(fit.coeffs.a11) << ",\n";
  os << "  \"a2\": " << repr17(fit.coeffs.a2) << ",\n";
  os << "  \"condition\": " << repr17(fit.condition) << ",\n";
  os << "  \"max_residual\": " << repr17(fit.max_residual) << ",\n";
  os << "  \"max_residual_ratio\": " << repr17(fit.max_residual_ratio) << ",\n";
  os << "  \"spacing_ratio\": " << repr17(fit.spacing_ratio) << "\n";
  os << "}\n";
  return 0;
}

int cmd_polyakov(const GlobalOpts& g, const std::string& surface_path,
                 const std::string& phi_path, bool random, double amplitude,
                 int decay_order, bool cocycle) {
  Sink sink(g.out);
  const cusp::SurfaceLoad load = cusp::load_surface(surface_path);
  const cusp::DiscreteSurface& surf = load.surface;

  cusp::ConformalFactor phi;
  if (!phi_path.empty())
    phi = factor_from_values(surf, read_field_file(phi_path), decay_order);
  else if (random)
    phi = cusp::random_decaying_factor(surf, g.seed, amplitude, decay_order);
  else
    throw std::invalid_argument("polyakov needs --phi FILE or --random");

  const cusp::PolyakovDelta d = cusp::polyakov_delta(surf, phi);
  std::ostream& os = sink.stream();
  os << "{\n";
  os << "  \"energy_term\": " << repr17(d.energy_term) << ",\n";
  os << "  \"curvature_term\": " << repr17(d.curvature_term) << ",\n";
  os << "  \"area_term\": " << repr17(d.area_term) << ",\n";
  os << "  \"normalized\": " << repr17(d.normalized()) << ",\n";
  os << "  \"total\": " << repr17(d.total());
  if (cocycle) {
    const cusp::ConformalFactor psi =
        cusp::random_decaying_factor(surf, g.seed + 1, amplitude, decay_order);
    os << ",\n  \"cocycle_residual\": "
       << repr17(cusp::cocycle_residual(surf, phi, psi));
    os << ",\n  \"mesh_tolerance\": " << repr17(surf.mesh_tolerance);
  }
  os << "\n}\n";
  return 0;
}

int cmd_uniformize(const GlobalOpts& g, const std::string& surface_path,
                   const std::string& phi0_path, double perturb,
                   int decay_order, double grad_tol, int max_iter,
                   const std::string& history_path) {
  Sink sink(g.out);
  std::unique_ptr<Sink> history;
  if (!history_path.empty()) history = std::make_unique<Sink>(history_path);

  const cusp::SurfaceLoad load = cusp::load_surface(surface_path);
  const cusp::DiscreteSurface& surf = load.surface;

  cusp::ConformalFactor start;
  if (!phi0_path.empty())
    start = factor_from_values(surf, read_field_file(phi0_path), decay_order);
  else if (perturb > 0.0)
    start = cusp::random_decaying_factor(surf, g.seed, perturb, decay_order);
  else
    start = factor_from_values(
        surf, std::vector<double>(surf.n_sites(), 0.0), decay_order);

  cusp::MinimizeOptions opts;
  opts.grad_tol = grad_tol;
  opts.max_iterations = max_iter;
  opts.record_history = history != nullptr;
  const cusp::ExtremalReport rep = cusp::minimize_ops(surf, start, opts);

  if (history) {
    std::ostream& hs = history->stream();
    hs << "iteration,functional,grad_norm,step\n";
    for (const cusp::IterationRecord& rec : rep.history)
      hs << rec.iteration << ',' << repr17(rec.functional) << ','
         << repr17(rec.grad_norm) << ',' << repr17(rec.step) << '\n';
  }

  const char* status = rep.status == cusp::MinimizeStatus::converged
                           ? "converged"
                           : rep.status == cusp::MinimizeStatus::line_search_failure
                                 ? "line_search_failure"
                                 : "max_iterations";
  std::ostream& os = sink.stream();
  os << "{\n";
  os << "  \"status\": \"" << status << "\",\n";
  os << "  \"iterations\": " << rep.iterations << ",\n";
  os << "  \"functional_initial\": " << repr17(rep.functional_initial) << ",\n";
  os << "  \"functional_final\": " << repr17(rep.functional_final) << ",\n";
  os << "  \"grad_norm\": " << repr17(rep.grad_norm) << ",\n";
  os << "  \"area_initial\": " << repr17(rep.area_initial) << ",\n";
  os << "  \"area_final\": " << repr17(rep.area_final) << ",\n";
  os << "  \"curvature\": {\n";
  os << "    \"mean\": " << repr17(rep.curvature.mean) << ",\n";
  os << "    \"stddev\": " << repr17(rep.curvature.stddev) << ",\n";
  os << "    \"rel_stddev\": " << repr17(rep.curvature.rel_stddev) << ",\n";
  os << "    \"min\": " << repr17(rep.curvature.min) << ",\n";
  os << "    \"max\": " << repr17(rep.curvature.max) << ",\n";
  os << "    \"interior_sites\": " << rep.curvature.interior_sites << "\n";
  os << "  }\n";
  os << "}\n";
  return rep.status == cusp::MinimizeStatus::converged ? 0 : 4;
}

int cmd_gauss_bonnet(const GlobalOpts& g, const std::string& surface_path) {
  Sink sink(g.out);
  const cusp::SurfaceLoad load = cusp::load_surface(surface_path);
  const cusp::GaussBonnetReport rep = cusp::gauss_bonnet(load.surface);
  std::ostream& os = sink.stream();
  os << "{\n";
  os << "  \"integral\": " << repr17(rep.integral) << ",\n";
  os << "  \"target\": " << repr17(rep.target) << ",\n";
  os << "  \"residual\": " << repr17(rep.residual) << ",\n";
  os << "  \"within_tolerance\": " << (rep.within_tolerance ? "true" : "false")
     << ",\n";
  os << "  \"load_asymmetry\": " << repr17(load.asymmetry) << "\n";
  os << "}\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Relative heat traces, zeta determinants, and constant-curvature "
      "metrics on cusped surfaces"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--out", g.out, "Write output here instead of stdout");
  app.add_option("--tol", g.tol,
                 "Command tolerance (model-trace: max |exact - quadrature|, "
                 "det: allowed gap between the two derivative methods)");
  app.add_option("--seed", g.seed, "Seed for randomized fields");
  app.add_option("--threads", g.threads,
                 "Worker threads (CUSP_SPECTRA_THREADS overrides)")
      ->check(CLI::PositiveNumber);

  double a = 2.0;
  std::string domain = "full";
  std::string grid_text;
  CLI::App* mt = app.add_subcommand(
      "model-trace", "Compare the closed-form model trace with quadrature");
  mt->add_option("--a", a, "Cusp truncation height (>= 1)")->required();
  mt->add_option("--domain", domain, "full or restricted");
  mt->add_option("--t", grid_text, "t grid, start:stop[:geometric|linear]:count")
      ->required();

  double det_a = 2.0;
  std::string det_domain = "full";
  std::string det_samples;
  int det_offset = 0;
  double det_t0 = 1.0;
  CLI::App* det = app.add_subcommand(
      "det", "Zeta-regularized relative determinant from a trace");
  det->add_option("--a", det_a, "Builtin model: truncation height");
  det->add_option("--domain", det_domain, "Builtin model: full or restricted");
  det->add_option("--samples", det_samples,
                  "CSV of (t, trace) samples instead of the builtin model");
  det->add_option("--offset", det_offset, "Kernel offset of the sampled trace");
  det->add_option("--t0", det_t0, "Mellin split point")
      ->check(CLI::PositiveNumber);

  std::string fit_samples;
  CLI::App* fit = app.add_subcommand(
      "fit-expansion", "Fit the four-term small-t expansion to samples");
  fit->add_option("--samples", fit_samples, "CSV of (t, trace) samples")
      ->required();

  std::string surface_path, phi_path;
  bool random_phi = false, cocycle = false;
  double amplitude = 0.1;
  int decay_order = 2;
  CLI::App* pol = app.add_subcommand(
      "polyakov", "Log-determinant change under a conformal factor");
  pol->add_option("--surface", surface_path, "Surface JSON file")->required();
  pol->add_option("--phi", phi_path, "Conformal factor, one value per site");
  pol->add_flag("--random", random_phi, "Seeded random decaying factor");
  pol->add_option("--amplitude", amplitude, "Amplitude of the random factor");
  pol->add_option("--decay-order", decay_order, "Cusp decay order of factors");
  pol->add_flag("--cocycle", cocycle,
                "Also report the two-step composition residual");

  std::string uni_surface, phi0_path, history_path;
  double perturb = 0.0, grad_tol = 1e-8;
  int max_iter = 20000;
  int uni_decay = 2;
  CLI::App* uni = app.add_subcommand(
      "uniformize", "Drive the curvature to a constant by gradient descent");
  uni->add_option("--surface", uni_surface, "Surface JSON file")->required();
  uni->add_option("--phi0", phi0_path, "Starting factor file");
  uni->add_option("--perturb", perturb, "Seeded random start of this amplitude");
  uni->add_option("--decay-order", uni_decay, "Cusp decay order of the start");
  uni->add_option("--grad-tol", grad_tol, "Stop when the gradient norm drops here")
      ->check(CLI::PositiveNumber);
  uni->add_option("--max-iter", max_iter, "Iteration budget")
      ->check(CLI::PositiveNumber);
  uni->add_option("--history", history_path, "Write per-iteration CSV here");

  std::string gb_surface;
  CLI::App* gb = app.add_subcommand(
      "gauss-bonnet", "Check the curvature integral against 2 pi chi");
  gb->add_option("--surface", gb_surface, "Surface JSON file")->required();

  for (CLI::App* sub : {mt, det, fit, pol, uni, gb}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  try {
    if (const char* env = std::getenv("CUSP_SPECTRA_THREADS")) {
      size_t pos = 0;
      const int n = std::stoi(env, &pos);
      if (pos != std::string(env).size() || n < 1)
        throw std::invalid_argument(
            "CUSP_SPECTRA_THREADS must be a positive integer");
      g.threads = n;
    }

    if (mt->parsed()) return cmd_model_trace(g, a, domain, grid_text);
    if (det->parsed())
      return cmd_det(g, det_a, det_domain, det_samples, det_offset, det_t0);
    if (fit->parsed()) return cmd_fit_expansion(g, fit_samples);
    if (pol->parsed())
      return cmd_polyakov(g, surface_path, phi_path, random_phi, amplitude,
                          decay_order, cocycle);
    if (uni->parsed())
      return cmd_uniformize(g, uni_surface, phi0_path, perturb, uni_decay,
                            grad_tol, max_iter, history_path);
    if (gb->parsed()) return cmd_gauss_bonnet(g, gb_surface);
    std::cerr << "no subcommand\n";
    return 2;
  } catch (const cusp::ContractError& e) {
    std::cerr << "contract violation: " << e.what() << "\n";
    return 3;
  } catch (const cusp::ConvergenceError& e) {
    std::cerr << "did not converge: " << e.what() << "\n";
    return 4;
  } catch (const cusp::ModelMismatchError& e) {
    std::cerr << "model mismatch: " << e.what() << "\n";
    return 4;
  } catch (const cusp::MethodDisagreement& e) {
    std::cerr << "method disagreement: " << e.what() << "\n";
    return 4;
  } catch (const cusp::ConditioningError& e) {
    std::cerr << "ill-conditioned problem: " << e.what() << "\n";
    return 4;
  } catch (const cusp::LoadError& e) {
    std::cerr << "load error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
