#include <cuspspectra/surface.hpp>

#include <cuspspectra/errors.hpp>
#include <cuspspectra/numerics.hpp>

#include <json.hpp>

#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <vector>

namespace cusp {

namespace {

using json = nlohmann::json;

// Uniform in [-1, 1] from the top 53 bits, independent of the standard
// library's distribution internals so seeded runs are reproducible.
double uniform_pm1(std::mt19937_64& rng) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return 2.0 * u - 1.0;
}

void require(bool ok, const std::string& invariant) {
  if (!ok) throw LoadError("surface file violates invariant: " + invariant);
}

}  // namespace

double DiscreteSurface::area() const {
  CompensatedSum s;
  for (double w : weights) s.add(w);
  return s.value();
}

DiscreteSurface build_cusp_grid(double a, double Y, int n_y, int n_x) {
  if (!(a >= 1.0)) throw std::domain_error("cusp grid needs a >= 1");
  if (!(Y > a)) throw std::domain_error("cusp grid needs Y > a");
  if (n_y < 8) throw std::domain_error("cusp grid needs n_y >= 8");
  if (n_x < 4) throw std::domain_error("cusp grid needs n_x >= 4");

  // Geometric height levels y_i = a r^i and cell edges at the geometric
  // midpoints, so each weight is the exact cell integral of y^-2 dy dx.
  // The row weights then telescope: total area is dx n_x (1/a - 1/Y).
  std::vector<double> y(n_y), edge(n_y + 1);
  const double ratio = std::pow(Y / a, 1.0 / (n_y - 1));
  for (int i = 0; i < n_y; ++i) y[i] = a * std::pow(ratio, i);
  y[n_y - 1] = Y;
  edge[0] = a;
  edge[n_y] = Y;
  for (int i = 1; i < n_y; ++i) edge[i] = std::sqrt(y[i - 1] * y[i]);

  const double dx = 2.0 * M_PI / n_x;
  const int n = n_y * n_x;
  auto at = [n_x](int i, int j) { return i * n_x + j; };

  DiscreteSurface surf;
  surf.weights.resize(n);
  surf.curvature.assign(n, -1.0);
  for (int i = 0; i < n_y; ++i) {
    const double row_w = dx * (1.0 / edge[i] - 1.0 / edge[i + 1]);
    for (int j = 0; j < n_x; ++j) surf.weights[at(i, j)] = row_w;
  }

  // Flat five-point stiffness. The 2D Dirichlet integral is conformally
  // invariant, so the hyperbolic metric never enters the form, only the
  // weights above. Vertical conductance dx/h across a gap h, horizontal
  // conductance m/dx across a cell of height m, periodic in x.
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(8) * n);
  auto add_edge = [&trips](int p, int q, double c) {
    trips.emplace_back(p, p, c);
    trips.emplace_back(q, q, c);
    trips.emplace_back(p, q, -c);
    trips.emplace_back(q, p, -c);
  };
  for (int i = 0; i + 1 < n_y; ++i) {
    const double c = dx / (y[i + 1] - y[i]);
    for (int j = 0; j < n_x; ++j) add_edge(at(i, j), at(i + 1, j), c);
  }
  for (int i = 0; i < n_y; ++i) {
    const double c = (edge[i + 1] - edge[i]) / dx;
    for (int j = 0; j < n_x; ++j) add_edge(at(i, j), at(i, (j + 1) % n_x), c);
  }
  surf.laplacian.resize(n, n);
  surf.laplacian.setFromTriplets(trips.begin(), trips.end());
  surf.laplacian.makeCompressed();

  CuspPatch patch;
  patch.sites.resize(n);
  patch.y.resize(n);
  for (int i = 0; i < n_y; ++i)
    for (int j = 0; j < n_x; ++j) {
      patch.sites[at(i, j)] = at(i, j);
      patch.y[at(i, j)] = y[i];
    }
  surf.cusps.push_back(std::move(patch));
  surf.genus = 0;
  surf.complete = false;  // a truncated cusp is a fragment
  surf.mesh_tolerance = 1e-9;
  return surf;
}

namespace {

void validate_surface(DiscreteSurface& surf, double* asymmetry_out,
                      double* gb_residual_out) {
  const int n = surf.n_sites();
  require(n >= 1, "at least one site");
  require(static_cast<int>(surf.curvature.size()) == n,
          "curvature matches site count");
  require(surf.genus >= 0, "genus nonnegative");
  require(std::isfinite(surf.mesh_tolerance) && surf.mesh_tolerance > 0.0,
          "positive mesh tolerance");
  for (double w : surf.weights)
    require(std::isfinite(w) && w > 0.0, "positive weights");
  for (double k : surf.curvature) require(std::isfinite(k), "finite curvature");
  require(surf.laplacian.rows() == n && surf.laplacian.cols() == n,
          "laplacian dimensions match site count");

  // Symmetrize, keeping the worst deviation as a data-quality report.
  double asym = 0.0;
  double scale = 0.0;
  Eigen::SparseMatrix<double> lt = surf.laplacian.transpose();
  Eigen::SparseMatrix<double> diff = surf.laplacian - lt;
  for (int k = 0; k < diff.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(diff, k); it; ++it)
      asym = std::max(asym, std::abs(it.value()));
  for (int k = 0; k < surf.laplacian.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(surf.laplacian, k); it;
         ++it) {
      require(std::isfinite(it.value()), "finite laplacian entries");
      scale = std::max(scale, std::abs(it.value()));
    }
  require(asym <= 1e-6 * std::max(1.0, scale), "laplacian symmetric");
  if (asym > 0.0) {
    surf.laplacian = 0.5 * (surf.laplacian + lt);
    surf.laplacian.makeCompressed();
  }
  if (asymmetry_out) *asymmetry_out = asym;

  // The form must annihilate constants: every row sums to zero.
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  Eigen::VectorXd rowsum = surf.laplacian * ones;
  const double row_tol = 1e-10 * std::max(1.0, scale);
  for (int i = 0; i < n; ++i)
    require(std::abs(rowsum[i]) <= row_tol, "laplacian annihilates constants");

  // Spot-check positive semidefiniteness with seeded probes. Not a proof,
  // but catches sign errors and bad conductances in data files.
  std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
  for (int probe = 0; probe < 8; ++probe) {
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x[i] = uniform_pm1(rng);
    const double q = x.dot(surf.laplacian * x);
    require(q >= -1e-9 * std::max(1.0, scale) * x.squaredNorm(),
            "laplacian positive semidefinite");
  }

  std::set<int> seen;
  for (const CuspPatch& patch : surf.cusps) {
    require(!patch.sites.empty(), "cusp patch nonempty");
    require(patch.sites.size() == patch.y.size(),
            "cusp heights match cusp sites");
    for (size_t k = 0; k < patch.sites.size(); ++k) {
      const int s = patch.sites[k];
      require(s >= 0 && s < n, "cusp sites in range");
      require(seen.insert(s).second, "cusp patches disjoint");
      require(std::isfinite(patch.y[k]) && patch.y[k] >= 1.0,
              "cusp heights at least 1");
    }
  }

  if (surf.complete) {
    CompensatedSum s;
    for (int i = 0; i < n; ++i) s.add(surf.weights[i] * surf.curvature[i]);
    const double target = 2.0 * M_PI * surf.euler_characteristic();
    const double residual = s.value() - target;
    require(std::abs(residual) <= surf.mesh_tolerance,
            "curvature integral consistent with topology");
    if (gb_residual_out) *gb_residual_out = residual;
  } else if (gb_residual_out) {
    *gb_residual_out = 0.0;
  }
}

}  // namespace

SurfaceLoad load_surface(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open surface file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw LoadError("surface file is not valid JSON: " + std::string(e.what()));
  }

  SurfaceLoad out;
  DiscreteSurface& surf = out.surface;
  try {
    require(j.is_object(), "top-level object");
    for (const char* key : {"weights", "curvature", "laplacian", "genus",
                            "complete", "tolerance"})
      require(j.contains(key), std::string("missing key: ") + key);

    surf.weights = j.at("weights").get<std::vector<double>>();
    surf.curvature = j.at("curvature").get<std::vector<double>>();
    surf.genus = j.at("genus").get<int>();
    surf.complete = j.at("complete").get<bool>();
    surf.mesh_tolerance = j.at("tolerance").get<double>();
    const int n = surf.n_sites();
    if (j.contains("sites"))
      require(j.at("sites").get<int>() == n, "site count matches weights");

    const json& lap = j.at("laplacian");
    require(lap.is_object() && lap.contains("format") &&
                lap.at("format").get<std::string>() == "triplets" &&
                lap.contains("entries"),
            "laplacian in triplet format");
    std::vector<Eigen::Triplet<double>> trips;
    for (const json& e : lap.at("entries")) {
      require(e.is_array() && e.size() == 3, "triplet is [i, j, value]");
      const int i = e.at(0).get<int>();
      const int jj = e.at(1).get<int>();
      require(i >= 0 && i < n && jj >= 0 && jj < n, "triplet indices in range");
      trips.emplace_back(i, jj, e.at(2).get<double>());
    }
    surf.laplacian.resize(n, n);
    surf.laplacian.setFromTriplets(trips.begin(), trips.end());
    surf.laplacian.makeCompressed();

    if (j.contains("cusps")) {
      for (const json& c : j.at("cusps")) {
        CuspPatch patch;
        patch.sites = c.at("sites").get<std::vector<int>>();
        patch.y = c.at("y").get<std::vector<double>>();
        surf.cusps.push_back(std::move(patch));
      }
    }
  } catch (const json::exception& e) {
    throw LoadError("surface file has malformed fields: " +
                    std::string(e.what()));
  }

  validate_surface(surf, &out.asymmetry, &out.gauss_bonnet_residual);
  return out;
}

void save_surface(const DiscreteSurface& surface, const std::string& path) {
  json j;
  j["sites"] = surface.n_sites();
  j["weights"] = surface.weights;
  j["curvature"] = surface.curvature;
  j["genus"] = surface.genus;
  j["complete"] = surface.complete;
  j["tolerance"] = surface.mesh_tolerance;
  json entries = json::array();
  for (int k = 0; k < surface.laplacian.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(surface.laplacian, k);
         it; ++it)
      entries.push_back({it.row(), it.col(), it.value()});
  j["laplacian"] = {{"format", "triplets"}, {"entries", std::move(entries)}};
  json cusps = json::array();
  for (const CuspPatch& patch : surface.cusps)
    cusps.push_back({{"sites", patch.sites}, {"y", patch.y}});
  j["cusps"] = std::move(cusps);

  std::ofstream outf(path);
  if (!outf) throw LoadError("cannot write surface file: " + path);
  outf << j.dump(1) << "\n";
}

DiscreteSurface conformal_transform(const DiscreteSurface& surface,
                                    const ConformalFactor& factor) {
  check_conformal_factor(surface, factor);
  const int n = surface.n_sites();
  DiscreteSurface out = surface;  // same form, same topology
  const std::vector<double> lap_phi = laplace_apply(surface, factor.values);
  for (int i = 0; i < n; ++i) {
    const double e2 = std::exp(2.0 * factor.values[i]);
    out.weights[i] = surface.weights[i] * e2;
    out.curvature[i] = (lap_phi[i] + surface.curvature[i]) / e2;
  }
  return out;
}

GaussBonnetReport gauss_bonnet(const DiscreteSurface& surface) {
  if (!surface.complete)
    throw ContractError(
        "gauss_bonnet needs a complete surface; this one is a fragment");
  GaussBonnetReport rep;
  CompensatedSum s;
  for (int i = 0; i < surface.n_sites(); ++i)
    s.add(surface.weights[i] * surface.curvature[i]);
  rep.integral = s.value();
  rep.target = 2.0 * M_PI * surface.euler_characteristic();
  rep.residual = rep.integral - rep.target;
  rep.within_tolerance = std::abs(rep.residual) <= surface.mesh_tolerance;
  return rep;
}

double dirichlet_energy(const DiscreteSurface& surface,
                        const std::vector<double>& phi) {
  const int n = surface.n_sites();
  if (static_cast<int>(phi.size()) != n)
    throw ContractError("dirichlet_energy: field size does not match surface");
  Eigen::Map<const Eigen::VectorXd> v(phi.data(), n);
  const double e = v.dot(surface.laplacian * v);
  return e > 0.0 ? e : 0.0;  // the form is PSD; negatives are rounding
}

std::vector<double> laplace_apply(const DiscreteSurface& surface,
                                  const std::vector<double>& phi) {
  const int n = surface.n_sites();
  if (static_cast<int>(phi.size()) != n)
    throw ContractError("laplace_apply: field size does not match surface");
  Eigen::Map<const Eigen::VectorXd> v(phi.data(), n);
  Eigen::VectorXd lv = surface.laplacian * v;
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = lv[i] / surface.weights[i];
  return out;
}

void check_conformal_factor(const DiscreteSurface& surface,
                            const ConformalFactor& factor) {
  const int n = surface.n_sites();
  if (static_cast<int>(factor.values.size()) != n)
    throw ContractError("conformal factor size does not match surface");
  for (double v : factor.values)
    if (!std::isfinite(v))
      throw ContractError("conformal factor has non-finite entries");
  if (!(factor.bound > 0.0) || factor.decay_order < 0)
    throw ContractError("conformal factor declares an empty decay class");
  for (const CuspPatch& patch : surface.cusps)
    for (size_t k = 0; k < patch.sites.size(); ++k) {
      const double v = factor.values[patch.sites[k]];
      const double grown = std::abs(v) * std::pow(patch.y[k], factor.decay_order);
      if (grown > factor.bound * (1.0 + 1e-12))
        throw ContractError("conformal factor leaves its decay class at site " +
                            std::to_string(patch.sites[k]));
    }
}

ConformalFactor random_decaying_factor(const DiscreteSurface& surface,
                                       unsigned long long seed,
                                       double amplitude, int decay_order) {
  if (!(amplitude > 0.0))
    throw std::domain_error("random factor needs amplitude > 0");
  const int n = surface.n_sites();

  // Damping per site: (y_min / y)^k within each cusp patch, 1 elsewhere.
  std::vector<double> damp(n, 1.0);
  double worst_growth = 1.0;
  for (const CuspPatch& patch : surface.cusps) {
    double y_min = patch.y.empty() ? 1.0 : patch.y[0];
    for (double yy : patch.y) y_min = std::min(y_min, yy);
    worst_growth = std::max(worst_growth, std::pow(y_min, decay_order));
    for (size_t k = 0; k < patch.sites.size(); ++k)
      damp[patch.sites[k]] =
          std::min(damp[patch.sites[k]],
                   std::pow(y_min / patch.y[k], decay_order));
  }

  std::mt19937_64 rng(seed);
  ConformalFactor f;
  f.decay_order = decay_order;
  f.bound = amplitude * worst_growth;
  f.values.resize(n);
  for (int i = 0; i < n; ++i)
    f.values[i] = amplitude * uniform_pm1(rng) * damp[i];
  return f;
}

}  // namespace cusp
