#include <cuspspectra/synthetic.hpp>

#include <cuspspectra/errors.hpp>
#include <cuspspectra/numerics.hpp>

#include <Eigen/SparseCore>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace cusp {

namespace {

void add_edge(std::vector<Eigen::Triplet<double>>& trips, int p, int q,
              double c) {
  trips.emplace_back(p, p, c);
  trips.emplace_back(q, q, c);
  trips.emplace_back(p, q, -c);
  trips.emplace_back(q, p, -c);
}

Eigen::SparseMatrix<double> periodic_grid_form(int n, double conductance) {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(16) * n * n);
  auto at = [n](int p, int q) { return p * n + q; };
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      add_edge(trips, at(p, q), at((p + 1) % n, q), conductance);
      add_edge(trips, at(p, q), at(p, (q + 1) % n), conductance);
    }
  Eigen::SparseMatrix<double> L(n * n, n * n);
  L.setFromTriplets(trips.begin(), trips.end());
  L.makeCompressed();
  return L;
}

}  // namespace

DiscreteSurface make_flat_torus(int n) {
  if (n < 4) throw std::domain_error("flat torus needs n >= 4");
  DiscreteSurface surf;
  const int sites = n * n;
  surf.weights.assign(sites, 1.0 / sites);
  surf.curvature.assign(sites, 0.0);
  surf.laplacian = periodic_grid_form(n, 1.0);
  surf.genus = 1;
  surf.complete = true;
  surf.mesh_tolerance = 1e-9;
  return surf;
}

DiscreteSurface make_synthetic_genus2(int n) {
  if (n < 4) throw std::domain_error("genus-2 surface needs n >= 4");
  DiscreteSurface surf;
  const int sites = n * n;
  surf.weights.resize(sites);
  surf.curvature.resize(sites);

  CompensatedSum raw_area;
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      const double u = 2.0 * M_PI * p / n;
      const double v = 2.0 * M_PI * q / n;
      const int i = p * n + q;
      surf.weights[i] = 1.0 + 0.3 * std::sin(u) * std::cos(v);
      surf.curvature[i] = -1.0 + 0.2 * std::sin(2.0 * u) + 0.1 * std::cos(v);
      raw_area.add(surf.weights[i]);
    }
  const double scale = 4.0 * M_PI / raw_area.value();
  for (double& w : surf.weights) w *= scale;

  // Affine curvature shift so the curvature integral hits 2 pi chi exactly.
  CompensatedSum wk;
  for (int i = 0; i < sites; ++i) wk.add(surf.weights[i] * surf.curvature[i]);
  const double shift = (-4.0 * M_PI - wk.value()) / (4.0 * M_PI);
  for (double& k : surf.curvature) k += shift;

  surf.laplacian = periodic_grid_form(n, 1.0);
  surf.genus = 2;
  surf.complete = true;
  surf.mesh_tolerance = 1e-9;
  return surf;
}

DiscreteSurface make_cusp_torus(double Y, int n_y, int n_x) {
  DiscreteSurface grid = build_cusp_grid(1.0, Y, n_y, n_x);
  const int grid_sites = grid.n_sites();
  const int sites = grid_sites + n_x;

  DiscreteSurface surf;
  surf.weights = grid.weights;
  surf.curvature.assign(sites, -1.0);
  // Core ring carries the remaining hyperbolic area 2 pi / Y, so the total
  // is exactly 2 pi = -2 pi chi for chi = -1.
  surf.weights.resize(sites, (2.0 * M_PI / Y) / n_x);

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(grid.laplacian.nonZeros()) + 8 * n_x);
  for (int k = 0; k < grid.laplacian.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(grid.laplacian, k); it;
         ++it)
      trips.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()),
                         it.value());

  // Glue the ring below the bottom grid row with the bottom row's
  // conductances, and close it in the angular direction.
  const double dx = 2.0 * M_PI / n_x;
  const double h0 = grid.cusps[0].y[n_x] - grid.cusps[0].y[0];  // first gap
  const double c_up = dx / h0;
  const double c_ring = h0 / dx;
  for (int j = 0; j < n_x; ++j) {
    add_edge(trips, grid_sites + j, j, c_up);
    add_edge(trips, grid_sites + j, grid_sites + (j + 1) % n_x, c_ring);
  }
  surf.laplacian.resize(sites, sites);
  surf.laplacian.setFromTriplets(trips.begin(), trips.end());
  surf.laplacian.makeCompressed();

  surf.cusps.push_back(grid.cusps[0]);  // grid sites keep their indices
  surf.genus = 1;
  surf.complete = true;
  surf.mesh_tolerance = 1e-9;
  return surf;
}

}  // namespace cusp
