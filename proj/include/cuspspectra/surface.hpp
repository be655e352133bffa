#pragma once

#include <Eigen/SparseCore>
#include <string>
#include <vector>

namespace cusp {

// Sites of one truncated cusp, with the height coordinate of each site.
struct CuspPatch {
  std::vector<int> sites;
  std::vector<double> y;  // per-site height, >= 1
};

// A measured graph standing in for a surface: per-site weights discretize
// the area form, `laplacian` is one symmetric positive-semidefinite
// Dirichlet form with zero row sums (it annihilates constants), and the
// curvature field integrates against the weights. A conformal change of
// metric only reweights the pairing; the form itself is never reassembled.
struct DiscreteSurface {
  std::vector<double> weights;              // > 0
  Eigen::SparseMatrix<double> laplacian;    // the bilinear form, not M^-1 L
  std::vector<double> curvature;
  int genus = 0;
  std::vector<CuspPatch> cusps;
  bool complete = false;  // true when the closed-surface bookkeeping applies
  double mesh_tolerance = 1e-8;

  int n_sites() const { return static_cast<int>(weights.size()); }
  int euler_characteristic() const {
    return 2 - 2 * genus - static_cast<int>(cusps.size());
  }
  double area() const;
};

// phi with a declared decay class: on cusp sites |phi| * y^decay_order must
// stay below `bound`.
struct ConformalFactor {
  std::vector<double> values;
  int decay_order = 2;
  double bound = 1.0;
};

// Tensor grid on [a, Y] x S^1 with the cusp metric y^-2(dy^2 + dx^2):
// geometric spacing in y, uniform in x, weights are the hyperbolic cell
// areas, curvature is identically -1, and the form is the flat five-point
// stiffness (the 2D Dirichlet integral is conformally invariant, so the
// hyperbolic metric enters only through the weights). The result is a cusp
// fragment: no closed-surface claims, gauss_bonnet refuses it.
DiscreteSurface build_cusp_grid(double a, double Y, int n_y, int n_x);

struct SurfaceLoad {
  DiscreteSurface surface;
  double asymmetry = 0.0;             // worst |L_ij - L_ji| seen in the file
  double gauss_bonnet_residual = 0.0;
};

// Loads and validates the JSON schema {"sites", "weights", "laplacian":
// {"format": "triplets", "entries": [[i,j,v],...]}, "curvature", "genus",
// "cusps": [{"sites":[...], "y":[...]}], "tolerance"}. The form is
// symmetrized; asymmetry beyond 1e-12 is reported in the result. Any
// violated invariant is a LoadError naming the invariant.
SurfaceLoad load_surface(const std::string& path);

void save_surface(const DiscreteSurface& surface, const std::string& path);

// Reweights the measure by exp(2 phi) and transforms the curvature as
// K_h = exp(-2 phi) (laplace_apply(phi) + K). Same form, same topology.
DiscreteSurface conformal_transform(const DiscreteSurface& surface,
                                    const ConformalFactor& factor);

struct GaussBonnetReport {
  double integral = 0.0;  // sum w_i K_i
  double target = 0.0;    // 2 pi chi
  double residual = 0.0;
  bool within_tolerance = false;
};

// Complete surfaces only; fragments raise ContractError.
GaussBonnetReport gauss_bonnet(const DiscreteSurface& surface);

// phi^T L phi, clamped at zero when rounding produces a negative residue.
double dirichlet_energy(const DiscreteSurface& surface,
                        const std::vector<double>& phi);

// (L phi)_i / w_i, the weighted action of the form.
std::vector<double> laplace_apply(const DiscreteSurface& surface,
                                  const std::vector<double>& phi);

// Validates size and decay class; raises ContractError on violation.
void check_conformal_factor(const DiscreteSurface& surface,
                            const ConformalFactor& factor);

// Deterministic per-site uniform noise in [-amplitude, amplitude], damped by
// (y_min/y)^decay_order on cusp sites so the declared decay class holds.
ConformalFactor random_decaying_factor(const DiscreteSurface& surface,
                                       unsigned long long seed,
                                       double amplitude, int decay_order = 2);

}  // namespace cusp
