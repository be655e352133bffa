#pragma once

#include <cuspspectra/surface.hpp>

namespace cusp {

// Built-in test surfaces. All satisfy the load invariants exactly (up to
// rounding): positive weights, symmetric PSD form with zero row sums, and
// curvature integral matching 2 pi chi.

// n x n doubly periodic grid, unit conductances, area 1, K = 0, genus 1.
DiscreteSurface make_flat_torus(int n);

// Genus-2 stand-in on an n x n periodic carrier: smoothly varying weights
// normalized to total area 4 pi, curvature near -1 shifted affinely so the
// curvature integral is exactly -4 pi. Exercises the conformal identities
// on a surface with nonconstant data.
DiscreteSurface make_synthetic_genus2(int n);

// Genus 1 with one cusp (chi = -1): a cusp grid on [1, Y] glued to a core
// ring that closes the surface, K = -1 everywhere, total area exactly 2 pi.
DiscreteSurface make_cusp_torus(double Y, int n_y, int n_x);

}  // namespace cusp
