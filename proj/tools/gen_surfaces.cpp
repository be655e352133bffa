// Regenerates the bundled surface files. Run with the target directory as
// the only argument; the repository copies live in data/.

#include <cuspspectra/surface.hpp>
#include <cuspspectra/synthetic.hpp>

#include <iostream>
#include <string>

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: gen-surfaces OUT_DIR\n";
    return 2;
  }
  const std::string dir = argv[1];
  try {
    cusp::save_surface(cusp::make_flat_torus(24), dir + "/flat_torus.json");
    cusp::save_surface(cusp::make_synthetic_genus2(32),
                       dir + "/synthetic_genus2.json");
    cusp::save_surface(cusp::make_cusp_torus(6.0, 48, 24),
                       dir + "/cusp_torus.json");
    cusp::save_surface(cusp::make_cusp_torus(6.0, 96, 48),
                       dir + "/cusp_torus_fine.json");
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
