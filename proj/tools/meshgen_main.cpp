// SPDX-License-Identifier: Apache-2.0
// Generates the built-in meshes as OFF files.
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

#include "cmfma/meshgen.hpp"
#include "cmfma/rwg.hpp"

namespace {

void usage() {
  std::fprintf(stderr,
               "usage: cmfma-meshgen plate <lx> <ly> <nx> <ny> <out.off>\n"
               "       cmfma-meshgen sphere <radius> <cells-per-face> <out.off>\n"
               "       cmfma-meshgen tetra <circumradius> <out.off>\n");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace cmfma;
  if (argc < 2) {
    usage();
    return 2;
  }
  const std::string kind = argv[1];
  try {
    SurfaceMesh mesh;
    std::string out;
    if (kind == "plate" && argc == 7) {
      mesh = make_plate(std::atof(argv[2]), std::atof(argv[3]), std::atoi(argv[4]),
                        std::atoi(argv[5]));
      out = argv[6];
    } else if (kind == "sphere" && argc == 5) {
      mesh = make_cube_sphere(std::atof(argv[2]), std::atoi(argv[3]));
      out = argv[4];
    } else if (kind == "tetra" && argc == 4) {
      mesh = make_tetrahedron(std::atof(argv[2]));
      out = argv[3];
    } else {
      usage();
      return 2;
    }
    mesh.validate();
    write_mesh_off(mesh, out);
    std::printf("%s: %d vertices, %d triangles, %d RWG unknowns\n", out.c_str(),
                mesh.num_vertices(), mesh.num_triangles(), RwgBasis(mesh).size());
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
