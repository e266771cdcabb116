#pragma once

#include <array>
#include <string>
#include <vector>

#include "wlab/immersion.hpp"

namespace wlab {

/// Triangulated oracle mesh. Positions only: the discrete total-curvature
/// pipeline shares no derivative code with the quadrature modules.
struct TriMesh {
  int dim = 3;
  std::vector<Vec> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<std::vector<int>> boundary_loops;
  std::vector<int> cone_vertices;   // cap vertices at branch points
  std::vector<int> cone_orders;

  int euler_characteristic() const;  // V - E + F
  double min_angle() const;          // radians
};

/// Vertices at grid positions, diagonal-split quads, periodic axes stitched,
/// truncated edges capped at the surface's closure points where they exist.
TriMesh mesh_from_immersion(const Immersion& f, int resolution);

struct AngleDefectResult {
  double interior_defect = 0;      // sum over smooth interior vertices of (2pi - angles)
  double cone_defect = 0;          // same sum over branch-cap vertices (the -2 pi m atoms)
  double boundary_term = 0;        // sum over boundary vertices of (pi - angles)
  double combinatorial_residual = 0;  // interior + cone + boundary - 2 pi chi
};

/// Discrete Gauss-Bonnet bookkeeping. interior_defect estimates the smooth
/// part of the total curvature; the combinatorial identity holds to roundoff
/// independent of geometry.
AngleDefectResult angle_defect_total_curvature(const TriMesh& mesh);

/// ASCII OFF (3-D) or nOFF (higher dimension).
void write_off(const TriMesh& mesh, const std::string& path);

}  // namespace wlab
