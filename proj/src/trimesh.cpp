#include "wlab/trimesh.hpp"

#include <filesystem>
#include <fstream>
#include <map>

namespace wlab {

namespace {

struct EdgeKey {
  int a, b;
  bool operator<(const EdgeKey& o) const { return a != o.a ? a < o.a : b < o.b; }
};
EdgeKey edge_key(int i, int j) { return i < j ? EdgeKey{i, j} : EdgeKey{j, i}; }

}  // namespace

int TriMesh::euler_characteristic() const {
  std::map<EdgeKey, int> edges;
  for (const auto& t : triangles)
    for (int k = 0; k < 3; ++k) ++edges[edge_key(t[k], t[(k + 1) % 3])];
  return int(vertices.size()) - int(edges.size()) + int(triangles.size());
}

double TriMesh::min_angle() const {
  double amin = std::numeric_limits<double>::infinity();
  for (const auto& t : triangles) {
    for (int k = 0; k < 3; ++k) {
      const Vec e1 = vertices[t[(k + 1) % 3]] - vertices[t[k]];
      const Vec e2 = vertices[t[(k + 2) % 3]] - vertices[t[k]];
      const double n1 = e1.norm(), n2 = e2.norm();
      if (!(n1 > 0) || !(n2 > 0)) return 0;
      const double c = std::clamp(e1.dot(e2) / (n1 * n2), -1.0, 1.0);
      amin = std::min(amin, std::acos(c));
    }
  }
  return amin;
}

TriMesh mesh_from_immersion(const Immersion& f, int resolution) {
  if (resolution < 16) throw config_error("mesh resolution below minimum (16 per axis)");
  const ParamDomain& dom = f.domain;

  // Sampling box, trimmed by at-infinity exclusion neighborhoods.
  Interval ax0 = dom.axis[0], ax1 = dom.axis[1];
  for (const auto& m : f.marked_points) {
    if (m.exclusion_radius <= 0) continue;
    const double rho = m.exclusion_radius;
    if (m.where == MarkedPoint::Where::plane_infinity ||
        m.where == MarkedPoint::Where::axis0_plus_inf)
      ax0.hi = std::min(ax0.hi, -std::log(rho));
    else if (m.where == MarkedPoint::Where::axis0_minus_inf)
      ax0.lo = std::max(ax0.lo, std::log(rho));
    else if (dom.kind == ParamDomain::Kind::punctured_plane && m.location.norm() < 1e-14)
      ax0.lo = std::max(ax0.lo, std::log(rho));
  }

  const int n0 = dom.periodic[0] ? resolution : resolution + 1;
  const int n1 = dom.periodic[1] ? resolution : resolution + 1;
  const int lines0 = dom.periodic[0] ? resolution : resolution + 1;
  const double h0 = ax0.length() / (dom.periodic[0] ? n0 : n0 - 1);
  const double h1 = ax1.length() / (dom.periodic[1] ? n1 : n1 - 1);

  TriMesh mesh;
  mesh.dim = f.ambient_dim();
  mesh.vertices.reserve(std::size_t(lines0) * n1 + 2);

  auto vid = [&](int i, int j) { return i * n1 + (j % n1 + n1) % n1; };
  for (int i = 0; i < lines0; ++i)
    for (int j = 0; j < n1; ++j) {
      const Vec2 s(ax0.lo + i * h0, ax1.lo + j * h1);
      mesh.vertices.push_back(f.jet(dom.chart_point(s)).position);
    }

  const int quads0 = dom.periodic[0] ? n0 : n0 - 1;
  const int quads1 = dom.periodic[1] ? n1 : n1 - 1;
  for (int i = 0; i < quads0; ++i)
    for (int j = 0; j < quads1; ++j) {
      const int i2 = dom.periodic[0] ? (i + 1) % lines0 : i + 1;
      const int a = vid(i, j), b = vid(i2, j), c = vid(i2, j + 1), d = vid(i, j + 1);
      mesh.triangles.push_back({a, b, c});
      mesh.triangles.push_back({a, c, d});
    }

  // Close truncated edges at the surface's finite limit points.
  for (const CapPoint& cap : f.caps) {
    if (cap.axis != 0 || dom.periodic[0]) continue;
    const int apex = int(mesh.vertices.size());
    mesh.vertices.push_back(cap.position);
    const int ring = cap.side == 0 ? 0 : lines0 - 1;
    for (int j = 0; j < quads1; ++j) {
      const int a = vid(ring, j), b = vid(ring, j + 1);
      if (cap.side == 0)
        mesh.triangles.push_back({apex, b, a});
      else
        mesh.triangles.push_back({apex, a, b});
    }
    if (cap.cone_order >= 1) {
      mesh.cone_vertices.push_back(apex);
      mesh.cone_orders.push_back(cap.cone_order);
    }
  }

  // Boundary loops from singly-incident edges.
  std::map<EdgeKey, int> edge_count;
  for (const auto& t : mesh.triangles)
    for (int k = 0; k < 3; ++k) ++edge_count[edge_key(t[k], t[(k + 1) % 3])];
  std::multimap<int, int> boundary_next;
  for (const auto& [e, c] : edge_count)
    if (c == 1) {
      boundary_next.insert({e.a, e.b});
      boundary_next.insert({e.b, e.a});
    }
  std::map<int, bool> visited;
  for (auto it = boundary_next.begin(); it != boundary_next.end(); ++it) {
    if (visited[it->first]) continue;
    std::vector<int> loop;
    int v = it->first;
    while (!visited[v]) {
      visited[v] = true;
      loop.push_back(v);
      auto range = boundary_next.equal_range(v);
      int next = -1;
      for (auto e = range.first; e != range.second; ++e)
        if (!visited[e->second]) { next = e->second; break; }
      if (next < 0) break;
      v = next;
    }
    if (loop.size() >= 3) mesh.boundary_loops.push_back(std::move(loop));
  }
  return mesh;
}

AngleDefectResult angle_defect_total_curvature(const TriMesh& mesh) {
  const int nv = int(mesh.vertices.size());
  std::vector<double> angle_sum(nv, 0.0);
  std::vector<char> on_boundary(nv, 0);

  std::map<EdgeKey, int> edge_count;
  for (const auto& t : mesh.triangles)
    for (int k = 0; k < 3; ++k) ++edge_count[edge_key(t[k], t[(k + 1) % 3])];
  for (const auto& [e, c] : edge_count)
    if (c == 1) {
      on_boundary[e.a] = 1;
      on_boundary[e.b] = 1;
    }

  for (const auto& t : mesh.triangles) {
    for (int k = 0; k < 3; ++k) {
      const Vec e1 = mesh.vertices[t[(k + 1) % 3]] - mesh.vertices[t[k]];
      const Vec e2 = mesh.vertices[t[(k + 2) % 3]] - mesh.vertices[t[k]];
      const double c = std::clamp(e1.dot(e2) / (e1.norm() * e2.norm()), -1.0, 1.0);
      angle_sum[t[k]] += std::acos(c);
    }
  }

  std::vector<char> is_cone(nv, 0);
  for (int v : mesh.cone_vertices) is_cone[v] = 1;

  AngleDefectResult r;
  std::vector<double> interior, cone, boundary;
  for (int v = 0; v < nv; ++v) {
    if (on_boundary[v])
      boundary.push_back(pi - angle_sum[v]);
    else if (is_cone[v])
      cone.push_back(2 * pi - angle_sum[v]);
    else
      interior.push_back(2 * pi - angle_sum[v]);
  }
  r.interior_defect = pairwise_sum(interior);
  r.cone_defect = pairwise_sum(cone);
  r.boundary_term = pairwise_sum(boundary);
  const int chi = mesh.euler_characteristic();
  r.combinatorial_residual =
      r.interior_defect + r.cone_defect + r.boundary_term - 2 * pi * chi;
  return r;
}

void write_off(const TriMesh& mesh, const std::string& path) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw config_error("cannot open OFF output file: " + path);
  out.precision(17);
  if (mesh.dim == 3) {
    out << "OFF\n";
  } else {
    out << "nOFF\n" << mesh.dim << "\n";
  }
  std::map<EdgeKey, int> edges;
  for (const auto& t : mesh.triangles)
    for (int k = 0; k < 3; ++k) ++edges[edge_key(t[k], t[(k + 1) % 3])];
  out << mesh.vertices.size() << " " << mesh.triangles.size() << " " << edges.size() << "\n";
  for (const Vec& v : mesh.vertices) {
    for (int i = 0; i < mesh.dim; ++i) out << (i ? " " : "") << v[i];
    out << "\n";
  }
  for (const auto& t : mesh.triangles) out << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
}

}  // namespace wlab
