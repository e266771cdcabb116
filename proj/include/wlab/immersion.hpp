#pragma once

#include <map>
#include <memory>
#include <string>

#include "wlab/domain.hpp"

namespace wlab {

/// Position plus first and second chart partials of an immersion at one
/// parameter point. Only the three independent second partials are stored.
struct Jet2 {
  Vec position;
  Vec d1[2];   // df/dx, df/dy
  Vec d2[3];   // d2f/dxx, d2f/dxy, d2f/dyy

  int dim() const { return int(position.size()); }

  bool finite() const {
    auto ok = [](const Vec& v) { return v.allFinite(); };
    return ok(position) && ok(d1[0]) && ok(d1[1]) && ok(d2[0]) && ok(d2[1]) && ok(d2[2]);
  }
};

/// Compose an outer jet (evaluated at inner.value) with the 2-jet of an inner
/// chart-to-chart map.
Jet2 jet_compose(const Jet2& outer, const ChartJet& inner);

/// Lift the i-th ambient component of a jet into a D2 scalar and back.
inline D2 jet_component(const Jet2& j, int i) {
  return D2(j.position[i], j.d1[0][i], j.d1[1][i], j.d2[0][i], j.d2[1][i], j.d2[2][i]);
}
inline void set_jet_component(Jet2& j, int i, const D2& c) {
  j.position[i] = c.v;
  j.d1[0][i] = c.dx; j.d1[1][i] = c.dy;
  j.d2[0][i] = c.dxx; j.d2[1][i] = c.dxy; j.d2[2][i] = c.dyy;
}

class JetMap {
 public:
  virtual ~JetMap() = default;
  virtual int ambient_dim() const = 0;
  virtual Jet2 jet(const Vec2& chart_point) const = 0;
};

/// Edge of the sampling box that was truncated, with the certified decay rate
/// (in the sampling coordinate) of the curvature-type integrand densities
/// beyond it. area_decays records whether the area density decays too
/// (false across a complete end).
struct EdgeDecay {
  int axis = 0;
  int side = 0;       // 0 = lower edge, 1 = upper edge
  double rate = 2.0;
  bool area_decays = false;
};

/// Closure point of a truncated edge: where the surface continues to a finite
/// limit (sphere poles, images of inverted ends). cone_order > 0 marks branch
/// points, whose angle-defect atom is bookkept separately by the mesh oracle.
struct CapPoint {
  int axis = 0;
  int side = 0;
  Vec position;
  int cone_order = 0;
};

/// An immersed surface chart: a domain, an exact jet evaluator, marked-point
/// metadata, and the Euler characteristic of the compactified surface.
/// Immutable after construction; jet evaluation is pure.
struct Immersion {
  ParamDomain domain;
  std::shared_ptr<const JetMap> map;
  std::vector<MarkedPoint> marked_points;
  int euler_char = 2;  // compactified surface
  std::string label;
  std::map<std::string, double> params;
  std::vector<EdgeDecay> edge_decays;
  std::vector<CapPoint> caps;
  bool conformal_chart = true;  // false for normally perturbed families

  int ambient_dim() const { return map->ambient_dim(); }

  /// Unchecked evaluation (analytic extension beyond the truncation box is
  /// well defined for every catalog family and is used by the optimizers).
  Jet2 jet(const Vec2& chart_point) const { return map->jet(chart_point); }

  /// Number of punctures the compactification adds (ends only).
  int end_count() const;
  /// Sum of (k(a_i) + 1) over ends.
  int end_multiplicity_sum() const;
  /// Sum of m(p) over branch points and multiplicity preimages.
  int branch_order_sum() const;
};

/// Checked evaluation: enforces domain membership and marked-point exclusion
/// neighborhoods.
Jet2 eval_jet2(const Immersion& f, const Vec2& p);

}  // namespace wlab
