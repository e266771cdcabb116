#pragma once

#include <optional>
#include <vector>

#include "wlab/geom.hpp"

namespace wlab {

struct Interval {
  double lo = 0, hi = 0;
  double length() const { return hi - lo; }
  bool contains(double x, double slack = 0) const { return x >= lo - slack && x <= hi + slack; }
};

/// Parameter domain of a chart. Grids are built in "sampling coordinates":
/// the identity for rectangles and periodic strips, log-polar shells
/// (t = log r, theta) for punctured planes. Chart coordinates (what jet
/// evaluators consume) are Cartesian for punctured planes.
struct ParamDomain {
  enum class Kind { rectangle, periodic_strip, punctured_plane };

  Kind kind = Kind::rectangle;
  Interval axis[2];            // sampling-coordinate bounds
  bool periodic[2] = {false, false};

  static ParamDomain rectangle(Interval a, Interval b);
  static ParamDomain periodic_strip(Interval a, double period);
  static ParamDomain punctured_plane(double r_inner, double r_outer);

  double inner_radius() const { return std::exp(axis[0].lo); }
  double outer_radius() const { return std::exp(axis[0].hi); }

  /// Sampling point -> chart point, with the area Jacobian d(chart)/d(sampling).
  Vec2 chart_point(const Vec2& s) const;
  double chart_jacobian(const Vec2& s) const;
  /// 2-jet of the sampling->chart map (for chart-covariant quantities on
  /// sampling-coordinate grids).
  ChartJet chart_map_jet(const Vec2& s) const;

  /// Membership of a chart point in the truncated domain.
  bool contains_chart(const Vec2& p, double slack = 1e-12) const;

  bool same_as(const ParamDomain& other, double tol = 1e-9) const;
};

/// Ends, branch points and multiplicity-point preimages, with the order data
/// (k for ends, m for branch points) used by the energy ledgers.
struct MarkedPoint {
  enum class Kind { end, branch, multiplicity_preimage };
  enum class Where { finite, axis0_minus_inf, axis0_plus_inf, plane_infinity };

  Kind kind = Kind::end;
  Where where = Where::finite;
  Vec2 location{0, 0};         // chart coordinates, finite case only
  int order = 0;               // k(a_i) for ends, m(p) otherwise (0 for preimages)
  double exclusion_radius = 0; // in the compact local chart around the point; 0 = none
  std::optional<Vec> image;    // limit of the immersion at the point, when finite
};

}  // namespace wlab
