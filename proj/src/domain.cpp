#include "wlab/domain.hpp"

#include "wlab/immersion.hpp"

namespace wlab {

ParamDomain ParamDomain::rectangle(Interval a, Interval b) {
  if (!(a.length() > 0) || !(b.length() > 0) || !std::isfinite(a.lo) || !std::isfinite(a.hi) ||
      !std::isfinite(b.lo) || !std::isfinite(b.hi))
    throw config_error("rectangle domain needs finite bounds of positive length");
  ParamDomain d;
  d.kind = Kind::rectangle;
  d.axis[0] = a;
  d.axis[1] = b;
  return d;
}

ParamDomain ParamDomain::periodic_strip(Interval a, double period) {
  if (!(period > 0)) throw config_error("periodic strip needs period > 0");
  ParamDomain d;
  d.kind = Kind::periodic_strip;
  d.axis[0] = a;
  d.axis[1] = Interval{0, period};
  d.periodic[1] = true;
  return d;
}

ParamDomain ParamDomain::punctured_plane(double r_inner, double r_outer) {
  if (!(r_inner > 0) || !(r_outer > r_inner))
    throw config_error("punctured plane needs 0 < r_inner < r_outer");
  ParamDomain d;
  d.kind = Kind::punctured_plane;
  d.axis[0] = Interval{std::log(r_inner), std::log(r_outer)};
  d.axis[1] = Interval{0, 2 * pi};
  d.periodic[1] = true;
  return d;
}

Vec2 ParamDomain::chart_point(const Vec2& s) const {
  if (kind != Kind::punctured_plane) return s;
  const double r = std::exp(s[0]);
  return Vec2(r * std::cos(s[1]), r * std::sin(s[1]));
}

double ParamDomain::chart_jacobian(const Vec2& s) const {
  if (kind != Kind::punctured_plane) return 1.0;
  return std::exp(2 * s[0]);
}

ChartJet ParamDomain::chart_map_jet(const Vec2& s) const {
  if (kind != Kind::punctured_plane) {
    ChartJet j;
    j.value = s;
    j.d1 = Mat2::Identity();
    j.d2[0] = j.d2[1] = j.d2[2] = Vec2::Zero();
    return j;
  }
  // z = exp(t + i theta), holomorphic in w = t + i theta.
  const Cplx z = std::exp(Cplx(s[0], s[1]));
  return chart_jet_holomorphic(z, z, z);
}

bool ParamDomain::contains_chart(const Vec2& p, double slack) const {
  if (kind == Kind::punctured_plane) {
    // The inner radius only bounds the sampling shells; the chart itself is
    // regular across the origin unless a marked-point exclusion says otherwise.
    return p.norm() <= outer_radius() * (1 + slack);
  }
  if (!axis[0].contains(p[0], slack)) return false;
  if (periodic[1]) return true;  // any angle is admissible modulo the period
  return axis[1].contains(p[1], slack);
}

bool ParamDomain::same_as(const ParamDomain& other, double tol) const {
  if (kind != other.kind) return false;
  for (int a = 0; a < 2; ++a) {
    if (periodic[a] != other.periodic[a]) return false;
    if (std::abs(axis[a].lo - other.axis[a].lo) > tol) return false;
    if (std::abs(axis[a].hi - other.axis[a].hi) > tol) return false;
  }
  return true;
}

Jet2 jet_compose(const Jet2& outer, const ChartJet& inner) {
  const int n = outer.dim();
  Jet2 r;
  r.position = outer.position;
  r.d1[0] = Vec(n);
  r.d1[1] = Vec(n);
  for (int k = 0; k < 3; ++k) r.d2[k] = Vec(n);

  const double ux = inner.d1(0, 0), uy = inner.d1(0, 1);
  const double vx = inner.d1(1, 0), vy = inner.d1(1, 1);
  const Vec& fu = outer.d1[0];
  const Vec& fv = outer.d1[1];
  const Vec& fuu = outer.d2[0];
  const Vec& fuv = outer.d2[1];
  const Vec& fvv = outer.d2[2];

  r.d1[0] = fu * ux + fv * vx;
  r.d1[1] = fu * uy + fv * vy;
  // second partials of u, v
  const double uxx = inner.d2[0][0], vxx = inner.d2[0][1];
  const double uxy = inner.d2[1][0], vxy = inner.d2[1][1];
  const double uyy = inner.d2[2][0], vyy = inner.d2[2][1];
  r.d2[0] = fuu * (ux * ux) + fuv * (2 * ux * vx) + fvv * (vx * vx) + fu * uxx + fv * vxx;
  r.d2[1] = fuu * (ux * uy) + fuv * (ux * vy + uy * vx) + fvv * (vx * vy) + fu * uxy + fv * vxy;
  r.d2[2] = fuu * (uy * uy) + fuv * (2 * uy * vy) + fvv * (vy * vy) + fu * uyy + fv * vyy;
  return r;
}

int Immersion::end_count() const {
  int n = 0;
  for (const auto& m : marked_points)
    if (m.kind == MarkedPoint::Kind::end) ++n;
  return n;
}

int Immersion::end_multiplicity_sum() const {
  int s = 0;
  for (const auto& m : marked_points)
    if (m.kind == MarkedPoint::Kind::end) s += m.order + 1;
  return s;
}

int Immersion::branch_order_sum() const {
  int s = 0;
  for (const auto& m : marked_points)
    if (m.kind != MarkedPoint::Kind::end) s += m.order;
  return s;
}

namespace {

// Distance of a chart point to a marked point measured in the marked point's
// compact local chart.
double local_chart_distance(const ParamDomain& dom, const MarkedPoint& m, const Vec2& p) {
  switch (m.where) {
    case MarkedPoint::Where::finite:
      return (p - m.location).norm();
    case MarkedPoint::Where::axis0_plus_inf:
      return std::exp(-p[0]);  // w = e^{-(v + i theta)}
    case MarkedPoint::Where::axis0_minus_inf:
      return std::exp(p[0]);
    case MarkedPoint::Where::plane_infinity: {
      const double r = p.norm();
      return r > 0 ? 1.0 / r : std::numeric_limits<double>::infinity();
    }
  }
  (void)dom;
  return std::numeric_limits<double>::infinity();
}

}  // namespace

Jet2 eval_jet2(const Immersion& f, const Vec2& p) {
  if (!f.domain.contains_chart(p))
    throw domain_error("parameter point outside the domain of " + f.label);
  for (const auto& m : f.marked_points) {
    if (m.exclusion_radius > 0 && local_chart_distance(f.domain, m, p) < m.exclusion_radius)
      throw domain_error("parameter point inside a marked-point exclusion neighborhood of " +
                         f.label);
  }
  return f.map->jet(p);
}

Mat rotation_from_params(int n, std::span<const double> params) {
  if (int(params.size()) != rotation_param_count(n))
    throw config_error("rotation parameter count mismatch");
  if (n == 3) {
    // Rodrigues
    Eigen::Vector3d w(params[0], params[1], params[2]);
    const double th = w.norm();
    Eigen::Matrix3d K = Eigen::Matrix3d::Zero();
    K << 0, -w[2], w[1], w[2], 0, -w[0], -w[1], w[0], 0;
    Eigen::Matrix3d R;
    if (th < 1e-12) {
      R = Eigen::Matrix3d::Identity() + K + 0.5 * K * K;
    } else {
      R = Eigen::Matrix3d::Identity() + std::sin(th) / th * K +
          (1 - std::cos(th)) / (th * th) * K * K;
    }
    return R;
  }
  // Cayley transform of a skew matrix; covers a neighborhood of SO(4) wide
  // enough for optimization and for randomized group-law tests.
  Mat S = Mat::Zero(n, n);
  int k = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      S(i, j) = params[k];
      S(j, i) = -params[k];
      ++k;
    }
  Mat I = Mat::Identity(n, n);
  return (I - S).partialPivLu().solve(I + S);
}

}  // namespace wlab
