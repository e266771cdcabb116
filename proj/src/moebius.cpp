#include "wlab/moebius.hpp"

#include <sstream>

#include "wlab/quadrature.hpp"

namespace wlab {

MoebiusTransform MoebiusTransform::identity(int n) {
  MoebiusTransform t;
  t.dim = n;
  t.rotation = Mat::Identity(n, n);
  t.translation = Vec::Zero(n);
  return t;
}

MoebiusTransform MoebiusTransform::similarity(const Mat& R, double scale, const Vec& t) {
  MoebiusTransform m = identity(int(t.size()));
  m.rotation = R;
  m.scale = scale;
  m.translation = t;
  if (!(scale > 0)) throw config_error("Moebius scale must be positive");
  return m;
}

MoebiusTransform MoebiusTransform::dilation(int n, double s) {
  MoebiusTransform m = identity(n);
  m.scale = s;
  if (!(s > 0)) throw config_error("Moebius scale must be positive");
  return m;
}

MoebiusTransform MoebiusTransform::translation_by(const Vec& t) {
  MoebiusTransform m = identity(int(t.size()));
  m.translation = t;
  return m;
}

MoebiusTransform MoebiusTransform::rotation_by(const Mat& R) {
  MoebiusTransform m = identity(int(R.rows()));
  m.rotation = R;
  return m;
}

MoebiusTransform MoebiusTransform::inversion(const Vec& center) {
  MoebiusTransform m = identity(int(center.size()));
  m.inversion_center = center;
  return m;
}

Vec MoebiusTransform::apply(const Vec& y) const {
  Vec z = y;
  if (inversion_center) {
    const Vec w = y - *inversion_center;
    const double rho2 = w.squaredNorm();
    if (rho2 < 1e-280) throw numerical_error("Moebius transform evaluated at its pole");
    z = *inversion_center + w / rho2;
  }
  return translation + scale * (rotation * z);
}

Jet2 MoebiusTransform::push_jet(const Jet2& j) const {
  const int n = j.dim();
  // Lift ambient components to D2 scalars and run the transform through the
  // chain rule.
  D2 c[4];
  for (int i = 0; i < n; ++i) c[i] = jet_component(j, i);
  if (inversion_center) {
    const Vec& x0 = *inversion_center;
    D2 rho2(0.0);
    for (int i = 0; i < n; ++i) {
      c[i] = c[i] - x0[i];
      rho2 = rho2 + c[i] * c[i];
    }
    if (rho2.v < 1e-280) throw numerical_error("Moebius jet evaluated at its pole");
    const D2 inv = recip(rho2);
    for (int i = 0; i < n; ++i) c[i] = x0[i] + c[i] * inv;
  }
  D2 out[4];
  for (int i = 0; i < n; ++i) {
    D2 acc(translation[i]);
    for (int k = 0; k < n; ++k) acc = acc + (scale * rotation(i, k)) * c[k];
    out[i] = acc;
  }
  Jet2 r;
  r.position = Vec(n);
  r.d1[0] = Vec(n);
  r.d1[1] = Vec(n);
  for (int k = 0; k < 3; ++k) r.d2[k] = Vec(n);
  for (int i = 0; i < n; ++i) set_jet_component(r, i, out[i]);
  return r;
}

namespace {

// I_{c} composed after the similarity (R, s, t), rewritten as a similarity
// composed after an inversion: I_c(sim(y)) = sim'(I_{y*}(y)).
struct SimAfterInversion {
  Mat R;
  double scale;
  Vec t;
  Vec center;
};

SimAfterInversion inversion_after_similarity(const Vec& c, const Mat& R, double s, const Vec& t) {
  SimAfterInversion out;
  out.center = (R.transpose() * (c - t)) / s;
  out.R = R;
  out.scale = 1.0 / s;
  out.t = c - (R * out.center) / s;
  return out;
}

}  // namespace

MoebiusTransform MoebiusTransform::compose(const MoebiusTransform& other) const {
  const MoebiusTransform& S = *this;
  const MoebiusTransform& T = other;
  if (S.dim != T.dim) throw config_error("Moebius composition dimension mismatch");
  const int n = S.dim;

  if (!S.has_inversion()) {
    MoebiusTransform r = identity(n);
    r.rotation = S.rotation * T.rotation;
    r.scale = S.scale * T.scale;
    r.translation = S.translation + S.scale * (S.rotation * T.translation);
    r.inversion_center = T.inversion_center;
    return r;
  }

  // S = simS . I_{cS}; pull I_{cS} through T's similarity part.
  const SimAfterInversion step =
      inversion_after_similarity(*S.inversion_center, T.rotation, T.scale, T.translation);
  // sim2 = simS . sim'
  Mat R2 = S.rotation * step.R;
  double s2 = S.scale * step.scale;
  Vec t2 = S.translation + S.scale * (S.rotation * step.t);

  if (!T.has_inversion()) {
    MoebiusTransform r = identity(n);
    r.rotation = R2;
    r.scale = s2;
    r.translation = t2;
    r.inversion_center = step.center;
    return r;
  }

  // Two inversions: I_a . I_b with a = step.center, b = T's center.
  const Vec a = step.center;
  const Vec b = *T.inversion_center;
  const Vec d = a - b;
  const double delta = d.norm();
  if (delta <= 1e-9 * (1 + a.norm() + b.norm())) {
    // The inversions cancel to working precision.
    MoebiusTransform r = identity(n);
    r.rotation = R2;
    r.scale = s2;
    r.translation = t2;
    return r;
  }
  const Vec uhat = d / delta;
  Mat refl = Mat::Identity(n, n) - 2.0 * (uhat * uhat.transpose());
  const double s3 = 1.0 / (delta * delta);
  const Vec q = b + d * s3;
  const Vec t3 = a - d * s3 - s3 * (refl * q);

  MoebiusTransform r = identity(n);
  r.rotation = R2 * refl;
  r.scale = s2 * s3;
  r.translation = t2 + s2 * (R2 * t3);
  r.inversion_center = q;
  return r;
}

MoebiusTransform MoebiusTransform::inverse() const {
  const int n = dim;
  // inverse of the similarity part
  Mat Rt = rotation.transpose();
  const double si = 1.0 / scale;
  Vec ti = -si * (Rt * translation);
  if (!has_inversion()) {
    MoebiusTransform r = identity(n);
    r.rotation = Rt;
    r.scale = si;
    r.translation = ti;
    return r;
  }
  // (sim . I_c)^{-1} = I_c . sim^{-1}; re-canonicalize.
  const SimAfterInversion step = inversion_after_similarity(*inversion_center, Rt, si, ti);
  MoebiusTransform r = identity(n);
  r.rotation = step.R;
  r.scale = step.scale;
  r.translation = step.t;
  r.inversion_center = step.center;
  return r;
}

double MoebiusTransform::orthogonality_defect() const {
  return (rotation.transpose() * rotation - Mat::Identity(dim, dim)).cwiseAbs().maxCoeff();
}

namespace {

struct MoebiusJetMap final : JetMap {
  std::shared_ptr<const JetMap> base;
  MoebiusTransform transform;
  MoebiusJetMap(std::shared_ptr<const JetMap> b, MoebiusTransform t)
      : base(std::move(b)), transform(std::move(t)) {}
  int ambient_dim() const override { return base->ambient_dim(); }
  Jet2 jet(const Vec2& p) const override { return transform.push_jet(base->jet(p)); }
};

double min_sampled_distance(const Immersion& f, const Vec& x, std::array<int, 2> res) {
  QuadratureGrid g = sample_grid(f, res, false);
  double dmin = std::numeric_limits<double>::infinity();
  for (const Vec2& node : g.nodes)
    dmin = std::min(dmin, (f.jet(node).position - x).norm());
  for (const auto& cap : f.caps) dmin = std::min(dmin, (cap.position - x).norm());
  return dmin;
}

}  // namespace

Immersion pushforward(const Immersion& f, const MoebiusTransform& T, bool check_center) {
  if (T.dim != f.ambient_dim()) throw config_error("pushforward dimension mismatch");
  if (T.has_inversion() && check_center) {
    const double dmin = min_sampled_distance(f, *T.inversion_center, {48, 48});
    if (dmin < 0.05) {
      std::ostringstream os;
      os << "inversion center on or near the surface image (sampled distance " << dmin
         << " < 0.05); mark the preimages explicitly to proceed";
      throw domain_error(os.str());
    }
  }

  Immersion g;
  g.domain = f.domain;
  g.map = std::make_shared<MoebiusJetMap>(f.map, T);
  g.euler_char = f.euler_char;
  g.conformal_chart = f.conformal_chart;
  g.label = f.label + "|moebius";
  g.params = f.params;
  if (T.has_inversion()) {
    const Vec& c = *T.inversion_center;
    for (int i = 0; i < T.dim; ++i) g.params["center" + std::to_string(i)] = c[i];
  }

  const Vec image_of_infinity =
      T.has_inversion() ? Vec(T.translation + T.scale * (T.rotation * *T.inversion_center))
                        : Vec();

  auto at_pole = [&](const Vec& y) {
    return T.has_inversion() && (y - *T.inversion_center).norm() < 1e-9 * (1 + y.norm());
  };

  for (const MarkedPoint& m : f.marked_points) {
    MarkedPoint nm = m;
    if (T.has_inversion() && m.kind == MarkedPoint::Kind::end) {
      nm.kind = m.order >= 1 ? MarkedPoint::Kind::branch
                             : MarkedPoint::Kind::multiplicity_preimage;
      nm.order = m.order;
      nm.image = image_of_infinity;
    } else if (m.image && at_pole(*m.image)) {
      // a finite point at the center blows back up into a complete end of
      // multiplicity m + 1
      nm.kind = MarkedPoint::Kind::end;
      nm.order = m.order;
      nm.image.reset();
    } else if (m.image) {
      nm.image = T.apply(*m.image);
    }
    g.marked_points.push_back(nm);
  }

  for (const CapPoint& cap : f.caps) {
    if (at_pole(cap.position)) continue;  // the cap re-opens into an end
    CapPoint nc = cap;
    nc.position = T.apply(cap.position);
    g.caps.push_back(nc);
  }
  if (T.has_inversion()) {
    // Former ends close up at the image of infinity.
    for (const MarkedPoint& m : f.marked_points) {
      if (m.kind != MarkedPoint::Kind::end) continue;
      CapPoint nc;
      nc.axis = 0;
      nc.side = m.where == MarkedPoint::Where::axis0_minus_inf ? 0 : 1;
      nc.position = image_of_infinity;
      nc.cone_order = m.order >= 1 ? m.order : 0;
      g.caps.push_back(nc);
    }
  }

  g.edge_decays = f.edge_decays;
  if (T.has_inversion()) {
    auto end_at_edge = [&](int axis, int side) {
      if (axis != 0) return false;
      for (const auto& m : g.marked_points) {
        if (m.kind != MarkedPoint::Kind::end) continue;
        if (side == 0 && m.where == MarkedPoint::Where::axis0_minus_inf) return true;
        if (side == 1 && (m.where == MarkedPoint::Where::axis0_plus_inf ||
                          m.where == MarkedPoint::Where::plane_infinity))
          return true;
      }
      return false;
    };
    for (auto& e : g.edge_decays) e.area_decays = !end_at_edge(e.axis, e.side);
  }
  return g;
}

namespace {

std::vector<Vec> scan_directions(int n) {
  std::vector<Vec> dirs;
  std::vector<int> idx(n, -1);
  while (true) {
    Vec d(n);
    bool nonzero = false;
    for (int i = 0; i < n; ++i) {
      d[i] = idx[i];
      nonzero = nonzero || idx[i] != 0;
    }
    if (nonzero) dirs.push_back(d / d.norm());
    int k = 0;
    while (k < n && idx[k] == 1) idx[k++] = -1;
    if (k == n) break;
    ++idx[k];
  }
  return dirs;
}

double weighted_median(std::vector<std::pair<double, double>>& vw) {
  std::sort(vw.begin(), vw.end());
  double total = 0;
  for (const auto& [v, w] : vw) total += w;
  double acc = 0;
  for (const auto& [v, w] : vw) {
    acc += w;
    if (acc >= 0.5 * total) return v;
  }
  return vw.back().first;
}

// Core scale of the image: curvature-weighted medians of the coordinates and
// of the radius. Unlike bounding boxes, these ignore the flaring ends of the
// truncated complete surfaces, so the normalized inversion keeps the
// curvature bump well inside the sampling box.
struct CoreFrame {
  std::vector<Vec> pts;
  Vec center;
  double radius;
};

CoreFrame core_frame(const Immersion& f, const QuadratureGrid& grid) {
  const int n = f.ambient_dim();
  CoreFrame frame;
  frame.pts.reserve(grid.size());
  std::vector<double> wgt(grid.size());
  double total = 0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Jet2 j = f.jet(grid.nodes[k]);
    frame.pts.push_back(j.position);
    const FundForms F = fundamental_forms(j);
    wgt[k] = grid.weights[k] * F.norm2_A * F.area_density();
    total += wgt[k];
  }
  if (!(total > 1e-12)) {
    // flat image: fall back to area weights
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const FundForms F = fundamental_forms(f.jet(grid.nodes[k]));
      wgt[k] = grid.weights[k] * F.area_density();
    }
  }
  frame.center = Vec::Zero(n);
  std::vector<std::pair<double, double>> vw(grid.size());
  for (int i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < grid.size(); ++k) vw[k] = {frame.pts[k][i], wgt[k]};
    frame.center[i] = weighted_median(vw);
  }
  for (std::size_t k = 0; k < grid.size(); ++k)
    vw[k] = {(frame.pts[k] - frame.center).norm(), wgt[k]};
  frame.radius = std::max(weighted_median(vw), 1e-12);
  for (const auto& cap : f.caps) frame.pts.push_back(cap.position);
  return frame;
}

}  // namespace

SafeCenter safe_inversion_center(const Immersion& f, const QuadratureGrid& grid) {
  const int n = f.ambient_dim();
  const CoreFrame frame = core_frame(f, grid);
  const double lambda = 1.0 / frame.radius;
  const Vec mid = lambda * frame.center;

  SafeCenter best;
  best.applied_dilation = lambda;
  best.min_distance = -1;
  for (const Vec& dir : scan_directions(n)) {
    for (double radius : {3.0, 4.5, 6.0}) {
      const Vec cand = mid + radius * dir;
      double dmin = std::numeric_limits<double>::infinity();
      for (const Vec& p : frame.pts) dmin = std::min(dmin, (cand - lambda * p).norm());
      if (dmin > best.min_distance) {
        best.min_distance = dmin;
        best.center = cand;
      }
    }
  }
  if (best.min_distance < 1.0)
    throw numerical_error("no safe inversion center found (unexpected for catalog surfaces)");
  return best;
}

SafeCenter random_safe_center(const Immersion& f, const QuadratureGrid& grid, Rng& rng) {
  const int n = f.ambient_dim();
  const CoreFrame frame = core_frame(f, grid);
  const double lambda = 1.0 / frame.radius;
  const Vec mid = lambda * frame.center;

  for (int attempt = 0; attempt < 64; ++attempt) {
    const Vec cand = mid + rng.uniform(3.0, 6.0) * rng.direction(n);
    double dmin = std::numeric_limits<double>::infinity();
    for (const Vec& p : frame.pts) dmin = std::min(dmin, (cand - lambda * p).norm());
    if (dmin >= 1.0) {
      SafeCenter sc;
      sc.center = cand;
      sc.applied_dilation = lambda;
      sc.min_distance = dmin;
      return sc;
    }
  }
  throw numerical_error("no safe inversion center found (unexpected for catalog surfaces)");
}

InversionLedger inversion_ledger(const Immersion& f, const Vec& x0, const QuadratureGrid& grid) {
  InversionLedger L;
  L.base = energy_report(f, grid);
  L.bracket_ends = f.end_multiplicity_sum();

  // Preimages of x0 among the marked finite points (their images are stored).
  std::vector<const MarkedPoint*> poles;
  for (const auto& m : f.marked_points) {
    if (m.kind == MarkedPoint::Kind::end || !m.image) continue;
    if ((*m.image - x0).norm() < 1e-8 * (1 + x0.norm())) {
      poles.push_back(&m);
      L.bracket_poles += m.order + 1;
    }
  }
  L.bracket = L.bracket_ends - L.bracket_poles;

  L.pred_gauss = L.base.total_gauss + 4 * pi * L.bracket;
  L.pred_willmore = L.base.willmore + 4 * pi * L.bracket;
  L.pred_sff = L.base.total_sff + 8 * pi * L.bracket;

  if (poles.empty()) {
    Immersion pushed = pushforward(f, MoebiusTransform::inversion(x0), true);
    QuadratureGrid pg = sample_grid(pushed, grid.resolution);
    L.pushed = energy_report(pushed, pg);
  } else {
    // x0 on the image: excise the pole preimages at radius rho and
    // Richardson-extrapolate in rho (leading error ~ rho^2).
    auto report_at = [&](double rho) {
      Immersion pushed = pushforward(f, MoebiusTransform::inversion(x0), false);
      for (auto& m : pushed.marked_points) {
        const bool is_pole =
            std::any_of(poles.begin(), poles.end(), [&](const MarkedPoint* p) {
              return p->where == m.where && (p->where != MarkedPoint::Where::finite ||
                                             (p->location - m.location).norm() < 1e-12);
            });
        if (is_pole) m.exclusion_radius = std::max(m.exclusion_radius, rho);
      }
      QuadratureGrid pg = sample_grid(pushed, grid.resolution);
      return energy_report(pushed, pg);
    };
    const EnergyReport r1 = report_at(1e-2), r2 = report_at(5e-3), r4 = report_at(2.5e-3);
    auto extrap = [](double a, double b) { return (4 * b - a) / 3; };
    L.pushed = r4;
    L.pushed.willmore = extrap(extrap(r1.willmore, r2.willmore), extrap(r2.willmore, r4.willmore));
    L.pushed.total_sff = extrap(extrap(r1.total_sff, r2.total_sff), extrap(r2.total_sff, r4.total_sff));
    L.pushed.total_gauss =
        extrap(extrap(r1.total_gauss, r2.total_gauss), extrap(r2.total_gauss, r4.total_gauss));
    L.pushed.err_willmore += std::abs(extrap(r2.willmore, r4.willmore) - L.pushed.willmore);
    L.pushed.err_sff += std::abs(extrap(r2.total_sff, r4.total_sff) - L.pushed.total_sff);
    L.pushed.err_gauss += std::abs(extrap(r2.total_gauss, r4.total_gauss) - L.pushed.total_gauss);
  }

  auto tol = [&](double be, double bt, double pe, double pt, double pred) {
    return be + bt + pe + pt + 1e-9 * (1 + std::abs(pred));
  };
  L.tol_gauss = tol(L.base.err_gauss, L.base.tail_gauss, L.pushed.err_gauss, L.pushed.tail_gauss,
                    L.pred_gauss);
  L.tol_willmore = tol(L.base.err_willmore, L.base.tail_willmore, L.pushed.err_willmore,
                       L.pushed.tail_willmore, L.pred_willmore);
  L.tol_sff =
      tol(L.base.err_sff, L.base.tail_sff, L.pushed.err_sff, L.pushed.tail_sff, L.pred_sff);
  L.ok_gauss = std::abs(L.pred_gauss - L.pushed.total_gauss) <= L.tol_gauss;
  L.ok_willmore = std::abs(L.pred_willmore - L.pushed.willmore) <= L.tol_willmore;
  L.ok_sff = std::abs(L.pred_sff - L.pushed.total_sff) <= L.tol_sff;
  L.all_ok = L.ok_gauss && L.ok_willmore && L.ok_sff;
  return L;
}

}  // namespace wlab
