#include "wlab/rigidity.hpp"

#include <algorithm>
#include <atomic>
#include <numeric>
#include <thread>

#include "wlab/functionals.hpp"
#include "wlab/neldermead.hpp"

namespace wlab {

// ---------------------------------------------------------------------------
// Nelder-Mead
// ---------------------------------------------------------------------------

namespace {

struct SimplexPoint {
  Eigen::VectorXd x;
  double f;
};

double safe_eval(const std::function<double(const Eigen::VectorXd&)>& fn,
                 const Eigen::VectorXd& x) {
  const double v = fn(x);
  return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

NelderMeadResult nm_single(const std::function<double(const Eigen::VectorXd&)>& fn,
                           const Eigen::VectorXd& x0, const Eigen::VectorXd& step,
                           const NelderMeadOptions& o) {
  const int n = int(x0.size());
  std::vector<SimplexPoint> s(n + 1);
  s[0] = {x0, safe_eval(fn, x0)};
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd xi = x0;
    xi[i] += step[i];
    s[i + 1] = {xi, safe_eval(fn, xi)};
  }
  auto by_f = [](const SimplexPoint& a, const SimplexPoint& b) { return a.f < b.f; };

  NelderMeadResult res;
  int iter = 0;
  double best_seen = s[0].f;
  for (int i = 1; i <= n; ++i) best_seen = std::min(best_seen, s[i].f);
  int last_improve = 0;
  const int stall_window = 60 + 5 * n;
  for (; iter < o.max_iterations; ++iter) {
    std::sort(s.begin(), s.end(), by_f);
    const double spread = s[n].f - s[0].f;
    const double fscale = std::abs(s[0].f) + std::abs(s[n].f);
    // With f = distance^2 and f_tolerance = tol^2, steps that move the
    // distance by less than tol do not count as progress.
    const double thresh =
        o.f_tolerance + 2 * std::sqrt(std::max(best_seen, 0.0) * o.f_tolerance);
    if (s[0].f < best_seen - thresh) {
      best_seen = s[0].f;
      last_improve = iter;
    }
    // Function-value convergence only: the model families have continuous
    // symmetry orbits, so the simplex legitimately stretches along flat
    // valleys of minimizers and a diameter test would never fire. A long
    // stall of the best value is accepted as convergence for the same reason.
    if (spread <= o.f_tolerance + 1e-9 * fscale || iter - last_improve >= stall_window) {
      res.converged = true;
      break;
    }

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) centroid += s[i].x;
    centroid /= n;

    const Eigen::VectorXd xr = centroid + (centroid - s[n].x);
    const double fr = safe_eval(fn, xr);
    if (fr < s[0].f) {
      const Eigen::VectorXd xe = centroid + 2.0 * (centroid - s[n].x);
      const double fe = safe_eval(fn, xe);
      s[n] = fe < fr ? SimplexPoint{xe, fe} : SimplexPoint{xr, fr};
    } else if (fr < s[n - 1].f) {
      s[n] = {xr, fr};
    } else {
      const Eigen::VectorXd xc = centroid + 0.5 * (s[n].x - centroid);
      const double fc = safe_eval(fn, xc);
      if (fc < s[n].f) {
        s[n] = {xc, fc};
      } else {
        for (int i = 1; i <= n; ++i) {
          s[i].x = s[0].x + 0.5 * (s[i].x - s[0].x);
          s[i].f = safe_eval(fn, s[i].x);
        }
      }
    }
  }
  std::sort(s.begin(), s.end(), by_f);
  res.x = s[0].x;
  res.value = s[0].f;
  res.iterations = iter;
  return res;
}

}  // namespace

NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& objective,
                             const Eigen::VectorXd& x0, const Eigen::VectorXd& step0,
                             const NelderMeadOptions& opts) {
  Rng rng(opts.seed);
  NelderMeadResult best = nm_single(objective, x0, step0, opts);
  best.restarts_used = 0;
  int total_iter = best.iterations;
  for (int r = 1; r < std::max(1, opts.restarts); ++r) {
    Eigen::VectorXd xr = best.x;
    for (int i = 0; i < xr.size(); ++i)
      xr[i] += opts.restart_spread * step0[i] * (2 * rng.uniform() - 1);
    NelderMeadResult cand = nm_single(objective, xr, step0, opts);
    total_iter += cand.iterations;
    // Accept a restart only when it moves the distance by more than the
    // tolerance (f = distance^2, f_tolerance = tol^2).
    const double gain =
        opts.f_tolerance + 2 * std::sqrt(std::max(best.value, 0.0) * opts.f_tolerance);
    if (cand.value < best.value - gain) {
      cand.restarts_used = r;
      best = cand;
    }
  }
  best.iterations = total_iter;
  return best;
}

// ---------------------------------------------------------------------------
// Reparameterizations
// ---------------------------------------------------------------------------

Reparameterization Reparameterization::identity(Kind k) {
  Reparameterization p;
  p.kind = k;
  return p;
}

Reparameterization Reparameterization::moebius_exponential(std::span<const double> xi) {
  if (xi.size() != 6) throw config_error("moebius_exponential expects 6 parameters");
  const Cplx A(xi[0], xi[1]), B(xi[2], xi[3]), C(xi[4], xi[5]);
  // exp of [[A, B], [C, -A]]: X^2 = (A^2 + BC) I
  const Cplx m2 = A * A + B * C;
  const Cplx m = std::sqrt(m2);
  Cplx ch, shc;
  if (std::abs(m) < 1e-8) {
    ch = 1.0 + m2 / 2.0 + m2 * m2 / 24.0;
    shc = 1.0 + m2 / 6.0 + m2 * m2 / 120.0;
  } else {
    ch = std::cosh(m);
    shc = std::sinh(m) / m;
  }
  Reparameterization p;
  p.kind = Kind::sphere_moebius;
  p.a = ch + shc * A;
  p.b = shc * B;
  p.c = shc * C;
  p.d = ch - shc * A;
  return p;
}

Reparameterization Reparameterization::affine(double log_scale, double angle, Cplx offset) {
  Reparameterization p;
  p.kind = Kind::sphere_moebius;
  const Cplx half = std::exp(Cplx(log_scale / 2, angle / 2));
  p.a = half;
  p.d = 1.0 / half;
  p.b = offset / half;
  p.c = 0;
  return p;
}

Reparameterization Reparameterization::shift(double v0, double theta0) {
  Reparameterization p;
  p.kind = Kind::cylinder_shift;
  p.v0 = v0;
  p.theta0 = theta0;
  return p;
}

double Reparameterization::det_residual() const {
  if (kind == Kind::cylinder_shift) return 0;
  return std::abs(a * d - b * c - Cplx(1, 0));
}

Vec2 Reparameterization::operator()(const Vec2& p) const {
  if (kind == Kind::cylinder_shift) return Vec2(p[0] + v0, p[1] + theta0);
  const Cplx z(p[0], p[1]);
  const Cplx den = c * z + d;
  const Cplx w = (a * z + b) / den;
  return Vec2(w.real(), w.imag());
}

ChartJet Reparameterization::jet(const Vec2& p) const {
  if (kind == Kind::cylinder_shift) {
    ChartJet j;
    j.value = Vec2(p[0] + v0, p[1] + theta0);
    j.d1 = Mat2::Identity();
    j.d2[0] = j.d2[1] = j.d2[2] = Vec2::Zero();
    return j;
  }
  const Cplx z(p[0], p[1]);
  const Cplx den = c * z + d;
  const Cplx det = a * d - b * c;
  const Cplx w = (a * z + b) / den;
  const Cplx dw = det / (den * den);
  const Cplx ddw = -2.0 * c * det / (den * den * den);
  return chart_jet_holomorphic(w, dw, ddw);
}

namespace {

struct ReparamJetMap final : JetMap {
  std::shared_ptr<const JetMap> base;
  Reparameterization phi;
  ReparamJetMap(std::shared_ptr<const JetMap> b, Reparameterization p)
      : base(std::move(b)), phi(std::move(p)) {}
  int ambient_dim() const override { return base->ambient_dim(); }
  Jet2 jet(const Vec2& p) const override {
    const ChartJet cj = phi.jet(p);
    return jet_compose(base->jet(cj.value), cj);
  }
};

}  // namespace

Immersion reparameterize(const Immersion& f, const Reparameterization& phi) {
  Immersion g = f;
  g.map = std::make_shared<ReparamJetMap>(f.map, phi);
  g.label = f.label + "|reparam";
  return g;
}

// ---------------------------------------------------------------------------
// Alignment experiments
// ---------------------------------------------------------------------------

QuadratureGrid alignment_grid(const Immersion& f, std::array<int, 2> resolution) {
  Immersion clamped = f;
  Interval& ax = clamped.domain.axis[0];
  if (f.domain.kind == ParamDomain::Kind::punctured_plane) {
    ax.lo = std::max(ax.lo, -3.0);
    ax.hi = std::min(ax.hi, 3.0);
  } else if (f.domain.kind == ParamDomain::Kind::periodic_strip && !f.domain.periodic[0]) {
    ax.lo = std::max(ax.lo, -6.0);
    ax.hi = std::min(ax.hi, 6.0);
  }
  QuadratureGrid g = sample_grid(clamped, resolution, false);
  g.tag = "core:" + f.label + ":" + std::to_string(resolution[0]) + "x" +
          std::to_string(resolution[1]);
  return g;
}

namespace {

double inv_area_weight(const Jet2& j) {
  const double g11 = j.d1[0].squaredNorm(), g22 = j.d1[1].squaredNorm(),
               g12 = j.d1[0].dot(j.d1[1]);
  const double det = g11 * g22 - g12 * g12;
  return det > 0 ? 1.0 / std::sqrt(det) : std::numeric_limits<double>::infinity();
}

double jet_norm2_weighted(const Jet2& j) {
  return j.position.squaredNorm() + j.d1[0].squaredNorm() + j.d1[1].squaredNorm() +
         j.d2[0].squaredNorm() + 2 * j.d2[1].squaredNorm() + j.d2[2].squaredNorm();
}

double jet_dot_weighted(const Jet2& a, const Jet2& b) {
  return a.position.dot(b.position) + a.d1[0].dot(b.d1[0]) + a.d1[1].dot(b.d1[1]) +
         a.d2[0].dot(b.d2[0]) + 2 * a.d2[1].dot(b.d2[1]) + a.d2[2].dot(b.d2[2]);
}

// Unit-sphere jet of the stereographic chart (model side of the round-sphere
// experiment).
Jet2 unit_sphere_jet(const Vec2& p) {
  const D2 X = D2::var_x(p[0]), Y = D2::var_y(p[1]);
  const D2 s = X * X + Y * Y;
  const D2 den = recip(s + 1.0);
  D2 n[3] = {2.0 * X * den, 2.0 * Y * den, (s - 1.0) * den};
  Jet2 j;
  j.position = Vec(3);
  j.d1[0] = Vec(3);
  j.d1[1] = Vec(3);
  for (int k = 0; k < 3; ++k) j.d2[k] = Vec(3);
  for (int i = 0; i < 3; ++i) set_jet_component(j, i, n[i]);
  return j;
}

Jet2 jet_scale_add(const Jet2& n, double r, const Vec& c) {
  Jet2 j = n;
  j.position = c + r * n.position;
  j.d1[0] = r * n.d1[0];
  j.d1[1] = r * n.d1[1];
  for (int k = 0; k < 3; ++k) j.d2[k] = r * n.d2[k];
  return j;
}

struct WeightedCentroid {
  Vec centroid;
  double area;
};

WeightedCentroid area_centroid(const Immersion& f, const QuadratureGrid& grid) {
  const int n = f.ambient_dim();
  Vec acc = Vec::Zero(n);
  double area = 0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Jet2 j = f.jet(grid.nodes[k]);
    const double g11 = j.d1[0].squaredNorm(), g22 = j.d1[1].squaredNorm(),
                 g12 = j.d1[0].dot(j.d1[1]);
    const double dA = grid.weights[k] * std::sqrt(std::max(0.0, g11 * g22 - g12 * g12));
    acc += dA * j.position;
    area += dA;
  }
  return {Vec(acc / area), area};
}

}  // namespace

AlignmentResult nearest_round_sphere(const Immersion& f, const OptimizerConfig& cfg) {
  if (f.domain.kind != ParamDomain::Kind::punctured_plane || f.end_count() > 0)
    throw domain_error("nearest_round_sphere expects a sphere-type immersion");

  const QuadratureGrid grid = alignment_grid(f, cfg.grid);

  // cached data of f
  const std::size_t N = grid.size();
  std::vector<Jet2> jf(N);
  std::vector<double> wt(N);
  double defect_max = 0;
  for (std::size_t k = 0; k < N; ++k) {
    jf[k] = f.jet(grid.nodes[k]);
    const FundForms F = fundamental_forms(jf[k]);
    defect_max = std::max(defect_max, F.conf_defect);
    wt[k] = grid.weights[k] / F.area_density();  // w e^{-2u}
  }
  if (defect_max > 0.2)
    throw numerical_error("conformality defect too large for the round-sphere experiment");

  std::vector<double> cterm(N);
  for (std::size_t k = 0; k < N; ++k) cterm[k] = wt[k] * jet_norm2_weighted(jf[k]);
  const double C = pairwise_sum(cterm);

  // Closed-form center/radius for a given reparameterization; returns the
  // squared distance remainder.
  struct Fit {
    Vec c;
    double r;
    double dist2;
  };
  auto fit_for = [&](const Reparameterization& phi) {
    Eigen::Matrix4d M = Eigen::Matrix4d::Zero();
    Eigen::Vector4d b = Eigen::Vector4d::Zero();
    for (std::size_t k = 0; k < N; ++k) {
      const ChartJet cj = phi.jet(grid.nodes[k]);
      const Jet2 n = jet_compose(unit_sphere_jet(cj.value), cj);
      const double w = wt[k];
      for (int i = 0; i < 3; ++i) {
        M(i, i) += w;
        M(i, 3) += w * n.position[i];
        b[i] += w * jf[k].position[i];
      }
      M(3, 3) += w * jet_norm2_weighted(n);
      b[3] += w * jet_dot_weighted(jf[k], n);
    }
    for (int i = 0; i < 3; ++i) M(3, i) = M(i, 3);
    const Eigen::Vector4d xi = M.ldlt().solve(b);
    Fit fit;
    fit.c = Vec(3);
    fit.c << xi[0], xi[1], xi[2];
    fit.r = xi[3];
    fit.dist2 = std::max(0.0, C - b.dot(xi));
    return fit;
  };

  auto objective = [&](const Eigen::VectorXd& x) {
    const Reparameterization phi =
        Reparameterization::moebius_exponential(std::span<const double>(x.data(), 6));
    return fit_for(phi).dist2;
  };

  NelderMeadOptions nmo;
  nmo.max_iterations = cfg.max_iterations;
  nmo.f_tolerance = cfg.tolerance * cfg.tolerance;
  nmo.restarts = cfg.restarts;
  nmo.seed = cfg.seed;
  const Eigen::VectorXd x0 = Eigen::VectorXd::Zero(6);
  const Eigen::VectorXd step = Eigen::VectorXd::Constant(6, 0.2);
  const NelderMeadResult nm = nelder_mead(objective, x0, step, nmo);

  const Reparameterization phi =
      Reparameterization::moebius_exponential(std::span<const double>(nm.x.data(), 6));
  const Fit fit = fit_for(phi);

  AlignmentResult res;
  res.model = "round_sphere";
  res.base_level = 8 * pi;
  res.reparam = phi;
  const double r_abs = std::abs(fit.r);
  Mat R = Mat::Identity(3, 3);
  if (fit.r < 0) R = -R;
  res.transform = MoebiusTransform::similarity(R, std::max(r_abs, 1e-300), fit.c);
  res.iterations = nm.iterations;
  res.converged = nm.converged;

  // distance components for the record
  std::vector<double> t0(N), t1(N), t2(N);
  for (std::size_t k = 0; k < N; ++k) {
    const ChartJet cj = phi.jet(grid.nodes[k]);
    const Jet2 model = jet_scale_add(jet_compose(unit_sphere_jet(cj.value), cj), fit.r, fit.c);
    Jet2 d;
    d.position = jf[k].position - model.position;
    d.d1[0] = jf[k].d1[0] - model.d1[0];
    d.d1[1] = jf[k].d1[1] - model.d1[1];
    for (int q = 0; q < 3; ++q) d.d2[q] = jf[k].d2[q] - model.d2[q];
    t0[k] = wt[k] * d.position.squaredNorm();
    t1[k] = wt[k] * (d.d1[0].squaredNorm() + d.d1[1].squaredNorm());
    t2[k] = wt[k] *
            (d.d2[0].squaredNorm() + 2 * d.d2[1].squaredNorm() + d.d2[2].squaredNorm());
  }
  res.distance.comp[0] = pairwise_sum(t0);
  res.distance.comp[1] = pairwise_sum(t1);
  res.distance.comp[2] = pairwise_sum(t2);
  res.distance.value =
      std::sqrt(std::max(0.0, res.distance.comp[0] + res.distance.comp[1] + res.distance.comp[2]));
  res.distance.weight_source = f.label;
  res.distance.grid_tag = grid.tag;

  const QuadratureGrid full = sample_grid(f, cfg.grid);
  const EnergyReport er = energy_report(f, full);
  res.delta = er.total_sff - res.base_level;
  res.area = er.area;
  return res;
}

namespace {

struct FamilyInfo {
  std::string model_id;
  double base_level;
  int expected_marks;
  int expected_order;
  Reparameterization::Kind reparam_kind;
};

FamilyInfo family_info(ModelFamily fam) {
  switch (fam) {
    case ModelFamily::inverted_catenoid:
      return {"inverted_catenoid", 24 * pi, 2, 0, Reparameterization::Kind::cylinder_shift};
    case ModelFamily::inverted_enneper:
      return {"inverted_enneper", 32 * pi, 1, 2, Reparameterization::Kind::sphere_moebius};
    case ModelFamily::inverted_chen:
      return {"inverted_chen_graph", 20 * pi, 1, 1, Reparameterization::Kind::sphere_moebius};
  }
  throw config_error("unknown model family");
}

}  // namespace

AlignmentResult align_to_model(const Immersion& f, ModelFamily family,
                               const OptimizerConfig& cfg) {
  const FamilyInfo info = family_info(family);
  const int n = f.ambient_dim();

  // Marked-point signature check via the branch-order fits.
  std::vector<const MarkedPoint*> marks;
  for (const auto& m : f.marked_points)
    if (m.kind != MarkedPoint::Kind::end) marks.push_back(&m);
  if (int(marks.size()) != info.expected_marks)
    throw domain_error("marked-point signature mismatch for " + info.model_id);
  for (const MarkedPoint* m : marks) {
    const auto radii = default_branch_radii(*m);
    const BranchOrderFit fit = branch_order_estimate(f, *m, radii);
    if (fit.order != info.expected_order)
      throw domain_error("branch order " + std::to_string(fit.order) + " does not match " +
                         info.model_id);
  }

  // Model over the same truncated domain.
  std::map<std::string, double> mp;
  if (f.domain.kind == ParamDomain::Kind::periodic_strip) {
    mp["V"] = f.domain.axis[0].hi;
  } else {
    mp["R"] = std::exp(f.domain.axis[0].hi);
  }
  if (family == ModelFamily::inverted_chen) mp["c"] = 1.0;
  const Immersion model = make_catalog_surface(info.model_id, mp);
  if (!model.domain.same_as(f.domain))
    throw domain_error("model/parameter domain mismatch in align_to_model");

  const QuadratureGrid grid = alignment_grid(f, cfg.grid);
  const std::size_t N = grid.size();
  std::vector<Jet2> jm(N);
  for (std::size_t k = 0; k < N; ++k) jm[k] = model.jet(grid.nodes[k]);

  // Parameter layout: rotation | log-scale | translation | reparameterization
  const int nrot = rotation_param_count(n);
  const int nrep = info.reparam_kind == Reparameterization::Kind::cylinder_shift ? 2 : 4;
  const int dim = nrot + 1 + n + nrep;

  auto unpack = [&](const Eigen::VectorXd& x, MoebiusTransform& sigma,
                    Reparameterization& phi) {
    const Mat R = rotation_from_params(n, std::span<const double>(x.data(), nrot));
    const double ls = x[nrot];
    Vec t(n);
    for (int i = 0; i < n; ++i) t[i] = x[nrot + 1 + i];
    sigma = MoebiusTransform::similarity(R, std::exp(ls), t);
    if (info.reparam_kind == Reparameterization::Kind::cylinder_shift) {
      phi = Reparameterization::shift(x[nrot + 1 + n], x[nrot + 2 + n]);
    } else {
      phi = Reparameterization::affine(x[nrot + 1 + n], x[nrot + 2 + n],
                                       Cplx(x[nrot + 3 + n], x[nrot + 4 + n]));
    }
  };

  auto distance2 = [&](const MoebiusTransform& sigma, const Reparameterization& phi) {
    std::vector<double> terms(N);
    for (std::size_t k = 0; k < N; ++k) {
      const ChartJet cj = phi.jet(grid.nodes[k]);
      const Jet2 jf = sigma.push_jet(jet_compose(f.jet(cj.value), cj));
      const double w = grid.weights[k] * inv_area_weight(jf);
      Jet2 d;
      d.position = jf.position - jm[k].position;
      d.d1[0] = jf.d1[0] - jm[k].d1[0];
      d.d1[1] = jf.d1[1] - jm[k].d1[1];
      for (int q = 0; q < 3; ++q) d.d2[q] = jf.d2[q] - jm[k].d2[q];
      terms[k] = w * jet_norm2_weighted(d);
    }
    return pairwise_sum(terms);
  };

  auto objective = [&](const Eigen::VectorXd& x) {
    MoebiusTransform sigma = MoebiusTransform::identity(n);
    Reparameterization phi = Reparameterization::identity(info.reparam_kind);
    unpack(x, sigma, phi);
    return distance2(sigma, phi);
  };

  // Centroid/area matching initialization, then a coarse grid over the
  // reparameterization angle (the angular placement has well-separated local
  // basins that the simplex cannot hop between).
  const WeightedCentroid wf = area_centroid(f, grid);
  const WeightedCentroid wm = area_centroid(model, grid);
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(dim);
  x0[nrot] = 0.5 * std::log(wm.area / wf.area);
  for (int i = 0; i < n; ++i)
    x0[nrot + 1 + i] = wm.centroid[i] - std::exp(x0[nrot]) * wf.centroid[i];

  const int angle_slot = nrot + 2 + n;  // theta0 (cylinder) / angle (affine)
  double best_init = std::numeric_limits<double>::infinity();
  double best_angle = 0;
  for (int k = 0; k < 16; ++k) {
    Eigen::VectorXd xa = x0;
    xa[angle_slot] = 2 * pi * k / 16;
    const double v = objective(xa);
    if (v < best_init) {
      best_init = v;
      best_angle = xa[angle_slot];
    }
  }
  x0[angle_slot] = best_angle;

  Eigen::VectorXd step = Eigen::VectorXd::Constant(dim, 0.1);
  for (int i = 0; i < nrot; ++i) step[i] = 0.15;

  NelderMeadOptions nmo;
  nmo.max_iterations = cfg.max_iterations;
  nmo.f_tolerance = cfg.tolerance * cfg.tolerance;
  nmo.restarts = cfg.restarts;
  nmo.seed = cfg.seed;
  NelderMeadResult nm = nelder_mead(objective, x0, step, nmo);

  MoebiusTransform sigma = MoebiusTransform::identity(n);
  Reparameterization phi = Reparameterization::identity(info.reparam_kind);
  unpack(nm.x, sigma, phi);

  // Optional second phase over the full group: append an inversion leg and
  // keep it only if it improves the distance.
  if (cfg.search_inversion) {
    const QuadratureGrid coarse = alignment_grid(f, {32, 32});
    const SafeCenter sc = safe_inversion_center(f, coarse);
    auto objective_inv = [&](const Eigen::VectorXd& x) {
      MoebiusTransform sim = MoebiusTransform::identity(n);
      Reparameterization ph = Reparameterization::identity(info.reparam_kind);
      unpack(x.head(dim), sim, ph);
      Vec q(n);
      for (int i = 0; i < n; ++i) q[i] = x[dim + i];
      MoebiusTransform full = sim;
      full.inversion_center = q;
      return distance2(full, ph);
    };
    Eigen::VectorXd xi0(dim + n);
    xi0.head(dim) = nm.x;
    for (int i = 0; i < n; ++i) xi0[dim + i] = sc.center[i] / sc.applied_dilation;
    Eigen::VectorXd stepi = Eigen::VectorXd::Constant(dim + n, 0.1);
    NelderMeadOptions nmo2 = nmo;
    nmo2.restarts = 2;
    const NelderMeadResult nm2 = nelder_mead(objective_inv, xi0, stepi, nmo2);
    if (nm2.value < nm.value) {
      unpack(nm2.x.head(dim), sigma, phi);
      Vec q(n);
      for (int i = 0; i < n; ++i) q[i] = nm2.x[dim + i];
      sigma.inversion_center = q;
      nm = nm2;
    }
  }

  AlignmentResult res;
  res.model = info.model_id;
  res.base_level = info.base_level;
  res.transform = sigma;
  res.reparam = phi;
  res.iterations = nm.iterations;
  res.converged = nm.converged;
  res.distance.value = std::sqrt(std::max(0.0, nm.value));
  res.distance.weight_source = f.label;
  res.distance.grid_tag = grid.tag;

  const QuadratureGrid full = sample_grid(f, cfg.grid);
  const EnergyReport er = energy_report(f, full);
  res.delta = er.total_sff - res.base_level;
  res.area = er.area;
  return res;
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

double spearman_rank_correlation(std::span<const double> x, std::span<const double> y) {
  const int n = int(x.size());
  auto ranks = [n](std::span<const double> v) {
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return v[a] < v[b]; });
    std::vector<double> r(n);
    int i = 0;
    while (i < n) {
      int j = i;
      while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
      const double avg = 0.5 * (i + j) + 1;
      for (int k = i; k <= j; ++k) r[idx[k]] = avg;
      i = j + 1;
    }
    return r;
  };
  const std::vector<double> rx = ranks(x), ry = ranks(y);
  double mx = 0, my = 0;
  for (int i = 0; i < n; ++i) { mx += rx[i]; my += ry[i]; }
  mx /= n; my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (int i = 0; i < n; ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0 || syy == 0) return 0;
  return sxy / std::sqrt(sxx * syy);
}

SweepResult perturbation_sweep(const std::string& family, std::span<const double> epsilons,
                               const OptimizerConfig& cfg, int workers) {
  if (epsilons.empty()) throw config_error("sweep needs a non-empty epsilon list");
  for (double e : epsilons)
    if (e < 0 || e > 0.3) throw config_error("sweep epsilons must lie in [0, 0.3]");

  SweepResult out;
  out.family = family;
  out.rows.resize(epsilons.size());

  auto run_row = [&](std::size_t i) {
    const double eps = epsilons[i];
    AlignmentResult ar;
    if (family == "round_sphere") {
      const Immersion f =
          make_catalog_surface("perturbed_sphere", {{"eps", eps}, {"l", 2}, {"m", 0}});
      ar = nearest_round_sphere(f, cfg);
    } else if (family == "inverted_catenoid") {
      const Immersion f =
          make_catalog_surface("inverted_perturbed_catenoid", {{"eps", eps}, {"V", 12}});
      ar = align_to_model(f, ModelFamily::inverted_catenoid, cfg);
    } else {
      throw config_error("unknown sweep family: " + family);
    }
    SweepRow row;
    row.epsilon = eps;
    row.delta = ar.delta;
    row.distance = ar.distance.value;
    row.area = ar.area;
    row.normalized_distance = ar.distance.value / std::sqrt(ar.area);
    row.converged = ar.converged;
    out.rows[i] = row;
  };

  if (workers <= 1) {
    for (std::size_t i = 0; i < epsilons.size(); ++i) run_row(i);
  } else {
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(epsilons.size());
    for (int w = 0; w < std::min<int>(workers, int(epsilons.size())); ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < epsilons.size(); i = next.fetch_add(1)) {
          try {
            run_row(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  // Power-law fit of distance vs delta over converged rows above noise.
  std::vector<double> lx, ly, deltas, dists;
  for (const SweepRow& r : out.rows) {
    deltas.push_back(r.delta);
    dists.push_back(r.distance);
    if (r.converged && r.delta > 1e-9 && r.distance > 0) {
      lx.push_back(std::log(r.delta));
      ly.push_back(std::log(r.distance));
    }
  }
  out.rows_used = int(lx.size());
  if (out.rows_used >= 2) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) { mx += lx[i]; my += ly[i]; }
    mx /= double(lx.size());
    my /= double(lx.size());
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      sxx += (lx[i] - mx) * (lx[i] - mx);
      sxy += (lx[i] - mx) * (ly[i] - my);
    }
    out.exponent = sxy / sxx;
    const double b0 = my - out.exponent * mx;
    double rss = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      const double e = ly[i] - (b0 + out.exponent * lx[i]);
      rss += e * e;
    }
    out.fit_residual = std::sqrt(rss / double(lx.size()));
  }
  out.spearman = spearman_rank_correlation(deltas, dists);
  return out;
}

}  // namespace wlab
