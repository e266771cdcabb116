#include "wlab/diffgeo.hpp"

#include <algorithm>

namespace wlab {

FundForms fundamental_forms(const Jet2& j) {
  FundForms F;
  const Vec& f1 = j.d1[0];
  const Vec& f2 = j.d1[1];
  F.g(0, 0) = f1.dot(f1);
  F.g(0, 1) = F.g(1, 0) = f1.dot(f2);
  F.g(1, 1) = f2.dot(f2);
  F.det_g = F.g(0, 0) * F.g(1, 1) - F.g(0, 1) * F.g(0, 1);

  const double tr = F.g(0, 0) + F.g(1, 1);
  // eigenvalues of g are the squared singular values of (f1 f2)
  const double disc = std::sqrt(std::max(0.0, tr * tr - 4 * F.det_g));
  const double lam_max = 0.5 * (tr + disc);
  const double lam_min = 0.5 * (tr - disc);
  if (!(lam_min > 1e-24 * lam_max) || !(F.det_g > 0))
    throw numerical_error("degenerate metric (branch point proximity): det g = " +
                          std::to_string(F.det_g));

  F.u = 0.25 * std::log(F.det_g);
  F.conf_defect = (std::abs(F.g(0, 0) - F.g(1, 1)) + 2 * std::abs(F.g(0, 1))) / tr;

  // orthonormal tangent frame
  Vec e1 = f1 / f1.norm();
  Vec e2 = f2 - f2.dot(e1) * e1;
  e2 /= e2.norm();

  for (int k = 0; k < 3; ++k) {
    const Vec& s = j.d2[k];
    F.A[k] = s - s.dot(e1) * e1 - s.dot(e2) * e2;
  }
  // residual relative to the overall |A| scale (components can vanish exactly)
  double a_scale = 0, tang = 0;
  for (int k = 0; k < 3; ++k) {
    a_scale = std::max(a_scale, F.A[k].norm());
    tang = std::max(tang, std::hypot(F.A[k].dot(e1), F.A[k].dot(e2)));
  }
  F.tangential_residual = a_scale > 0 ? tang / a_scale : 0.0;

  Mat2 B;  // inverse metric
  B << F.g(1, 1), -F.g(0, 1), -F.g(0, 1), F.g(0, 0);
  B /= F.det_g;

  F.H = B(0, 0) * F.A[0] + 2 * B(0, 1) * F.A[1] + B(1, 1) * F.A[2];
  F.norm2_H = F.H.squaredNorm();

  for (int k = 0; k < 3; ++k) {
    const double gk = (k == 0) ? F.g(0, 0) : (k == 1 ? F.g(0, 1) : F.g(1, 1));
    F.A0[k] = F.A[k] - 0.5 * gk * F.H;
  }

  auto metric_norm2 = [&](const Vec* T) {
    // sum_{ijkl} B_ik B_jl <T_ij, T_kl> with symmetric storage (11,12,22)
    auto comp = [&](int i, int jj) { return T[i + jj]; };
    double s = 0;
    for (int i = 0; i < 2; ++i)
      for (int jj = 0; jj < 2; ++jj)
        for (int k = 0; k < 2; ++k)
          for (int l = 0; l < 2; ++l) s += B(i, k) * B(jj, l) * comp(i, jj).dot(comp(k, l));
    return s;
  };
  F.norm2_A = metric_norm2(F.A);
  F.norm2_A0 = metric_norm2(F.A0);

  F.K = (F.A[0].dot(F.A[2]) - F.A[1].squaredNorm()) / F.det_g;
  F.gauss_residual = std::abs(F.K - 0.5 * (F.norm2_H - F.norm2_A));
  return F;
}

double conformal_factor(const Jet2& j) {
  const Vec& f1 = j.d1[0];
  const Vec& f2 = j.d1[1];
  const double g11 = f1.dot(f1), g12 = f1.dot(f2), g22 = f2.dot(f2);
  const double det = g11 * g22 - g12 * g12;
  if (!(det > 0)) throw numerical_error("degenerate metric in conformal factor");
  return 0.25 * std::log(det);
}

Vec2 conformal_factor_gradient(const Jet2& j) {
  const Vec& f1 = j.d1[0];
  const Vec& f2 = j.d1[1];
  const Vec* d2 = j.d2;
  const double g11 = f1.dot(f1), g12 = f1.dot(f2), g22 = f2.dot(f2);
  const double det = g11 * g22 - g12 * g12;
  Vec2 du;
  for (int k = 0; k < 2; ++k) {
    // d_k g_ij = <f_ki, f_j> + <f_i, f_kj>; f_ki = d2[k + i]
    const double dg11 = 2 * d2[k].dot(f1);
    const double dg12 = d2[k].dot(f2) + f1.dot(d2[k + 1]);
    const double dg22 = 2 * d2[k + 1].dot(f2);
    const double ddet = dg11 * g22 + g11 * dg22 - 2 * g12 * dg12;
    du[k] = 0.25 * ddet / det;
  }
  return du;
}

std::vector<double> default_branch_radii(const MarkedPoint& p) {
  const bool cylinder_end = p.where == MarkedPoint::Where::axis0_plus_inf ||
                            p.where == MarkedPoint::Where::axis0_minus_inf;
  // Cylinder-end charts see corrections ~ r^2 log^2 r; push the window down a
  // decade to keep the fitted slope clean.
  const double top = cylinder_end ? 1e-2 : 1e-1;
  std::vector<double> radii;
  for (int i = 0; i < 5; ++i) radii.push_back(top * std::pow(10.0, -0.5 * i));
  return radii;
}

namespace {

// u in the compact local chart around a marked point, sampled on the circle
// of local radius r at the given angle.
double local_u(const Immersion& f, const MarkedPoint& p, double r, double phi) {
  switch (p.where) {
    case MarkedPoint::Where::finite: {
      const Vec2 z = p.location + r * Vec2(std::cos(phi), std::sin(phi));
      return conformal_factor(f.jet(z));
    }
    case MarkedPoint::Where::axis0_plus_inf: {
      // w = e^{-(v + i theta)}: u_w = u + v
      const double v = -std::log(r);
      return conformal_factor(f.jet(Vec2(v, -phi))) + v;
    }
    case MarkedPoint::Where::axis0_minus_inf: {
      const double v = std::log(r);
      return conformal_factor(f.jet(Vec2(v, phi))) - v;
    }
    case MarkedPoint::Where::plane_infinity: {
      // w = 1/z: u_w = u(z) - 2 log|w|
      const double R = 1.0 / r;
      const Vec2 z = R * Vec2(std::cos(-phi), std::sin(-phi));
      return conformal_factor(f.jet(z)) - 2 * std::log(r);
    }
  }
  return 0;
}

}  // namespace

BranchOrderFit branch_order_estimate(const Immersion& f, const MarkedPoint& p,
                                     std::span<const double> radii, int angular_samples) {
  if (p.kind == MarkedPoint::Kind::end)
    throw config_error("branch_order_estimate expects a branch or multiplicity marked point");
  if (radii.size() < 4) throw config_error("need at least 4 radii");
  const double rmax = *std::max_element(radii.begin(), radii.end());
  const double rmin = *std::min_element(radii.begin(), radii.end());
  if (!(rmax / rmin >= 99.0)) throw config_error("radii must span at least 2 decades");

  BranchOrderFit fit;
  fit.radii.assign(radii.begin(), radii.end());
  std::vector<double> xs, ys;
  for (double r : radii) {
    std::vector<double> vals(angular_samples);
    for (int a = 0; a < angular_samples; ++a)
      vals[a] = local_u(f, p, r, 2 * pi * a / angular_samples);
    xs.push_back(std::log(r));
    ys.push_back(pairwise_sum(vals) / angular_samples);
  }
  const int n = int(xs.size());
  double mx = 0, my = 0;
  for (int i = 0; i < n; ++i) { mx += xs[i]; my += ys[i]; }
  mx /= n; my /= n;
  double sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  fit.slope = sxy / sxx;
  fit.order = int(std::lround(fit.slope));
  fit.slope_residual = std::abs(fit.slope - fit.order);
  const double intercept = my - fit.slope * mx;
  double rss = 0;
  for (int i = 0; i < n; ++i) {
    const double e = ys[i] - (intercept + fit.slope * xs[i]);
    rss += e * e;
  }
  fit.fit_rms = std::sqrt(rss / n);
  if (fit.slope_residual > 0.1)
    throw numerical_error("branch-order slope " + std::to_string(fit.slope) +
                          " is not within 0.1 of an integer (mis-marked point or truncation)");
  if (fit.order < 0) fit.order = 0;
  return fit;
}

namespace {

double bump(double s) { return std::abs(s) < 1 ? std::exp(1 - 1 / (1 - s * s)) : 0.0; }
double bump_d(double s) {
  if (std::abs(s) >= 1) return 0.0;
  const double q = 1 - s * s;
  return bump(s) * (-2 * s / (q * q));
}

}  // namespace

LiouvilleResult liouville_residual(const Immersion& f, Interval region0, Interval region1,
                                   std::array<int, 2> resolution) {
  const ParamDomain& dom = f.domain;
  // region must stay inside the sampling box (exclusion zones trim it) with a
  // two-spacing margin
  Interval ax0 = dom.axis[0];
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
  for (int a = 0; a < 2; ++a) {
    const Interval reg = a == 0 ? region0 : region1;
    const Interval box = a == 0 ? ax0 : dom.axis[1];
    const double h = reg.length() / resolution[a];
    if (!dom.periodic[a]) {
      if (reg.lo < box.lo + 2 * h - 1e-12 || reg.hi > box.hi - 2 * h + 1e-12)
        throw domain_error("liouville region touches the domain boundary or exclusion zone");
    }
  }

  // Each family member is integrated over its own support with composite
  // Gauss-Legendre panels (the bumps are flat at the support edge, where
  // equispaced rules sharing one region grid converge far too slowly).
  static const double gl_x[6] = {0.1252334085114689, 0.3678314989981802, 0.5873179542866175,
                                 0.7699026741943047, 0.9041172563704749, 0.9815606342467192};
  static const double gl_w[6] = {0.2491470458134028, 0.2334925365383548, 0.2031674267230659,
                                 0.1600783285433462, 0.1069393259953184, 0.0471753363865118};
  auto gauss_panels = [](double lo, double hi, int n, std::vector<double>& x,
                         std::vector<double>& w) {
    x.clear();
    w.clear();
    const int panels = std::max(2, n / 10);
    const double hp = (hi - lo) / panels;
    for (int p = 0; p < panels; ++p) {
      const double c = lo + (p + 0.5) * hp;
      for (int k = 0; k < 6; ++k) {
        x.push_back(c - 0.5 * hp * gl_x[k]);
        w.push_back(0.5 * hp * gl_w[k]);
        x.push_back(c + 0.5 * hp * gl_x[k]);
        w.push_back(0.5 * hp * gl_w[k]);
      }
    }
  };

  const Vec2 center(0.5 * (region0.lo + region0.hi), 0.5 * (region1.lo + region1.hi));
  const Vec2 half(0.5 * region0.length(), 0.5 * region1.length());

  LiouvilleResult res;
  const double offsets[5][2] = {{0, 0}, {0.2, 0}, {-0.2, 0}, {0, 0.2}, {0, -0.2}};
  const double widths[2] = {0.95, 0.5};
  std::vector<double> x0, w0, x1, w1;
  for (const double wf : widths) {
    for (const auto& off : offsets) {
      const Vec2 c = center + Vec2(off[0] * half[0], off[1] * half[1]);
      const Vec2 h(wf * half[0] - std::abs(off[0] * half[0]),
                   wf * half[1] - std::abs(off[1] * half[1]));
      gauss_panels(c[0] - h[0], c[0] + h[0], resolution[0], x0, w0);
      gauss_panels(c[1] - h[1], c[1] + h[1], resolution[1], x1, w1);
      std::vector<double> t_grad(x0.size() * x1.size()), t_rhs(t_grad.size()),
          t_nrm(t_grad.size());
      std::size_t k = 0;
      for (std::size_t i = 0; i < x0.size(); ++i)
        for (std::size_t j = 0; j < x1.size(); ++j, ++k) {
          const Vec2 s(x0[i], x1[j]);
          Jet2 jet = f.jet(dom.chart_point(s));
          if (dom.kind == ParamDomain::Kind::punctured_plane)
            jet = jet_compose(jet, dom.chart_map_jet(s));
          const FundForms F = fundamental_forms(jet);
          const Vec2 du = conformal_factor_gradient(jet);
          const double sx = (s[0] - c[0]) / h[0];
          const double sy = (s[1] - c[1]) / h[1];
          const double phi = bump(sx) * bump(sy);
          const Vec2 dphi(bump_d(sx) * bump(sy) / h[0], bump(sx) * bump_d(sy) / h[1]);
          const double w = w0[i] * w1[j];
          t_grad[k] = w * du.dot(dphi);
          t_rhs[k] = w * F.K * F.area_density() * phi;
          t_nrm[k] = w * phi * phi;
        }
      const double lhs = pairwise_sum(t_grad);
      const double rhs = pairwise_sum(t_rhs);
      const double nrm = std::sqrt(std::max(1e-300, pairwise_sum(t_nrm)));
      res.residual = std::max(res.residual, std::abs(lhs - rhs) / nrm);
      ++res.bumps_tested;
    }
  }
  return res;
}

}  // namespace wlab
