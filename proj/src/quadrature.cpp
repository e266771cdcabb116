#include "wlab/quadrature.hpp"

#include <cfloat>

namespace wlab {

namespace {

void simpson_rule(Interval iv, int n, std::vector<double>& x, std::vector<double>& w) {
  if (n % 2) ++n;  // composite Simpson needs an even interval count
  const double h = iv.length() / n;
  x.resize(n + 1);
  w.resize(n + 1);
  for (int i = 0; i <= n; ++i) {
    x[i] = iv.lo + i * h;
    const double c = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    w[i] = c * h / 3;
  }
}

void trapezoid_periodic_rule(Interval iv, int n, std::vector<double>& x, std::vector<double>& w) {
  const double h = iv.length() / n;
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    x[i] = iv.lo + i * h;
    w[i] = h;
  }
}

struct Trimmed {
  Interval axis[2];
  std::vector<const MarkedPoint*> node_exclusions;  // finite, off-center
};

Trimmed trimmed_axes(const Immersion& f) {
  Trimmed t;
  t.axis[0] = f.domain.axis[0];
  t.axis[1] = f.domain.axis[1];
  for (const auto& m : f.marked_points) {
    if (m.exclusion_radius <= 0) continue;
    const double rho = m.exclusion_radius;
    switch (m.where) {
      case MarkedPoint::Where::plane_infinity:
        t.axis[0].hi = std::min(t.axis[0].hi, -std::log(rho));
        break;
      case MarkedPoint::Where::axis0_plus_inf:
        t.axis[0].hi = std::min(t.axis[0].hi, -std::log(rho));
        break;
      case MarkedPoint::Where::axis0_minus_inf:
        t.axis[0].lo = std::max(t.axis[0].lo, std::log(rho));
        break;
      case MarkedPoint::Where::finite:
        if (f.domain.kind == ParamDomain::Kind::punctured_plane && m.location.norm() < 1e-14) {
          t.axis[0].lo = std::max(t.axis[0].lo, std::log(rho));
        } else {
          t.node_exclusions.push_back(&m);
        }
        break;
    }
  }
  if (!(t.axis[0].length() > 0) || !(t.axis[1].length() > 0))
    throw domain_error("exclusion neighborhoods swallow the whole domain");
  return t;
}

QuadratureGrid build_grid(const Immersion& f, std::array<int, 2> res, const Trimmed& t,
                          bool with_refinement) {
  const ParamDomain& dom = f.domain;
  QuadratureGrid g;
  g.domain = dom;
  g.resolution = res;

  for (int a = 0; a < 2; ++a) {
    auto& x = a == 0 ? g.s0 : g.s1;
    auto& w = a == 0 ? g.w0 : g.w1;
    if (dom.periodic[a])
      trapezoid_periodic_rule(t.axis[a], res[a], x, w);
    else
      simpson_rule(t.axis[a], res[a], x, w);
  }

  g.nodes.reserve(g.s0.size() * g.s1.size());
  g.samples.reserve(g.nodes.capacity());
  g.weights.reserve(g.nodes.capacity());
  for (std::size_t i = 0; i < g.s0.size(); ++i)
    for (std::size_t j = 0; j < g.s1.size(); ++j) {
      const Vec2 s(g.s0[i], g.s1[j]);
      const Vec2 p = dom.chart_point(s);
      bool excluded = false;
      for (const MarkedPoint* m : t.node_exclusions)
        if ((p - m->location).norm() < m->exclusion_radius) { excluded = true; break; }
      if (excluded) continue;
      g.samples.push_back(s);
      g.nodes.push_back(p);
      g.weights.push_back(g.w0[i] * g.w1[j] * dom.chart_jacobian(s));
    }

  g.tag = f.label + ":" + std::to_string(res[0]) + "x" + std::to_string(res[1]);
  if (with_refinement) {
    auto fine = std::make_shared<QuadratureGrid>(
        build_grid(f, {res[0] * 2, res[1] * 2}, t, false));
    g.half_step = fine;
  }
  return g;
}

}  // namespace

QuadratureGrid sample_grid(const Immersion& f, std::array<int, 2> resolution,
                           bool with_refinement) {
  if (resolution[0] < 8 || resolution[1] < 8)
    throw config_error("grid resolution below minimum (8 per axis)");
  return build_grid(f, resolution, trimmed_axes(f), with_refinement);
}

namespace {

struct PassResult {
  std::vector<double> sums;        // integral per density
  std::vector<double> abs_sums;    // sum of |terms| per density (roundoff floor)
  // edge line sums of |density * e^{2u}| per sampling length, per edge, per density
  std::vector<std::vector<double>> edge_lines;
};

PassResult run_pass(const Immersion& f,
                    const std::function<void(const FundForms&, std::span<double>)>& densities,
                    int count, const QuadratureGrid& g) {
  PassResult r;
  const std::size_t n = g.size();
  std::vector<std::vector<double>> terms(count, std::vector<double>(n)),
      abs_terms(count, std::vector<double>(n));
  r.edge_lines.assign(f.edge_decays.size(), std::vector<double>(count, 0.0));
  std::vector<double> d(count);

  const double s0_lo = g.s0.front(), s0_hi = g.s0.back();
  const double s1_lo = g.s1.front(), s1_hi = g.s1.back();
  const double w0_lo = g.w0.front(), w0_hi = g.w0.back();
  const double w1_lo = g.w1.front(), w1_hi = g.w1.back();

  for (std::size_t k = 0; k < n; ++k) {
    const FundForms F = fundamental_forms(f.jet(g.nodes[k]));
    densities(F, d);
    const double e2u = F.area_density();
    for (int c = 0; c < count; ++c) {
      if (!std::isfinite(d[c]))
        throw numerical_error("non-finite density at node (" + std::to_string(g.nodes[k][0]) +
                              ", " + std::to_string(g.nodes[k][1]) + ")");
      const double term = g.weights[k] * d[c] * e2u;
      terms[c][k] = term;
      abs_terms[c][k] = std::abs(term);
    }
    // collect |density e^{2u}| line integrals on the truncated edges
    for (std::size_t e = 0; e < f.edge_decays.size(); ++e) {
      const EdgeDecay& ed = f.edge_decays[e];
      const double s = g.samples[k][ed.axis];
      const double edge = ed.axis == 0 ? (ed.side ? s0_hi : s0_lo) : (ed.side ? s1_hi : s1_lo);
      if (std::abs(s - edge) > 1e-12 * (1 + std::abs(edge))) continue;
      const double w_perp = ed.axis == 0 ? (ed.side ? w0_hi : w0_lo) : (ed.side ? w1_hi : w1_lo);
      // weights[k] = w0 w1 jac; dividing by the perpendicular 1-D weight
      // leaves the tangential weight times the Jacobian, so this accumulates
      // the sampling-coordinate density |dens e^{2u} jac| along the edge.
      const double line_w = g.weights[k] / w_perp;
      for (int c = 0; c < count; ++c) r.edge_lines[e][c] += line_w * std::abs(d[c] * e2u);
    }
  }
  r.sums.resize(count);
  r.abs_sums.resize(count);
  for (int c = 0; c < count; ++c) {
    r.sums[c] = pairwise_sum(terms[c]);
    r.abs_sums[c] = pairwise_sum(abs_terms[c]);
  }
  return r;
}

}  // namespace

std::vector<IntegralValue> integrate_many(
    const Immersion& f,
    const std::function<void(const FundForms&, std::span<double>)>& densities, int count,
    const QuadratureGrid& grid) {
  const PassResult coarse = run_pass(f, densities, count, grid);
  const QuadratureGrid* fine_grid = grid.half_step.get();
  const PassResult fine = fine_grid ? run_pass(f, densities, count, *fine_grid) : coarse;

  constexpr double tail_safety = 2.0;
  std::vector<IntegralValue> out(count);
  for (int c = 0; c < count; ++c) {
    out[c].value = fine.sums[c];
    const double floor = 8 * DBL_EPSILON * fine.abs_sums[c];
    out[c].error = (fine_grid ? std::abs(fine.sums[c] - coarse.sums[c]) : 0.0) + floor;
    double tail = 0;
    for (std::size_t e = 0; e < f.edge_decays.size(); ++e)
      tail += tail_safety * coarse.edge_lines[e][c] / f.edge_decays[e].rate;
    out[c].tail = tail;
  }
  return out;
}

IntegralValue integrate(const Immersion& f, const std::function<double(const FundForms&)>& density,
                        const QuadratureGrid& grid) {
  auto many = integrate_many(
      f, [&](const FundForms& F, std::span<double> d) { d[0] = density(F); }, 1, grid);
  return many[0];
}

}  // namespace wlab
