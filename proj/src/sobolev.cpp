#include "wlab/sobolev.hpp"

namespace wlab {

namespace {

double order0(const Jet2& j) { return j.position.squaredNorm(); }
double order1(const Jet2& j) { return j.d1[0].squaredNorm() + j.d1[1].squaredNorm(); }
double order2(const Jet2& j) {
  return j.d2[0].squaredNorm() + 2 * j.d2[1].squaredNorm() + j.d2[2].squaredNorm();
}

double inv_weight(const Jet2& j, const Vec2& node) {
  const double g11 = j.d1[0].squaredNorm();
  const double g22 = j.d1[1].squaredNorm();
  const double g12 = j.d1[0].dot(j.d1[1]);
  const double det = g11 * g22 - g12 * g12;
  if (!(det > 0) || !std::isfinite(det))
    throw numerical_error("weight underflow/degeneracy at node (" + std::to_string(node[0]) +
                          ", " + std::to_string(node[1]) + ")");
  return 1.0 / std::sqrt(det);  // e^{-2u}
}

WeightedDistance accumulate(const QuadratureGrid& grid,
                            const std::function<Jet2(const Vec2&)>& jets,
                            const std::function<double(const Vec2&, const Jet2&)>& weight,
                            const std::string& wsrc) {
  const std::size_t n = grid.size();
  std::vector<double> t0(n), t1(n), t2(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Jet2 j = jets(grid.nodes[k]);
    const double w = grid.weights[k] * weight(grid.nodes[k], j);
    if (!std::isfinite(w)) throw numerical_error("non-finite weight in Sobolev integral");
    t0[k] = w * order0(j);
    t1[k] = w * order1(j);
    t2[k] = w * order2(j);
  }
  WeightedDistance d;
  d.comp[0] = pairwise_sum(t0);
  d.comp[1] = pairwise_sum(t1);
  d.comp[2] = pairwise_sum(t2);
  d.value = std::sqrt(std::max(0.0, d.comp[0] + d.comp[1] + d.comp[2]));
  d.weight_source = wsrc;
  d.grid_tag = grid.tag;
  return d;
}

Jet2 jet_difference(const Jet2& a, const Jet2& b) {
  Jet2 d;
  d.position = a.position - b.position;
  d.d1[0] = a.d1[0] - b.d1[0];
  d.d1[1] = a.d1[1] - b.d1[1];
  for (int k = 0; k < 3; ++k) d.d2[k] = a.d2[k] - b.d2[k];
  return d;
}

}  // namespace

WeightedDistance weighted_norm(const Immersion& f, const QuadratureGrid& grid) {
  return accumulate(
      grid, [&](const Vec2& p) { return f.jet(p); },
      [&](const Vec2& p, const Jet2& j) { (void)p; return inv_weight(j, p); }, f.label);
}

WeightedDistance weighted_distance(const Immersion& f, const Immersion& f0,
                                   const QuadratureGrid& grid) {
  return weighted_distance_with_weight(f, f0, f, grid);
}

WeightedDistance weighted_distance_with_weight(const Immersion& f, const Immersion& f0,
                                               const Immersion& wsrc,
                                               const QuadratureGrid& grid) {
  if (!f.domain.same_as(f0.domain))
    throw domain_error("weighted distance: parameter domains differ (" + f.label + " vs " +
                       f0.label + ")");
  return accumulate(
      grid,
      [&](const Vec2& p) { return jet_difference(f.jet(p), f0.jet(p)); },
      [&](const Vec2& p, const Jet2&) { return inv_weight(wsrc.jet(p), p); }, wsrc.label);
}

ComparabilityRecord inversion_comparability(const Immersion& f, const Immersion& f0,
                                            const Vec& x0, const QuadratureGrid& grid,
                                            double band) {
  ComparabilityRecord rec;
  rec.band = band;

  double fmin = std::numeric_limits<double>::infinity(), fmax = 0;
  for (const Vec2& node : grid.nodes) {
    fmin = std::min(fmin, (f.jet(node).position - x0).norm());
    fmax = std::max(fmax, (f.jet(node).position - x0).norm());
    fmin = std::min(fmin, (f0.jet(node).position - x0).norm());
    fmax = std::max(fmax, (f0.jet(node).position - x0).norm());
  }
  rec.g_min = fmin;
  rec.g_max = fmax;
  if (fmin < 1.0)
    throw domain_error("inversion_comparability: image intersects B_1(x0) (min distance " +
                       std::to_string(fmin) + ")");

  const WeightedDistance d0 = weighted_distance(f, f0, grid);
  rec.dist_original = d0.value;

  const MoebiusTransform I = MoebiusTransform::inversion(x0);
  Immersion g = pushforward(f, I, false);
  Immersion g0 = pushforward(f0, I, false);

  // Normalize the inverted configuration to unit area (common dilation; the
  // ratio is invariant under it, the reported scale is part of the record).
  std::vector<double> at(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Jet2 j = g.jet(grid.nodes[k]);
    const double g11 = j.d1[0].squaredNorm(), g22 = j.d1[1].squaredNorm(),
                 g12 = j.d1[0].dot(j.d1[1]);
    at[k] = grid.weights[k] * std::sqrt(std::max(0.0, g11 * g22 - g12 * g12));
  }
  const double area = pairwise_sum(at);
  const double s = area > 0 ? 1.0 / std::sqrt(area) : 1.0;
  rec.area_normalization = s;
  const MoebiusTransform D = MoebiusTransform::dilation(f.ambient_dim(), s);
  g = pushforward(g, D, false);
  g0 = pushforward(g0, D, false);

  double imin = std::numeric_limits<double>::infinity(), imax = 0;
  for (const Vec2& node : grid.nodes) {
    const double r = (g.jet(node).position / s - x0).norm();  // pre-normalization range
    imin = std::min(imin, r);
    imax = std::max(imax, r);
  }
  rec.inv_g_min = imin;
  rec.inv_g_max = imax;

  const WeightedDistance d1 = weighted_distance(g, g0, grid);
  rec.dist_inverted = d1.value;
  rec.ratio = d0.value > 0 ? d1.value / d0.value : 1.0;  // f = f0: ratio 1 by convention
  rec.within_band = rec.ratio >= 1.0 / band && rec.ratio <= band;
  return rec;
}

}  // namespace wlab
