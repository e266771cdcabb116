#pragma once

#include "wlab/moebius.hpp"
#include "wlab/quadrature.hpp"

namespace wlab {

/// Weighted W^{2,2}_u norm/distance over a grid: the three integrals
/// int |.|^2 e^{-2u} dx at orders 0, 1, 2, with the weight u supplied by a
/// designated immersion (always the first argument unless stated). Values
/// are grid-tagged: the norm is chart-local, so the sampling region is part
/// of its definition.
struct WeightedDistance {
  double value = 0;        // sqrt(comp[0] + comp[1] + comp[2])
  double comp[3] = {0, 0, 0};
  std::string weight_source;
  std::string grid_tag;
};

WeightedDistance weighted_norm(const Immersion& f, const QuadratureGrid& grid);

/// Distance with weight from f. Zero iff the jets agree on the grid.
WeightedDistance weighted_distance(const Immersion& f, const Immersion& f0,
                                   const QuadratureGrid& grid);

/// Distance with the weight taken from an explicit third immersion; with a
/// fixed weight source the distance is a true metric on the grid.
WeightedDistance weighted_distance_with_weight(const Immersion& f, const Immersion& f0,
                                               const Immersion& weight_source,
                                               const QuadratureGrid& grid);

struct ComparabilityRecord {
  double ratio = 1;         // distance(I f, I f0) / distance(f, f0)
  double dist_original = 0;
  double dist_inverted = 0;
  double g_min = 0, g_max = 0;        // range of |f - x0| over the grid
  double inv_g_min = 0, inv_g_max = 0;  // range of |I f - x0|
  double area_normalization = 1;      // dilation bringing the inverted area to 1
  bool within_band = false;
  double band = 0;
};

/// The comparability step behind the rigidity proofs: after checking both
/// images avoid B_1(x0) and normalizing the inverted area to 1, report the
/// ratio of weighted distances before and after inversion and assert it lies
/// in [1/band, band]. f = f0 returns ratio 1 by convention.
ComparabilityRecord inversion_comparability(const Immersion& f, const Immersion& f0,
                                            const Vec& x0, const QuadratureGrid& grid,
                                            double band = 1e3);

}  // namespace wlab
