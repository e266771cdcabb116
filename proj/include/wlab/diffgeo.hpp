#pragma once

#include <span>
#include <vector>

#include "wlab/immersion.hpp"

namespace wlab {

/// First and second fundamental forms at a point, in arbitrary codimension.
/// A is the normal-valued second fundamental form in flat chart components;
/// metric norms |A|^2, |Å|^2 are taken with the inverse metric on both index
/// pairs. The conformal factor is defined through e^{2u} = sqrt(det g), which
/// coincides with the usual u on conformal charts and still measures area off
/// them.
struct FundForms {
  Mat2 g;
  double det_g = 0;
  double u = 0;                 // 0.25 * log det g
  Vec A[3];                     // normal projections of d2f: 11, 12, 22
  Vec H;                        // g^{ij} A_ij
  Vec A0[3];                    // traceless part A - (1/2) g H
  double K = 0;                 // (<A11,A22> - |A12|^2) / det g
  double norm2_A = 0;           // |A|^2 (metric)
  double norm2_A0 = 0;          // |Å|^2 (metric)
  double norm2_H = 0;           // |H|^2
  double gauss_residual = 0;    // |K - (|H|^2 - |A|^2)/2|
  double conf_defect = 0;       // (|g11-g22| + 2|g12|) / (g11+g22)
  double tangential_residual = 0;  // max_i |tangential part of A_i| / |A_i|

  double area_density() const { return std::sqrt(det_g); }  // e^{2u}
};

/// Requires d1 linearly independent: min singular value > 1e-12 * max,
/// otherwise throws (proximity to a branch point).
FundForms fundamental_forms(const Jet2& j);

/// Chart gradient of u = 0.25 log det g, analytic from the 2-jet.
Vec2 conformal_factor_gradient(const Jet2& j);

/// u at a chart point (no full form assembly).
double conformal_factor(const Jet2& j);

struct BranchOrderFit {
  int order = 0;            // nearest integer to the fitted slope
  double slope = 0;         // fitted slope of circle means of u vs log r
  double slope_residual = 0;  // |slope - order|
  double fit_rms = 0;       // rms deviation of the data from the fitted line
  std::vector<double> radii;
};

/// Fit the branch order m from u(z) = m log|z| + omega(z) around a marked
/// point, using circle means in the point's compact local chart.
/// radii: >= 4 values spanning >= 2 decades, decreasing. Throws if the fitted
/// slope is farther than 0.1 from an integer.
BranchOrderFit branch_order_estimate(const Immersion& f, const MarkedPoint& p,
                                     std::span<const double> radii,
                                     int angular_samples = 64);

/// Chart-adapted default radii (cylinder-end charts see exponentially small
/// corrections only for smaller radii).
std::vector<double> default_branch_radii(const MarkedPoint& p);

struct LiouvilleResult {
  double residual = 0;       // max over the bump family of |weak-form defect| / ||phi||_L2
  int bumps_tested = 0;
};

/// Spot-check of the weak Liouville equation int <Du,Dphi> = int K e^{2u} phi
/// over a rectangle in sampling coordinates, against a family of smooth
/// compactly supported bumps.
LiouvilleResult liouville_residual(const Immersion& f, Interval region0, Interval region1,
                                   std::array<int, 2> resolution);

}  // namespace wlab
