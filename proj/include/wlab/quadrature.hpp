#pragma once

#include <array>
#include <functional>
#include <memory>

#include "wlab/diffgeo.hpp"
#include "wlab/immersion.hpp"

namespace wlab {

/// Tensor-product quadrature grid over a domain's sampling box: composite
/// Simpson on non-periodic axes, trapezoid on periodic axes. Nodes live in
/// chart coordinates; weights carry the chart measure (log-polar Jacobian
/// folded in for punctured planes). A half-step refinement grid backs
/// Richardson error estimates.
struct QuadratureGrid {
  std::array<int, 2> resolution{0, 0};
  std::vector<double> s0, s1;   // sampling nodes per axis
  std::vector<double> w0, w1;   // 1-D weights per axis
  std::vector<Vec2> nodes;      // chart points, row-major over (s0, s1)
  std::vector<Vec2> samples;    // sampling coordinates of the same nodes
  std::vector<double> weights;  // chart measure
  std::shared_ptr<const QuadratureGrid> half_step;
  ParamDomain domain;
  std::string tag;

  std::size_t size() const { return nodes.size(); }
  double weight_sum() const { return pairwise_sum(weights); }
};

/// Build a grid for the immersion's own domain, honoring marked-point
/// exclusion neighborhoods. Minimum resolution is 8 per axis.
QuadratureGrid sample_grid(const Immersion& f, std::array<int, 2> resolution,
                           bool with_refinement = true);

struct IntegralValue {
  double value = 0;
  double error = 0;  // Richardson estimate from the half-step grid
  double tail = 0;   // certified truncation bound beyond the sampling box
};

/// Quadrature of density(FundForms) against the area measure e^{2u} dx.
/// The error estimate comes from the refinement handle; the tail from the
/// per-surface edge decay certificates applied to the integrand's own edge
/// values. Throws on non-finite densities.
IntegralValue integrate(const Immersion& f,
                        const std::function<double(const FundForms&)>& density,
                        const QuadratureGrid& grid);

/// Fused multi-density pass (used by energy reports): one FundForms
/// evaluation per node for all densities.
std::vector<IntegralValue> integrate_many(
    const Immersion& f,
    const std::function<void(const FundForms&, std::span<double>)>& densities,
    int count, const QuadratureGrid& grid);

}  // namespace wlab
