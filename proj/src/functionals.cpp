#include "wlab/functionals.hpp"

namespace wlab {

EnergyReport energy_report(const Immersion& f, const QuadratureGrid& grid) {
  EnergyReport r;
  r.resolution = grid.resolution;
  r.surface = f.label;

  auto densities = [](const FundForms& F, std::span<double> d) {
    d[0] = 1.0;                  // area
    d[1] = 0.25 * F.norm2_H;     // Willmore
    d[2] = F.norm2_A;            // |A|^2
    d[3] = F.K;                  // Gauss
    d[4] = F.norm2_A0;           // |Å|^2
  };
  const auto v = integrate_many(f, densities, 5, grid);

  r.area = v[0].value;
  r.willmore = v[1].value;
  r.total_sff = v[2].value;
  r.total_gauss = v[3].value;
  r.total_traceless = v[4].value;
  r.err_area = v[0].error;
  r.err_willmore = v[1].error;
  r.err_sff = v[2].error;
  r.err_gauss = v[3].error;
  r.err_traceless = v[4].error;

  // Truncation tails: the edge certificates apply to the curvature-type
  // densities; the area tail across a complete end is unbounded.
  bool area_bounded = true;
  for (const auto& e : f.edge_decays) area_bounded = area_bounded && e.area_decays;
  r.tail_area = area_bounded ? v[0].tail : std::numeric_limits<double>::infinity();
  r.tail_willmore = v[1].tail;
  r.tail_sff = v[2].tail;
  r.tail_gauss = v[3].tail;
  r.tail_traceless = v[4].tail;

  // Pointwise Gauss-equation consequences, integrated:
  //   W = sff/4 + gauss/2   and   traceless = sff - 2 W.
  r.identity_willmore_residual = r.willmore - (0.25 * r.total_sff + 0.5 * r.total_gauss);
  r.identity_traceless_residual = r.total_traceless - (r.total_sff - 2 * r.willmore);
  const double tol_w = r.err_willmore + 0.25 * r.err_sff + 0.5 * (r.err_gauss + r.tail_gauss) +
                       0.25 * r.tail_sff + r.tail_willmore + 1e-9 * (1 + std::abs(r.willmore));
  const double tol_t = r.err_traceless + r.err_sff + 2 * r.err_willmore + r.tail_traceless +
                       r.tail_sff + 2 * r.tail_willmore + 1e-9 * (1 + std::abs(r.total_sff));
  r.identities_ok = std::abs(r.identity_willmore_residual) <= tol_w &&
                    std::abs(r.identity_traceless_residual) <= tol_t;
  return r;
}

GaussBonnetRecord gauss_bonnet_ledger(const Immersion& f, const EnergyReport& report) {
  GaussBonnetRecord g;
  g.chi_compact = f.euler_char;
  g.n_ends = f.end_count();
  g.chi_open = g.chi_compact - g.n_ends;  // punctured-surface convention
  g.end_multiplicity_sum = f.end_multiplicity_sum();
  g.branch_order_sum = f.branch_order_sum();
  g.predicted = 2 * pi * (g.chi_open - g.end_multiplicity_sum + g.branch_order_sum);
  g.measured = report.total_gauss;
  g.combined_tolerance = report.combined_err_gauss() + 1e-9 * (1 + std::abs(g.predicted));
  g.consistent = std::abs(g.predicted - g.measured) <= g.combined_tolerance;

  // White quantization: 2 pi Z in general; the complete codimension-one cases
  // land on the 4 pi lattice.
  const bool complete_codim1 = f.ambient_dim() == 3 && g.n_ends > 0;
  g.white_unit = complete_codim1 ? 4 * pi : 2 * pi;
  g.white_multiple = std::lround(g.measured / g.white_unit);
  g.white_ok = std::abs(g.measured - double(g.white_multiple) * g.white_unit) <=
               g.combined_tolerance;
  return g;
}

GaussBonnetRecord gauss_bonnet_ledger(const Immersion& f, const QuadratureGrid& grid) {
  return gauss_bonnet_ledger(f, energy_report(f, grid));
}

}  // namespace wlab
