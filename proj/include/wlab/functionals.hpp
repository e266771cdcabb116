#pragma once

#include "wlab/quadrature.hpp"

namespace wlab {

/// The five surface integrals with Richardson error estimates and certified
/// truncation tails. Internal identities (the pointwise Gauss-equation
/// consequences W = sff/4 + gauss/2 and traceless = sff - 2W) are evaluated
/// and embedded.
struct EnergyReport {
  double area = 0, willmore = 0, total_sff = 0, total_gauss = 0, total_traceless = 0;
  double err_area = 0, err_willmore = 0, err_sff = 0, err_gauss = 0, err_traceless = 0;
  double tail_area = 0, tail_willmore = 0, tail_sff = 0, tail_gauss = 0, tail_traceless = 0;
  double identity_willmore_residual = 0;   // willmore - (sff/4 + gauss/2)
  double identity_traceless_residual = 0;  // traceless - (sff - 2*willmore)
  bool identities_ok = false;
  std::array<int, 2> resolution{0, 0};
  std::string surface;

  double combined_err_gauss() const { return err_gauss + tail_gauss; }
  double combined_err_sff() const { return err_sff + tail_sff; }
  double combined_err_willmore() const { return err_willmore + tail_willmore; }
};

EnergyReport energy_report(const Immersion& f, const QuadratureGrid& grid);

/// Marked-point Gauss-Bonnet ledger: predicted total curvature
/// 2 pi (chi_open - sum(k_i + 1) + sum m(p)) against quadrature, where
/// chi_open is the Euler characteristic of the punctured surface
/// (chi_compact minus the number of ends). Includes the White quantization
/// check: the value must sit within tolerance of the appropriate 2 pi
/// (or, for complete codimension-one surfaces, 4 pi) lattice.
struct GaussBonnetRecord {
  int chi_compact = 0;
  int n_ends = 0;
  int chi_open = 0;
  int end_multiplicity_sum = 0;  // sum (k_i + 1)
  int branch_order_sum = 0;      // sum m(p)
  double predicted = 0;
  double measured = 0;
  double combined_tolerance = 0;
  bool consistent = false;
  double white_unit = 0;         // 2 pi or 4 pi
  long white_multiple = 0;
  bool white_ok = false;
};

GaussBonnetRecord gauss_bonnet_ledger(const Immersion& f, const QuadratureGrid& grid);
GaussBonnetRecord gauss_bonnet_ledger(const Immersion& f, const EnergyReport& report);

}  // namespace wlab
