#pragma once

#include <optional>

#include "wlab/functionals.hpp"
#include "wlab/immersion.hpp"

namespace wlab {

/// Element of the conformal group of R^n in the canonical factorization
/// T(y) = translation + scale * rotation * I_{x0}(y), inversion applied
/// first. "rotation" is orthogonal (composition of two inversions closes the
/// group only with reflections admitted). Composition and inverse stay in
/// this factorization in closed form.
class MoebiusTransform {
 public:
  int dim = 3;
  Mat rotation;              // n x n orthogonal
  double scale = 1.0;
  Vec translation;
  std::optional<Vec> inversion_center;

  static MoebiusTransform identity(int n);
  static MoebiusTransform similarity(const Mat& R, double scale, const Vec& t);
  static MoebiusTransform dilation(int n, double s);
  static MoebiusTransform translation_by(const Vec& t);
  static MoebiusTransform rotation_by(const Mat& R);
  static MoebiusTransform inversion(const Vec& center);

  bool has_inversion() const { return inversion_center.has_value(); }

  /// Throws on the pole y = x0.
  Vec apply(const Vec& y) const;
  /// Exact chain rule through the transform (first and second derivatives of
  /// the inversion are analytic).
  Jet2 push_jet(const Jet2& j) const;

  MoebiusTransform compose(const MoebiusTransform& other) const;  // this after other
  MoebiusTransform inverse() const;

  double orthogonality_defect() const;  // ||R^T R - I||_inf
};

/// Push an immersion forward. Marked-point metadata is rewritten: with an
/// inversion present, each end of multiplicity k+1 becomes a finite point
/// (branch of order k, or a multiplicity preimage when k = 0). The center
/// must avoid the image on the retained domain; the check samples the image
/// unless the caller asserts safety.
Immersion pushforward(const Immersion& f, const MoebiusTransform& T, bool check_center = true);

struct SafeCenter {
  Vec center;
  double applied_dilation = 1.0;  // dilation applied to f before the search
  double min_distance = 0;        // to the sampled (dilated) image
};

/// Deterministic safe inversion center: normalize the image to bounding-box
/// diagonal 4 by a dilation (reported), then scan a fixed direction/radius
/// lattice in the complement and return the candidate farthest from the
/// sampled image (always >= 1).
SafeCenter safe_inversion_center(const Immersion& f, const QuadratureGrid& grid);

/// Seeded variant used for "random safe center" experiments.
SafeCenter random_safe_center(const Immersion& f, const QuadratureGrid& grid, Rng& rng);

/// Inversion energy ledger: predictions for (gauss, willmore, sff) of
/// the pushforward from the base energies and the marked-point bracket
/// sum(k_i + 1) - sum_{p in f^-1(x0)} (m(p) + 1), compared against direct
/// quadrature on the pushforward.
struct InversionLedger {
  int bracket_ends = 0;
  int bracket_poles = 0;
  int bracket = 0;
  EnergyReport base;
  EnergyReport pushed;
  double pred_gauss = 0, pred_willmore = 0, pred_sff = 0;
  double tol_gauss = 0, tol_willmore = 0, tol_sff = 0;  // combined error estimates
  bool ok_gauss = false, ok_willmore = false, ok_sff = false;
  bool all_ok = false;
};

InversionLedger inversion_ledger(const Immersion& f, const Vec& x0, const QuadratureGrid& grid);

}  // namespace wlab
