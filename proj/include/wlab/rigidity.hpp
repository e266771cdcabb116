#pragma once

#include "wlab/catalog.hpp"
#include "wlab/sobolev.hpp"

namespace wlab {

/// Reparameterizations of the model charts: the Moebius group of the
/// stereographic plane for sphere-type domains ((a,b,c,d), ad - bc = 1;
/// affine members fix the point at infinity and preserve end/branch
/// markings there), and shifts of the cylinder chart.
struct Reparameterization {
  enum class Kind { sphere_moebius, cylinder_shift };
  Kind kind = Kind::sphere_moebius;
  Cplx a{1, 0}, b{0, 0}, c{0, 0}, d{1, 0};
  double v0 = 0, theta0 = 0;

  static Reparameterization identity(Kind k);
  /// exp of an sl(2,C) element; the identity at xi = 0. Smooth 6-parameter
  /// chart of PSL(2,C) around the identity.
  static Reparameterization moebius_exponential(std::span<const double> xi6);
  /// z -> e^{s + i alpha} z + b: the stabilizer of infinity (4 parameters).
  static Reparameterization affine(double log_scale, double angle, Cplx offset);
  static Reparameterization shift(double v0, double theta0);

  Vec2 operator()(const Vec2& p) const;
  ChartJet jet(const Vec2& p) const;
  double det_residual() const;  // |ad - bc - 1|
};

Immersion reparameterize(const Immersion& f, const Reparameterization& phi);

struct OptimizerConfig {
  int max_iterations = 400;
  double tolerance = 1e-7;   // convergence tolerance on the distance
  int restarts = 5;
  std::uint64_t seed = 20240501;
  bool search_inversion = false;  // extend the similarity search by an inversion leg
  std::array<int, 2> grid{128, 128};
};

struct AlignmentResult {
  MoebiusTransform transform;
  Reparameterization reparam;
  WeightedDistance distance;
  double delta = 0;        // total_sff minus the family's base energy level
  double base_level = 0;   // 8pi / 24pi / 32pi / 20pi
  double area = 0;         // full-domain area (for the sqrt(area)-normalized column)
  std::string model;
  double model_param = 1;  // internal family parameter (absorbed exactly by
                           // the group for all catalog families; kept for the record)
  int iterations = 0;
  bool converged = false;
};

/// Round-sphere rigidity experiment: fit center/radius in closed form, minimize the
/// weighted distance over the sphere-Moebius reparameterization group by
/// derivative-free descent. Distances are taken over the core chart region
/// (the grid's tag records it).
AlignmentResult nearest_round_sphere(const Immersion& f, const OptimizerConfig& cfg = {});

enum class ModelFamily { inverted_catenoid, inverted_enneper, inverted_chen };

/// Branched-model rigidity experiments: verify the marked-point signature,
/// then minimize distance(sigma . f . phi, model) over similarities and the
/// signature-preserving reparameterization subgroup (an optional inversion
/// leg extends sigma to the full group behind cfg.search_inversion).
AlignmentResult align_to_model(const Immersion& f, ModelFamily family,
                               const OptimizerConfig& cfg = {});

struct SweepRow {
  double epsilon = 0;
  double delta = 0;
  double distance = 0;
  double area = 0;
  double normalized_distance = 0;  // distance / sqrt(area)
  bool converged = false;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  double exponent = 0;      // least-squares slope of log distance vs log delta
  double fit_residual = 0;  // rms residual of that fit
  int rows_used = 0;        // converged rows with delta above noise
  double spearman = 0;      // rank correlation of (delta, distance)
  std::string family;
};

/// family: "round_sphere" (perturbed spheres vs the 8 pi level) or
/// "inverted_catenoid" (inversions of normally perturbed catenoids vs 24 pi).
SweepResult perturbation_sweep(const std::string& family, std::span<const double> epsilons,
                               const OptimizerConfig& cfg = {}, int workers = 1);

/// Core-region grid used for weighted distances (|log r| <= 3 on plane
/// charts, |v| <= 6 on cylinders).
QuadratureGrid alignment_grid(const Immersion& f, std::array<int, 2> resolution);

double spearman_rank_correlation(std::span<const double> x, std::span<const double> y);

}  // namespace wlab
