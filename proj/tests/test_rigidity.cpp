#include <doctest.h>

#include "wlab/neldermead.hpp"
#include "wlab/rigidity.hpp"
#include "wlab/serialize.hpp"

using namespace wlab;

TEST_CASE("Nelder-Mead finds quadratic and Rosenbrock minima") {
  auto quad = [](const Eigen::VectorXd& x) {
    return (x[0] - 1.5) * (x[0] - 1.5) + 3 * (x[1] + 0.5) * (x[1] + 0.5);
  };
  NelderMeadOptions o;
  o.max_iterations = 300;
  o.restarts = 2;
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(2), step = Eigen::VectorXd::Constant(2, 0.5);
  const NelderMeadResult r = nelder_mead(quad, x0, step, o);
  CHECK(r.converged);
  CHECK(r.x[0] == doctest::Approx(1.5).epsilon(1e-4));
  CHECK(r.x[1] == doctest::Approx(-0.5).epsilon(1e-4));

  auto rosen = [](const Eigen::VectorXd& x) {
    return 100 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1 - x[0], 2);
  };
  NelderMeadOptions o2;
  o2.max_iterations = 2000;
  o2.restarts = 3;
  const NelderMeadResult r2 = nelder_mead(rosen, x0, step, o2);
  CHECK(r2.value < 1e-8);
}

TEST_CASE("reparameterizations") {
  const double xi[6] = {0.1, -0.2, 0.3, 0.05, -0.15, 0.2};
  const Reparameterization phi = Reparameterization::moebius_exponential(xi);
  CHECK(phi.det_residual() < 1e-12);

  // chart jet vs finite differences of the map
  const Vec2 p(0.4, -0.7);
  const ChartJet j = phi.jet(p);
  const double h = 1e-5;
  for (int axis = 0; axis < 2; ++axis) {
    Vec2 dp = Vec2::Zero();
    dp[axis] = h;
    const Vec2 fd = (phi(p + dp) - phi(p - dp)) / (2 * h);
    CHECK((fd - j.d1.col(axis)).norm() < 1e-8);
  }

  const Reparameterization aff = Reparameterization::affine(0.3, 0.9, Cplx(0.2, -0.1));
  CHECK(aff.det_residual() < 1e-12);
  CHECK(std::abs(aff.c) == doctest::Approx(0.0));  // fixes infinity

  const Reparameterization sh = Reparameterization::shift(1.2, 0.5);
  CHECK((sh(Vec2(0, 0)) - Vec2(1.2, 0.5)).norm() == doctest::Approx(0.0));
}

TEST_CASE("nearest round sphere: exact and transformed models") {
  OptimizerConfig cfg;
  cfg.grid = {64, 64};
  cfg.max_iterations = 200;
  cfg.restarts = 2;

  const Immersion sphere = make_catalog_surface("sphere", {{"r", 1.0}});
  const AlignmentResult r0 = nearest_round_sphere(sphere, cfg);
  CHECK(r0.distance.value <= 1e-8);
  CHECK(std::abs(r0.delta) <= 1e-6);

  Vec t(3);
  t << 2.0, -1.0, 0.5;
  const Immersion moved =
      pushforward(sphere, MoebiusTransform::similarity(Mat::Identity(3, 3), 1.7, t));
  const AlignmentResult r1 = nearest_round_sphere(moved, cfg);
  CHECK(r1.distance.value <= 1e-6);
  CHECK(r1.transform.scale == doctest::Approx(1.7).epsilon(1e-6));

  const Immersion p = make_catalog_surface("perturbed_sphere", {{"eps", 0.05}, {"l", 2}, {"m", 0}});
  const AlignmentResult r2 = nearest_round_sphere(p, cfg);
  CHECK(r2.distance.value > 0.01);
  CHECK(r2.delta > 0);
  const double C = r2.distance.value / std::sqrt(r2.delta);
  CHECK(C > 0.5);
  CHECK(C < 50.0);

  const Immersion cat = make_catalog_surface("catenoid");
  CHECK_THROWS_AS((void)nearest_round_sphere(cat, cfg), Error);  // not sphere-type
}

TEST_CASE("align_to_model: gauge absorption and signature checks") {
  OptimizerConfig cfg;
  cfg.grid = {64, 64};
  cfg.max_iterations = 1200;
  cfg.restarts = 4;
  cfg.seed = 91;

  const Immersion icat = make_catalog_surface("inverted_catenoid", {{"V", 12.0}});
  const AlignmentResult base = align_to_model(icat, ModelFamily::inverted_catenoid, cfg);
  CHECK(base.distance.value <= 1e-5);

  // push by a random-ish similarity and reparameterize: the group absorbs it
  std::vector<double> rp = {0.25, -0.15, 0.2};
  Vec t(3);
  t << 0.4, -0.3, 0.8;
  Immersion moved =
      pushforward(icat, MoebiusTransform::similarity(rotation_from_params(3, rp), 1.35, t));
  moved = reparameterize(moved, Reparameterization::shift(0.4, 1.1));
  const AlignmentResult aligned = align_to_model(moved, ModelFamily::inverted_catenoid, cfg);
  CHECK(aligned.converged);
  CHECK(std::abs(aligned.distance.value - base.distance.value) <= 1e-5);

  // signature mismatches are rejected
  CHECK_THROWS_AS((void)align_to_model(icat, ModelFamily::inverted_enneper, cfg), Error);
  const Immersion ienn = make_catalog_surface("inverted_enneper", {{"R", 1000.0}});
  CHECK_THROWS_AS((void)align_to_model(ienn, ModelFamily::inverted_chen, cfg), Error);
}

TEST_CASE("self-alignment floor for the branched model families") {
  OptimizerConfig cfg;
  cfg.grid = {48, 48};
  cfg.max_iterations = 400;
  cfg.restarts = 2;
  cfg.seed = 13;

  const Immersion ienn = make_catalog_surface("inverted_enneper", {{"R", 1000.0}});
  const AlignmentResult ae = align_to_model(ienn, ModelFamily::inverted_enneper, cfg);
  CHECK(ae.distance.value <= 10 * cfg.tolerance);
  CHECK(ae.converged);
  CHECK(std::abs(ae.delta) <= 0.01 * ae.base_level);

  const Immersion ichen =
      make_catalog_surface("inverted_chen_graph", {{"c", 1.0}, {"R", 1000.0}});
  const AlignmentResult ac = align_to_model(ichen, ModelFamily::inverted_chen, cfg);
  CHECK(ac.distance.value <= 10 * cfg.tolerance);
  CHECK(ac.converged);
  CHECK(std::abs(ac.delta) <= 0.01 * ac.base_level);
}

TEST_CASE("alignment is deterministic for a fixed seed") {
  OptimizerConfig cfg;
  cfg.grid = {48, 48};
  cfg.max_iterations = 150;
  cfg.restarts = 2;
  cfg.seed = 777;
  const Immersion p = make_catalog_surface("perturbed_sphere", {{"eps", 0.08}, {"l", 2}, {"m", 0}});
  const AlignmentResult a = nearest_round_sphere(p, cfg);
  const AlignmentResult b = nearest_round_sphere(p, cfg);
  CHECK(a.distance.value == b.distance.value);
  CHECK(a.delta == b.delta);
  CHECK(to_json(a).dump() == to_json(b).dump());
}

TEST_CASE("perturbation sweep: structure and parallel determinism") {
  OptimizerConfig cfg;
  cfg.grid = {48, 48};
  cfg.max_iterations = 500;
  cfg.restarts = 2;
  cfg.seed = 99;
  const std::vector<double> eps = {0.05, 0.1, 0.2};
  const SweepResult serial = perturbation_sweep("round_sphere", eps, cfg, 1);
  REQUIRE(serial.rows.size() == 3);
  for (const auto& row : serial.rows) CHECK(row.converged);
  CHECK(serial.spearman == 1.0);
  CHECK(serial.rows[0].normalized_distance ==
        doctest::Approx(serial.rows[0].distance / std::sqrt(serial.rows[0].area)));

  const SweepResult parallel = perturbation_sweep("round_sphere", eps, cfg, 3);
  CHECK(sweep_csv(serial) == sweep_csv(parallel));

  CHECK_THROWS_AS((void)perturbation_sweep("unknown_family", eps, cfg), Error);
  const std::vector<double> bad = {0.5};
  CHECK_THROWS_AS((void)perturbation_sweep("round_sphere", bad, cfg), Error);
}

TEST_CASE("spearman rank correlation") {
  const std::vector<double> x = {0.1, 0.2, 0.3, 0.4};
  const std::vector<double> up = {1, 2, 5, 9};
  const std::vector<double> down = {4, 3, 2, 1};
  const std::vector<double> mixed = {1, 3, 2, 4};
  CHECK(spearman_rank_correlation(x, up) == 1.0);
  CHECK(spearman_rank_correlation(x, down) == -1.0);
  CHECK(spearman_rank_correlation(x, mixed) < 1.0);
}
