#include <doctest.h>

#include "wlab/catalog.hpp"
#include "wlab/rigidity.hpp"
#include "wlab/sobolev.hpp"

using namespace wlab;

TEST_CASE("weighted norm: dilation invariance and radius independence") {
  const Immersion s1 = make_catalog_surface("sphere", {{"r", 1.0}});
  const QuadratureGrid grid = alignment_grid(s1, {128, 128});
  const WeightedDistance n1 = weighted_norm(s1, grid);
  CHECK(std::isfinite(n1.value));
  CHECK(n1.value > 0);
  CHECK(n1.value * n1.value ==
        doctest::Approx(n1.comp[0] + n1.comp[1] + n1.comp[2]).epsilon(1e-14));

  const Immersion dil = pushforward(s1, MoebiusTransform::dilation(3, 3.7));
  CHECK(std::abs(weighted_norm(dil, grid).value - n1.value) <= 1e-10 * n1.value);

  const Immersion s2 = make_catalog_surface("sphere", {{"r", 2.0}});
  CHECK(std::abs(weighted_norm(s2, grid).value - n1.value) <= 1e-10 * n1.value);
}

TEST_CASE("weighted norm is stable under grid doubling on the catenoid core") {
  const Immersion cat = make_catalog_surface("catenoid", {{"V", 5.0}});
  const double a = weighted_norm(cat, sample_grid(cat, {64, 64}, false)).value;
  const double b = weighted_norm(cat, sample_grid(cat, {128, 128}, false)).value;
  CHECK(std::abs(a - b) <= 1e-6 * b);
}

TEST_CASE("weighted distance: identity, similarity invariance, perturbation scale") {
  const Immersion s1 = make_catalog_surface("sphere", {{"r", 1.0}});
  const QuadratureGrid grid = alignment_grid(s1, {96, 96});

  CHECK(weighted_distance(s1, s1, grid).value == 0.0);

  // common rotation + dilation + translation leaves distances unchanged
  const Immersion p = make_catalog_surface("perturbed_sphere", {{"eps", 0.03}, {"l", 2}, {"m", 0}});
  const double d0 = weighted_distance(p, s1, grid).value;
  Rng rng(42);
  std::vector<double> rp = {0.3, -0.8, 0.5};
  Vec t(3);
  t << 1.0, -2.0, 0.4;
  const MoebiusTransform T =
      MoebiusTransform::similarity(rotation_from_params(3, rp), 2.2, t);
  const double d1 = weighted_distance(pushforward(p, T), pushforward(s1, T), grid).value;
  CHECK(std::abs(d0 - d1) <= 1e-10 * d0);

  // distance scales linearly in the perturbation amplitude
  double ratio_min = std::numeric_limits<double>::infinity(), ratio_max = 0;
  for (double eps : {0.01, 0.02, 0.05}) {
    const Immersion pe =
        make_catalog_surface("perturbed_sphere", {{"eps", eps}, {"l", 2}, {"m", 0}});
    const double r = weighted_distance(pe, s1, grid).value / eps;
    ratio_min = std::min(ratio_min, r);
    ratio_max = std::max(ratio_max, r);
  }
  CHECK(ratio_max <= 2 * ratio_min);

  const Immersion cat = make_catalog_surface("catenoid");
  CHECK_THROWS_AS((void)weighted_distance(s1, cat, grid), Error);  // domain mismatch
}

TEST_CASE("weighted distance is a metric for a fixed weight source") {
  const Immersion s1 = make_catalog_surface("sphere", {{"r", 1.0}});
  const QuadratureGrid grid = alignment_grid(s1, {48, 48});
  Rng rng(7);
  for (int i = 0; i < 20; ++i) {
    auto rand_surface = [&] {
      const int l = 1 + int(rng.next_u64() % 3);
      const int m = int(rng.next_u64() % (2 * l + 1)) - l;
      return make_catalog_surface("perturbed_sphere",
                                  {{"eps", rng.uniform(0.01, 0.25)}, {"l", double(l)},
                                   {"m", double(m)}});
    };
    const Immersion a = rand_surface(), b = rand_surface(), c = rand_surface();
    const double ab = weighted_distance_with_weight(a, b, s1, grid).value;
    const double bc = weighted_distance_with_weight(b, c, s1, grid).value;
    const double ac = weighted_distance_with_weight(a, c, s1, grid).value;
    CHECK(ac <= ab + bc + 1e-9);
    // symmetry with a fixed weight source
    CHECK(std::abs(ab - weighted_distance_with_weight(b, a, s1, grid).value) <= 1e-12 * (1 + ab));
  }
}

TEST_CASE("inversion comparability") {
  const Immersion s1 = make_catalog_surface("sphere", {{"r", 1.0}});
  const QuadratureGrid grid = alignment_grid(s1, {96, 96});
  Vec x0(3);
  x0 << 0, 0, 3;

  const ComparabilityRecord same = inversion_comparability(s1, s1, x0, grid);
  CHECK(same.ratio == doctest::Approx(1.0));

  double prev_ratio = 0;
  for (double eps : {0.04, 0.02, 0.01}) {
    const Immersion p =
        make_catalog_surface("perturbed_sphere", {{"eps", eps}, {"l", 2}, {"m", 0}});
    const ComparabilityRecord rec = inversion_comparability(p, s1, x0, grid);
    CHECK(rec.within_band);
    CHECK(rec.ratio >= 1e-2);
    CHECK(rec.ratio <= 1e2);
    CHECK(rec.g_min >= 1.0);
    if (prev_ratio > 0) CHECK(std::abs(rec.ratio - prev_ratio) <= 0.25 * prev_ratio);
    prev_ratio = rec.ratio;
  }

  Vec near(3);
  near << 0, 0, 1.5;  // distance 0.5 < 1 from the unit sphere
  CHECK_THROWS_AS((void)inversion_comparability(s1, s1, near, grid), Error);
}
