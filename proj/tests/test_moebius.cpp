#include <doctest.h>

#include "wlab/catalog.hpp"
#include "wlab/moebius.hpp"

using namespace wlab;

namespace {

MoebiusTransform random_transform(Rng& rng, int n, bool allow_inversion) {
  std::vector<double> rp(rotation_param_count(n));
  for (double& x : rp) x = rng.uniform(-1.0, 1.0);
  Vec t(n);
  for (int i = 0; i < n; ++i) t[i] = rng.uniform(-2.0, 2.0);
  MoebiusTransform m =
      MoebiusTransform::similarity(rotation_from_params(n, rp), std::exp(rng.uniform(-1, 1)), t);
  if (allow_inversion && rng.uniform() < 0.5) {
    Vec c(n);
    for (int i = 0; i < n; ++i) c[i] = rng.uniform(-2.0, 2.0);
    m.inversion_center = c;
  }
  return m;
}

Vec random_point(Rng& rng, int n) {
  Vec y(n);
  for (int i = 0; i < n; ++i) y[i] = rng.uniform(-3.0, 3.0);
  return y;
}

}  // namespace

TEST_CASE("apply: inversion basics") {
  Vec origin = Vec::Zero(3);
  const MoebiusTransform I0 = MoebiusTransform::inversion(origin);
  Vec y(3);
  y << 2, 0, 0;
  const Vec iy = I0.apply(y);
  CHECK(iy[0] == doctest::Approx(0.5));
  CHECK(iy[1] == doctest::Approx(0.0));

  Rng rng(5);
  for (int i = 0; i < 10; ++i) {
    const Vec p = random_point(rng, 3);
    if (p.norm() < 1e-3) continue;
    CHECK((I0.apply(I0.apply(p)) - p).norm() < 1e-12 * (1 + p.norm()));  // involution
  }

  Vec c(3);
  c << 1, -2, 0.5;
  const MoebiusTransform T = MoebiusTransform::translation_by(c);
  CHECK((T.apply(y) - (y + c)).norm() == doctest::Approx(0.0));

  CHECK_THROWS_AS((void)I0.apply(origin), Error);  // pole
}

TEST_CASE("group laws on random triples") {
  for (int n : {3, 4}) {
    Rng rng(1234 + n);
    int tested = 0;
    while (tested < 100) {
      const MoebiusTransform S = random_transform(rng, n, true);
      const MoebiusTransform T = random_transform(rng, n, true);
      const Vec y = random_point(rng, n);
      // keep clear of both poles
      try {
        const Vec via_chain = S.apply(T.apply(y));
        const MoebiusTransform ST = S.compose(T);
        const Vec via_compose = ST.apply(y);
        const double scale = 1 + via_chain.norm() + y.norm();
        CHECK((via_chain - via_compose).norm() <= 1e-10 * scale);
        CHECK(ST.orthogonality_defect() <= 1e-12);

        const MoebiusTransform Ti = T.inverse();
        CHECK((Ti.apply(T.apply(y)) - y).norm() <= 1e-10 * (1 + y.norm()));
        ++tested;
      } catch (const Error&) {
        continue;  // pole hit; draw another triple
      }
    }
  }
}

TEST_CASE("pushforward jets agree with finite differences") {
  const Immersion cat = make_catalog_surface("catenoid", {{"V", 8.0}});
  Vec x0(3);
  x0 << 0, 0, 0;
  const Immersion inv = pushforward(cat, MoebiusTransform::inversion(x0), false);

  auto fd_err = [&](double h) {
    double err = 0;
    for (const Vec2 p : {Vec2(0.4, 0.9), Vec2(-1.1, 2.3)}) {
      const Jet2 j = inv.jet(p);
      for (int axis = 0; axis < 2; ++axis) {
        Vec2 dp = Vec2::Zero();
        dp[axis] = h;
        const Vec fd = (inv.jet(p + dp).position - inv.jet(p - dp).position) / (2 * h);
        err = std::max(err, (fd - j.d1[axis]).norm());
      }
    }
    return err;
  };
  const double ratio = fd_err(1e-3) / fd_err(1e-4);
  CHECK(ratio > 50.0);
  CHECK(ratio < 200.0);
}

TEST_CASE("Willmore energy is invariant under similarities") {
  const Immersion sphere = make_catalog_surface("sphere", {{"r", 1.0}});
  Vec t(3);
  t << 0.3, -4.0, 2.0;
  const Immersion moved =
      pushforward(sphere, MoebiusTransform::similarity(Mat::Identity(3, 3), 2.0, t));
  const EnergyReport r = energy_report(moved, sample_grid(moved, {192, 192}));
  CHECK(std::abs(r.willmore - 4 * pi) < 1e-6 * 4 * pi);
  CHECK(std::abs(r.total_sff - 8 * pi) < 1e-6 * 8 * pi);
}

TEST_CASE("pushforward under inversion reproduces the 24 pi level") {
  const Immersion cat = make_catalog_surface("catenoid", {{"V", 20.0}});
  Vec x0 = Vec::Zero(3);
  const Immersion inv = pushforward(cat, MoebiusTransform::inversion(x0), true);
  const EnergyReport r = energy_report(inv, sample_grid(inv, {256, 128}));
  CHECK(std::abs(r.total_sff - 24 * pi) < 0.01 * 24 * pi);
  CHECK(std::abs(r.willmore - 8 * pi) < 0.01 * 8 * pi);
}

TEST_CASE("safe inversion centers") {
  const Immersion sphere = make_catalog_surface("sphere", {{"r", 1.0}});
  const SafeCenter sc = safe_inversion_center(sphere, sample_grid(sphere, {48, 48}, false));
  CHECK(sc.min_distance >= 1.0);
  CHECK(sc.center.norm() >= 2.0);  // exterior of the normalized unit sphere

  const Immersion cat = make_catalog_surface("catenoid", {{"V", 12.0}});
  const SafeCenter sc2 = safe_inversion_center(cat, sample_grid(cat, {48, 48}, false));
  CHECK(sc2.min_distance >= 1.0);

  const Immersion torus = make_catalog_surface("clifford_torus");
  const SafeCenter sc3 = safe_inversion_center(torus, sample_grid(torus, {48, 48}, false));
  CHECK(sc3.min_distance >= 1.0);
}

TEST_CASE("inversion ledger at random safe centers") {
  Rng rng(2024);
  for (const std::string id : {"catenoid", "sphere", "clifford_torus"}) {
    const Immersion base = make_catalog_surface(id);
    const QuadratureGrid coarse = sample_grid(base, {48, 48}, false);
    for (int trial = 0; trial < 5; ++trial) {
      const SafeCenter sc = random_safe_center(base, coarse, rng);
      const Immersion dil = pushforward(
          base, MoebiusTransform::dilation(base.ambient_dim(), sc.applied_dilation));
      const InversionLedger L = inversion_ledger(dil, sc.center, sample_grid(dil, {192, 128}));
      CHECK_MESSAGE(L.all_ok, id, " trial ", trial, ": |pred-meas| sff ",
                    std::abs(L.pred_sff - L.pushed.total_sff));
    }
  }
}

TEST_CASE("re-inversion at the double point returns to the catenoid levels") {
  // x0 on the image: the marked multiplicity preimages supply m(p) + 1 = 1 each
  const Immersion icat = make_catalog_surface("inverted_catenoid");
  Vec x0 = Vec::Zero(3);  // the double point of the standard inverted catenoid
  const InversionLedger L = inversion_ledger(icat, x0, sample_grid(icat, {192, 128}));
  CHECK(L.bracket_ends == 0);
  CHECK(L.bracket_poles == 2);
  CHECK(L.pred_sff == doctest::Approx(24 * pi - 16 * pi));
  CHECK(L.pred_willmore == doctest::Approx(8 * pi - 8 * pi));
  CHECK(std::abs(L.pushed.total_sff - 8 * pi) < 0.02 * 8 * pi);
  CHECK(std::abs(L.pushed.willmore) < 0.15);
}

TEST_CASE("pushforward marked-point metadata") {
  const Immersion enneper = make_catalog_surface("enneper", {{"R", 100.0}});
  Vec x0(3);
  x0 << 0, 0, 1;
  const Immersion inv = pushforward(enneper, MoebiusTransform::inversion(x0));
  REQUIRE(inv.marked_points.size() == 1);
  CHECK(inv.marked_points[0].kind == MarkedPoint::Kind::branch);
  CHECK(inv.marked_points[0].order == 2);
  REQUIRE(inv.marked_points[0].image.has_value());
  CHECK((*inv.marked_points[0].image - x0).norm() == doctest::Approx(0.0));
  // the former end is now capped at the center's image
  bool has_cap = false;
  for (const auto& cap : inv.caps)
    if (cap.cone_order == 2) has_cap = true;
  CHECK(has_cap);

  CHECK_THROWS_AS(
      (void)pushforward(enneper, MoebiusTransform::inversion(Vec::Zero(3))), Error);
}
