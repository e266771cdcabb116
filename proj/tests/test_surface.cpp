#include <doctest.h>

#include "wlab/catalog.hpp"
#include "wlab/diffgeo.hpp"
#include "wlab/quadrature.hpp"

using namespace wlab;

namespace {

std::vector<Vec2> probe_points(const Immersion& f) {
  // generic interior points of the sampling box, mapped to chart coordinates
  std::vector<Vec2> pts;
  const Interval a0 = f.domain.axis[0], a1 = f.domain.axis[1];
  // central band of the sampling box: jets at extreme log-radii lose relative
  // precision to conditioning, while carrying negligible measure
  for (double s : {0.38, 0.5, 0.62})
    for (double t : {0.23, 0.69}) {
      const Vec2 sample(a0.lo + s * a0.length(), a1.lo + t * a1.length());
      pts.push_back(f.domain.chart_point(sample));
    }
  return pts;
}

const std::vector<std::pair<std::string, std::map<std::string, double>>> kCatalog = {
    {"sphere", {{"r", 1.0}}},
    {"catenoid", {{"V", 20.0}}},
    {"enneper", {{"R", 100.0}}},
    {"chen_graph", {{"c", 1.0}, {"R", 100.0}}},
    {"clifford_torus", {}},
    {"inverted_catenoid", {}},
    {"inverted_enneper", {{"R", 100.0}}},
    {"inverted_chen_graph", {{"c", 1.0}, {"R", 100.0}}}};

}  // namespace

TEST_CASE("sphere chart: south pole and the stereographic factor") {
  const Immersion f = make_catalog_surface("sphere", {{"r", 1.0}});
  const Jet2 j = eval_jet2(f, Vec2(0, 0));
  CHECK(j.position[0] == doctest::Approx(0.0));
  CHECK(j.position[1] == doctest::Approx(0.0));
  CHECK(j.position[2] == doctest::Approx(-1.0));
  CHECK(j.d1[0].norm() == doctest::Approx(2.0));  // 2/(1+|z|^2) at z = 0
  CHECK(j.d1[1].norm() == doctest::Approx(2.0));
  CHECK(j.d1[0].dot(j.d1[1]) == doctest::Approx(0.0));
}

TEST_CASE("catenoid chart at the neck") {
  const Immersion f = make_catalog_surface("catenoid", {{"V", 20.0}});
  const Jet2 j = eval_jet2(f, Vec2(0, 0));
  CHECK(j.position[0] == doctest::Approx(1.0));
  CHECK(j.position[1] == doctest::Approx(0.0));
  CHECK(j.position[2] == doctest::Approx(0.0));
  CHECK((j.d1[0] - (Vec(3) << 0, 0, 1).finished()).norm() == doctest::Approx(0.0));
  CHECK((j.d1[1] - (Vec(3) << 0, 1, 0).finished()).norm() == doctest::Approx(0.0));
  CHECK(j.d1[0].norm() == doctest::Approx(1.0));  // cosh 0
  CHECK(j.d1[1].norm() == doctest::Approx(1.0));
}

TEST_CASE("chen graph second derivatives at the origin") {
  const Immersion f = make_catalog_surface("chen_graph", {{"c", 1.0}, {"R", 5.0}});
  const Jet2 j = eval_jet2(f, Vec2(0, 0));
  // third coordinate is Re z^2: Hessian (2, 0; 0, -2)
  CHECK(j.d2[0][2] == doctest::Approx(2.0));
  CHECK(j.d2[1][2] == doctest::Approx(0.0));
  CHECK(j.d2[2][2] == doctest::Approx(-2.0));
  // fourth coordinate is Im z^2: Hessian (0, 2; 2, 0)
  CHECK(j.d2[0][3] == doctest::Approx(0.0));
  CHECK(j.d2[1][3] == doctest::Approx(2.0));
  CHECK(j.d2[2][3] == doctest::Approx(0.0));
}

TEST_CASE("marked points carry the end multiplicities") {
  const Immersion enneper = make_catalog_surface("enneper", {{"R", 10.0}});
  REQUIRE(enneper.marked_points.size() == 1);
  CHECK(enneper.marked_points[0].kind == MarkedPoint::Kind::end);
  CHECK(enneper.marked_points[0].order == 2);

  const Immersion catenoid = make_catalog_surface("catenoid");
  REQUIRE(catenoid.marked_points.size() == 2);
  for (const auto& m : catenoid.marked_points) {
    CHECK(m.kind == MarkedPoint::Kind::end);
    CHECK(m.order == 0);
  }

  const Immersion chen = make_catalog_surface("chen_graph");
  REQUIRE(chen.marked_points.size() == 1);
  CHECK(chen.marked_points[0].order == 1);

  const Immersion inv_enneper = make_catalog_surface("inverted_enneper", {{"R", 10.0}});
  REQUIRE(inv_enneper.marked_points.size() == 1);
  CHECK(inv_enneper.marked_points[0].kind == MarkedPoint::Kind::branch);
  CHECK(inv_enneper.marked_points[0].order == 2);

  const Immersion inv_cat = make_catalog_surface("inverted_catenoid");
  REQUIRE(inv_cat.marked_points.size() == 2);
  for (const auto& m : inv_cat.marked_points) {
    CHECK(m.kind == MarkedPoint::Kind::multiplicity_preimage);
    CHECK(m.order == 0);
  }
}

TEST_CASE("catalog charts are conformal to 1e-10") {
  for (const auto& [id, params] : kCatalog) {
    const Immersion f = make_catalog_surface(id, params);
    for (const Vec2& p : probe_points(f)) {
      const FundForms F = fundamental_forms(f.jet(p));
      CHECK_MESSAGE(F.conf_defect <= 1e-10, id, " defect at (", p[0], ",", p[1], ")");
      CHECK(F.det_g > 0);  // rank 2 away from branch points
    }
  }
  // perturbed families: defect reported, not asserted; O(eps) scale observed
  const Immersion p = make_catalog_surface("perturbed_sphere", {{"eps", 0.05}, {"l", 2}, {"m", 0}});
  double worst = 0;
  for (const Vec2& z : probe_points(p)) worst = std::max(worst, fundamental_forms(p.jet(z)).conf_defect);
  CHECK(worst > 0);
  CHECK(worst < 0.05);
}

TEST_CASE("jets match central finite differences at second order") {
  for (const auto& [id, params] : kCatalog) {
    const Immersion f = make_catalog_surface(id, params);
    auto fd_error = [&](double h) {
      double err = 0;
      for (const Vec2& p : probe_points(f)) {
        const Jet2 j = f.jet(p);
        const double scale = 1 + j.position.norm();
        for (int axis = 0; axis < 2; ++axis) {
          Vec2 dp = Vec2::Zero();
          dp[axis] = h;
          const Jet2 jp = f.jet(p + dp), jm = f.jet(p - dp);
          err = std::max(err, ((jp.position - jm.position) / (2 * h) - j.d1[axis]).norm() / scale);
          // second derivatives differenced from the analytic first derivatives
          for (int k = 0; k < 2; ++k) {
            const Vec fd2 = (jp.d1[k] - jm.d1[k]) / (2 * h);
            err = std::max(err, (fd2 - j.d2[axis + k]).norm() / scale);
          }
        }
      }
      return err;
    };
    const double e3 = fd_error(1e-3), e4 = fd_error(1e-4);
    if (e3 < 1e-11) {
      // polynomial charts: central differences are exact up to roundoff
      CHECK_MESSAGE(e4 < 1e-11, id);
      continue;
    }
    const double ratio = e3 / e4;
    CHECK_MESSAGE(ratio > 50.0, id, " ratio ", ratio);
    CHECK_MESSAGE(ratio < 200.0, id, " ratio ", ratio);
  }
}

TEST_CASE("grid examples") {
  const Immersion torus = make_catalog_surface("clifford_torus");
  const QuadratureGrid tg = sample_grid(torus, {64, 64}, false);
  CHECK(tg.size() == 4096);
  for (double w : tg.weights) CHECK(w == doctest::Approx(tg.weights.front()));

  const Immersion cat = make_catalog_surface("catenoid", {{"V", 20.0}});
  const QuadratureGrid cg = sample_grid(cat, {128, 64}, false);
  CHECK(cg.weight_sum() == doctest::Approx(40.0 * 2 * pi).epsilon(1e-12));

  Immersion inv = make_catalog_surface("inverted_enneper", {{"R", 1000.0}});
  inv.marked_points[0].exclusion_radius = 1e-2;  // exclusion in the w = 1/z chart
  const QuadratureGrid ig = sample_grid(inv, {64, 64}, false);
  for (const Vec2& node : ig.nodes) CHECK(node.norm() <= 100.0 * (1 + 1e-12));

  CHECK_THROWS_AS((void)sample_grid(cat, {4, 64}), Error);
}

TEST_CASE("catalog validation errors") {
  CHECK_THROWS_AS((void)make_catalog_surface("helicoid"), Error);
  CHECK_THROWS_AS((void)make_catalog_surface("catenoid", {{"V", 2.0}}), Error);
  CHECK_THROWS_AS((void)make_catalog_surface("enneper", {{"R", 1.0}}), Error);
  CHECK_THROWS_AS((void)make_catalog_surface("sphere", {{"r", -1.0}}), Error);
  CHECK_THROWS_AS((void)make_catalog_surface("perturbed_sphere", {{"eps", 0.5}}), Error);
  CHECK_THROWS_AS((void)make_catalog_surface("chen_graph", {{"c", 0.0}}), Error);

  // inversion center on the image: rejected with a distance report
  CatalogSpec spec;
  spec.surface = "inverted_sphere";
  Vec c(3);
  c << 0, 0, 1;
  spec.center = c;
  try {
    (void)make_catalog_surface(spec);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code == Error::Code::domain);
    CHECK(std::string(e.what()).find("distance") != std::string::npos);
  }
}

TEST_CASE("checked evaluation enforces domain and exclusions") {
  const Immersion cat = make_catalog_surface("catenoid", {{"V", 5.0}});
  CHECK_THROWS_AS((void)eval_jet2(cat, Vec2(6.0, 0.0)), Error);
  CHECK_NOTHROW((void)eval_jet2(cat, Vec2(4.9, 0.0)));

  Immersion inv = make_catalog_surface("inverted_catenoid");
  inv.marked_points[0].exclusion_radius = 1e-2;  // lower end, w = e^{v}
  CHECK_THROWS_AS((void)eval_jet2(inv, Vec2(-19.0, 0.0)), Error);
  CHECK_NOTHROW((void)eval_jet2(inv, Vec2(-2.0, 0.0)));
}

TEST_CASE("spherical harmonics are orthonormal on the sphere") {
  // Monte-Carlo-free check: quadrature over the sphere chart
  const Immersion s = make_catalog_surface("sphere", {{"r", 1.0}});
  const QuadratureGrid g = sample_grid(s, {192, 192}, false);
  auto inner = [&](int l1, int m1, int l2, int m2) {
    std::vector<double> terms(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
      const Jet2 j = s.jet(g.nodes[k]);
      const Vec n = j.position;
      const double e2u = std::sqrt(fundamental_forms(j).det_g);
      terms[k] = g.weights[k] * e2u * sph_harmonic(l1, m1, n[0], n[1], n[2]) *
                 sph_harmonic(l2, m2, n[0], n[1], n[2]);
    }
    return pairwise_sum(terms);
  };
  CHECK(inner(2, 0, 2, 0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(inner(3, 2, 3, 2) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(inner(2, 0, 3, 0) == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(inner(2, 1, 2, -1) == doctest::Approx(0.0).epsilon(1e-6));
}
