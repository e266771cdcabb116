#include "wlab/acceptance.hpp"

#include <chrono>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "wlab/catalog.hpp"
#include "wlab/diffgeo.hpp"
#include "wlab/functionals.hpp"
#include "wlab/moebius.hpp"
#include "wlab/rigidity.hpp"
#include "wlab/serialize.hpp"
#include "wlab/sobolev.hpp"
#include "wlab/trimesh.hpp"

namespace wlab {

namespace {

struct Check {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    detail << (ok ? "[ok] " : "[FAIL] ") << what << "; ";
  }
};

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

CriterionResult timed(int id, const std::string& name, const std::function<void(Check&)>& body) {
  CriterionResult r;
  r.id = id;
  r.name = name;
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.pass = false;
    c.detail << "exception: " << e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.pass = c.pass;
  r.detail = c.detail.str();
  return r;
}

// --- criterion bodies -------------------------------------------------------

void criterion_round_sphere(Check& c) {
  const Immersion f = make_catalog_surface("sphere", {{"r", 1.0}});
  const auto t0 = std::chrono::steady_clock::now();
  const EnergyReport r = energy_report(f, sample_grid(f, {256, 256}));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.require(std::abs(r.willmore - 4 * pi) <= 1e-6 * 4 * pi, "willmore = 4pi (" + num(r.willmore) + ")");
  c.require(std::abs(r.total_sff - 8 * pi) <= 1e-6 * 8 * pi, "sff = 8pi (" + num(r.total_sff) + ")");
  c.require(std::abs(r.total_gauss - 4 * pi) <= 1e-6 * 4 * pi,
            "gauss = 4pi (" + num(r.total_gauss) + ")");
  c.require(std::abs(r.total_traceless) <= 1e-6 * 8 * pi,
            "traceless = 0 (" + num(r.total_traceless) + ")");
  c.require(secs < 5.0, "runtime " + num(secs) + " s < 5 s");
}

void criterion_minimal_levels(Check& c) {
  {
    const Immersion f = make_catalog_surface("catenoid", {{"V", 20.0}});
    const EnergyReport r = energy_report(f, sample_grid(f, {256, 256}));
    c.require(std::abs(r.total_sff - 8 * pi) <= 1e-3, "catenoid sff = 8pi (" + num(r.total_sff) + ")");
    c.require(std::abs(r.total_gauss + 4 * pi) <= 1e-3,
              "catenoid gauss = -4pi (" + num(r.total_gauss) + ")");
    c.require(r.tail_sff < 1e-3 && r.tail_gauss < 1e-3, "catenoid certified tails < 1e-3");
  }
  {
    const Immersion f = make_catalog_surface("enneper", {{"R", 1000.0}});
    const EnergyReport r = energy_report(f, sample_grid(f, {256, 256}));
    c.require(std::abs(r.total_sff - 8 * pi) <= 1e-3, "enneper sff = 8pi (" + num(r.total_sff) + ")");
    c.require(std::abs(r.total_gauss + 4 * pi) <= 1e-3,
              "enneper gauss = -4pi (" + num(r.total_gauss) + ")");
    c.require(r.tail_sff < 1e-3 && r.tail_gauss < 1e-3, "enneper certified tails < 1e-3");
  }
  {
    const Immersion f = make_catalog_surface("chen_graph", {{"c", 1.0}, {"R", 1000.0}});
    const EnergyReport r = energy_report(f, sample_grid(f, {256, 256}));
    c.require(std::abs(r.total_sff - 4 * pi) <= 1e-2, "chen sff = 4pi (" + num(r.total_sff) + ")");
    c.require(std::abs(r.total_gauss + 2 * pi) <= 1e-2,
              "chen gauss = -2pi (" + num(r.total_gauss) + ")");
  }
}

void criterion_inversion_ledger(Check& c) {
  struct Case {
    const char* id;
    std::map<std::string, double> params;
    double sff, willmore, gauss;  // expected inverted levels
  };
  // The catenoid is truncated at V = 8 here: the inverted-end transition ring
  // needs the radial nodes that a V = 20 window would waste on dead range.
  const Case cases[] = {{"catenoid", {{"V", 8.0}}, 24 * pi, 8 * pi, 4 * pi},
                        {"enneper", {}, 32 * pi, 12 * pi, 8 * pi},
                        {"chen_graph", {}, 20 * pi, 8 * pi, 6 * pi}};
  for (const Case& cs : cases) {
    const auto t0 = std::chrono::steady_clock::now();
    const Immersion base = make_catalog_surface(cs.id, cs.params);
    const QuadratureGrid coarse = sample_grid(base, {48, 48}, false);
    Rng rng(0xACCE5 + std::string(cs.id).size());
    for (int trial = 0; trial < 3; ++trial) {
      const SafeCenter sc = random_safe_center(base, coarse, rng);
      const Immersion dil =
          pushforward(base, MoebiusTransform::dilation(base.ambient_dim(), sc.applied_dilation));
      const InversionLedger L = inversion_ledger(dil, sc.center, sample_grid(dil, {384, 192}));
      const std::string tag = std::string(cs.id) + "#" + std::to_string(trial);
      c.require(std::abs(L.pred_sff - cs.sff) <= 1e-2,
                tag + " predicted sff at the family level (" + num(L.pred_sff) + ")");
      c.require(std::abs(L.pushed.total_sff - L.pred_sff) <= 0.01 * std::abs(L.pred_sff),
                tag + " sff within 1% (" + num(L.pushed.total_sff) + ")");
      c.require(std::abs(L.pushed.willmore - L.pred_willmore) <= 0.01 * std::abs(L.pred_willmore),
                tag + " willmore within 1% (" + num(L.pushed.willmore) + ")");
      c.require(std::abs(L.pushed.total_gauss - L.pred_gauss) <= 0.01 * std::abs(L.pred_gauss),
                tag + " gauss within 1% (" + num(L.pushed.total_gauss) + ")");
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.require(secs < 60.0, std::string(cs.id) + " runtime " + num(secs) + " s < 60 s");
  }
}

void criterion_gauss_bonnet(Check& c) {
  const std::vector<std::pair<std::string, std::map<std::string, double>>> surfaces = {
      {"sphere", {}},
      {"perturbed_sphere", {{"eps", 0.05}, {"l", 2}, {"m", 0}}},
      {"catenoid", {}},
      {"enneper", {{"R", 1000.0}}},
      {"chen_graph", {{"c", 1.0}, {"R", 1000.0}}},
      {"clifford_torus", {}},
      {"inverted_catenoid", {}},
      {"inverted_enneper", {{"R", 1000.0}}},
      {"inverted_chen_graph", {{"c", 1.0}, {"R", 1000.0}}}};
  for (const auto& [id, params] : surfaces) {
    const Immersion f = make_catalog_surface(id, params);
    const GaussBonnetRecord g = gauss_bonnet_ledger(f, sample_grid(f, {256, 192}));
    c.require(g.consistent, id + " predicted = measured (" + num(g.predicted) + " vs " +
                                num(g.measured) + " tol " + num(g.combined_tolerance) + ")");
    c.require(g.white_ok, id + " White quantization (unit " + num(g.white_unit) + ", multiple " +
                              std::to_string(g.white_multiple) + ")");
  }
}

void criterion_branch_orders(Check& c) {
  auto check_order = [&](const std::string& id, int expected, int which) {
    const Immersion f = make_catalog_surface(id);
    int seen = 0;
    for (const auto& m : f.marked_points) {
      if (m.kind == MarkedPoint::Kind::end) continue;
      if (seen++ != which && which >= 0) continue;
      const BranchOrderFit fit = branch_order_estimate(f, m, default_branch_radii(m));
      c.require(fit.order == expected && fit.slope_residual < 0.05,
                id + " order " + std::to_string(fit.order) + " (slope " + num(fit.slope) +
                    ", residual " + num(fit.slope_residual) + ")");
      if (which >= 0) break;
    }
  };
  check_order("inverted_enneper", 2, 0);
  check_order("inverted_chen_graph", 1, 0);
  // both preimages of the inverted catenoid's double point
  const Immersion f = make_catalog_surface("inverted_catenoid");
  for (const auto& m : f.marked_points) {
    if (m.kind == MarkedPoint::Kind::end) continue;
    const BranchOrderFit fit = branch_order_estimate(f, m, default_branch_radii(m));
    c.require(fit.order == 0 && fit.slope_residual < 0.05,
              "inverted_catenoid preimage order 0 (slope " + num(fit.slope) + ", residual " +
                  num(fit.slope_residual) + ")");
  }
}

void criterion_clifford(Check& c) {
  const Immersion f = make_catalog_surface("clifford_torus");
  const EnergyReport r = energy_report(f, sample_grid(f, {128, 128}));
  c.require(std::abs(r.willmore - 2 * pi * pi) <= 1e-4,
            "clifford willmore = 2 pi^2 (" + num(r.willmore) + ")");
}

void criterion_sobolev(Check& c) {
  const Immersion s1 = make_catalog_surface("sphere", {{"r", 1.0}});
  const QuadratureGrid grid = alignment_grid(s1, {128, 128});

  // dilation invariance of the norm
  const WeightedDistance n1 = weighted_norm(s1, grid);
  const Immersion s1d = pushforward(s1, MoebiusTransform::dilation(3, 2.7));
  const WeightedDistance n1d = weighted_norm(s1d, grid);
  c.require(std::abs(n1.value - n1d.value) <= 1e-10 * n1.value,
            "dilation invariance of the weighted norm (" + num(n1.value) + ")");
  const Immersion s2 = make_catalog_surface("sphere", {{"r", 2.0}});
  const WeightedDistance n2 = weighted_norm(s2, grid);
  c.require(std::abs(n1.value - n2.value) <= 1e-10 * n1.value, "sphere(1) and sphere(2) norms equal");

  // common-similarity invariance of the distance
  const Immersion p = make_catalog_surface("perturbed_sphere", {{"eps", 0.05}, {"l", 2}, {"m", 0}});
  const WeightedDistance d0 = weighted_distance(p, s1, grid);
  Rng rng(777);
  double rp[3] = {0.4 * rng.normal(), 0.4 * rng.normal(), 0.4 * rng.normal()};
  const Mat R = rotation_from_params(3, rp);
  Vec t(3);
  t << rng.normal(), rng.normal(), rng.normal();
  const MoebiusTransform T = MoebiusTransform::similarity(R, 1.8, t);
  const WeightedDistance d1 = weighted_distance(pushforward(p, T), pushforward(s1, T), grid);
  c.require(std::abs(d0.value - d1.value) <= 1e-10 * d0.value,
            "common similarity invariance of the distance (" + num(d0.value) + ")");

  // triangle inequality on 100 random triples, fixed weight source
  const QuadratureGrid small = alignment_grid(s1, {48, 48});
  Rng trng(31337);
  int bad = 0;
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    auto random_surface = [&]() {
      const int l = 1 + int(trng.next_u64() % 3);
      const int m = int(trng.next_u64() % (2 * l + 1)) - l;
      const double eps = trng.uniform(0.01, 0.25);
      return make_catalog_surface("perturbed_sphere",
                                  {{"eps", eps}, {"l", double(l)}, {"m", double(m)}});
    };
    const Immersion a = random_surface(), b = random_surface(), d = random_surface();
    const double ab = weighted_distance_with_weight(a, b, s1, small).value;
    const double bd = weighted_distance_with_weight(b, d, s1, small).value;
    const double ad = weighted_distance_with_weight(a, d, s1, small).value;
    const double slack = ad - (ab + bd);
    worst = std::max(worst, slack);
    if (slack > 1e-9) ++bad;
  }
  c.require(bad == 0, "triangle inequality on 100 triples (worst slack " + num(worst) + ")");

  // comparability band on the perturbed-sphere family
  Vec x0(3);
  x0 << 0, 0, 3;
  for (double eps : {0.01, 0.02, 0.05}) {
    const Immersion pf =
        make_catalog_surface("perturbed_sphere", {{"eps", eps}, {"l", 2}, {"m", 0}});
    const ComparabilityRecord rec = inversion_comparability(pf, s1, x0, grid);
    c.require(rec.within_band,
              "comparability ratio in band at eps=" + num(eps) + " (" + num(rec.ratio) + ")");
  }
}

void criterion_sweeps(Check& c) {
  OptimizerConfig cfg;
  cfg.grid = {128, 128};
  cfg.max_iterations = 300;
  cfg.restarts = 2;
  cfg.tolerance = 1e-7;
  cfg.seed = 411;

  {
    const auto t0 = std::chrono::steady_clock::now();
    const double eps[] = {0.02, 0.05, 0.1, 0.2};
    const SweepResult r = perturbation_sweep("round_sphere", eps, cfg);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.require(r.spearman == 1.0, "round-sphere sweep rank correlation 1.0 (" + num(r.spearman) + ")");
    c.require(r.exponent >= 0.35 && r.exponent <= 0.65,
              "round-sphere exponent in [0.35, 0.65] (" + num(r.exponent) + ")");
    c.require(secs < 600.0, "round-sphere sweep runtime " + num(secs) + " s < 600 s");
  }
  {
    const auto t0 = std::chrono::steady_clock::now();
    const double eps[] = {0.0, 0.01, 0.02, 0.05, 0.1};
    const SweepResult r = perturbation_sweep("inverted_catenoid", eps, cfg);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::vector<double> deltas, dists;
    for (const auto& row : r.rows)
      if (row.epsilon > 0) {
        deltas.push_back(row.delta);
        dists.push_back(row.distance);
      }
    c.require(spearman_rank_correlation(deltas, dists) == 1.0,
              "inverted-catenoid sweep distance decreasing in delta");
    c.require(r.rows[0].distance < 10 * cfg.tolerance,
              "distance at eps=0 below 10x optimizer tolerance (" + num(r.rows[0].distance) + ")");
    c.require(secs < 600.0, "inverted-catenoid sweep runtime " + num(secs) + " s < 600 s");
  }
}

void criterion_oracle(Check& c) {
  const std::vector<std::pair<std::string, std::map<std::string, double>>> surfaces = {
      {"sphere", {}},
      {"perturbed_sphere", {{"eps", 0.05}, {"l", 2}, {"m", 0}}},
      {"catenoid", {}},
      {"enneper", {{"R", 1000.0}}},
      {"chen_graph", {{"c", 1.0}, {"R", 1000.0}}},
      {"clifford_torus", {}},
      {"inverted_catenoid", {}},
      {"inverted_enneper", {{"R", 1000.0}}},
      {"inverted_chen_graph", {{"c", 1.0}, {"R", 1000.0}}}};
  for (const auto& [id, params] : surfaces) {
    const Immersion f = make_catalog_surface(id, params);
    const TriMesh mesh = mesh_from_immersion(f, 256);
    const AngleDefectResult ad = angle_defect_total_curvature(mesh);
    const EnergyReport er = energy_report(f, sample_grid(f, {192, 192}));
    const double tol = 0.01 * std::max(std::abs(er.total_gauss), 2 * pi);
    c.require(std::abs(ad.interior_defect - er.total_gauss) <= tol,
              id + " defect vs quadrature (" + num(ad.interior_defect) + " vs " +
                  num(er.total_gauss) + ")");
    c.require(std::abs(ad.combinatorial_residual) <= 1e-9,
              id + " discrete Gauss-Bonnet identity (" + num(ad.combinatorial_residual) + ")");
  }
}

void criterion_determinism(Check& c) {
  auto artifact_bytes = [&]() {
    OptimizerConfig cfg;
    cfg.grid = {48, 48};
    cfg.max_iterations = 120;
    cfg.restarts = 2;
    cfg.seed = 20240612;
    const Immersion p =
        make_catalog_surface("perturbed_sphere", {{"eps", 0.05}, {"l", 2}, {"m", 0}});
    const AlignmentResult ar = nearest_round_sphere(p, cfg);
    const double eps[] = {0.05, 0.1};
    const SweepResult sw = perturbation_sweep("round_sphere", eps, cfg);
    return to_json(ar).dump(2) + "\n" + sweep_csv(sw) + sweep_dat(sw);
  };
  const std::string a = artifact_bytes();
  const std::string b = artifact_bytes();
  c.require(a == b, "two runs with the same seed produce byte-identical artifacts (" +
                        std::to_string(a.size()) + " bytes)");
}

}  // namespace

std::vector<Criterion> acceptance_criteria() {
  return {
      {1, "round sphere energy levels at 256^2", [] { return timed(1, "round sphere energy levels at 256^2", criterion_round_sphere); }},
      {2, "catenoid / Enneper / Chen graph energy levels", [] { return timed(2, "catenoid / Enneper / Chen graph energy levels", criterion_minimal_levels); }},
      {3, "inversion ledger at random safe centers", [] { return timed(3, "inversion ledger at random safe centers", criterion_inversion_ledger); }},
      {4, "Gauss-Bonnet ledger and White quantization", [] { return timed(4, "Gauss-Bonnet ledger and White quantization", criterion_gauss_bonnet); }},
      {5, "branch-order detection", [] { return timed(5, "branch-order detection", criterion_branch_orders); }},
      {6, "Clifford torus Willmore value", [] { return timed(6, "Clifford torus Willmore value", criterion_clifford); }},
      {7, "weighted Sobolev suite", [] { return timed(7, "weighted Sobolev suite", criterion_sobolev); }},
      {8, "rigidity perturbation sweeps", [] { return timed(8, "rigidity perturbation sweeps", criterion_sweeps); }},
      {9, "mesh oracle cross-check", [] { return timed(9, "mesh oracle cross-check", criterion_oracle); }},
      {10, "determinism of seeded artifacts", [] { return timed(10, "determinism of seeded artifacts", criterion_determinism); }},
  };
}

int run_acceptance(std::ostream& out) {
  int failures = 0;
  for (const Criterion& cr : acceptance_criteria()) {
    const CriterionResult r = cr.run();
    out << (r.pass ? "PASS" : "FAIL") << " criterion " << r.id << ": " << r.name << " ["
        << std::fixed << std::setprecision(1) << r.seconds << " s]\n";
    if (!r.pass) {
      out << "     " << r.detail << "\n";
      ++failures;
    }
    out.flush();
  }
  return failures;
}

}  // namespace wlab
