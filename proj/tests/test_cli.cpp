#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

#include "wlab/config.hpp"
#include "wlab/serialize.hpp"

using namespace wlab;

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(WLAB_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST_CASE("config: defaults, schema, unknown keys") {
  const json minimal = {{"command", "energy"}, {"surface", {{"surface", "sphere"}}}};
  const ExperimentConfig cfg = config_from_json(minimal, "test");
  CHECK(cfg.command == "energy");
  CHECK(cfg.grid[0] == 256);
  CHECK(cfg.optimizer.restarts == 5);
  CHECK(cfg.optimizer.seed == 20240501);
  // resolved echo contains the filled defaults
  const json echo = cfg.resolved();
  CHECK(echo.at("grid").at(0).get<int>() == 256);
  CHECK(echo.at("optimizer").at("max_iterations").get<int>() == 400);

  json bad = minimal;
  bad["grd"] = 128;
  try {
    (void)config_from_json(bad, "test");
    CHECK(false);
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("grd") != std::string::npos);
  }

  json bad2 = minimal;
  bad2["optimizer"] = {{"restrats", 3}};
  CHECK_THROWS_AS((void)config_from_json(bad2, "test"), Error);

  json sweep = {{"command", "sweep"},
                {"sweep", {{"family", "round_sphere"}, {"epsilons", {0.01, 0.02, 0.05, 0.1}}}}};
  CHECK(config_from_json(sweep, "test").epsilons.size() == 4);

  json smallgrid = minimal;
  smallgrid["grid"] = 4;
  CHECK_THROWS_AS((void)config_from_json(smallgrid, "test"), Error);
}

TEST_CASE("TOML subset round-trips the schema") {
  const std::string toml = R"(# experiment
command = "energy"
grid = 64
workers = 2

[surface]
surface = "catenoid"

[surface.params]
V = 12.0

[optimizer]
seed = 42
restarts = 3
search_inversion = false

[sweep]
family = "round_sphere"
epsilons = [0.01, 0.02]
)";
  const json j = toml_subset_to_json(toml, "test.toml");
  const ExperimentConfig cfg = config_from_json(j, "test.toml");
  CHECK(cfg.command == "energy");
  CHECK(cfg.grid[0] == 64);
  CHECK(cfg.surface.surface == "catenoid");
  CHECK(cfg.surface.params.at("V") == 12.0);
  CHECK(cfg.optimizer.seed == 42);
  CHECK(cfg.optimizer.restarts == 3);
  CHECK(cfg.epsilons.size() == 2);
  CHECK(cfg.workers == 2);

  CHECK_THROWS_AS((void)toml_subset_to_json("key value-without-equals", "bad.toml"), Error);
  CHECK_THROWS_AS((void)toml_subset_to_json("x = [1, 2", "bad.toml"), Error);
}

TEST_CASE("load_config by extension") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "wlab_cfg_test";
  fs::create_directories(dir);

  {
    std::ofstream out(dir / "a.json");
    out << R"({"command": "energy", "surface": "sphere", "grid": 32})";
  }
  const ExperimentConfig a = load_config((dir / "a.json").string());
  CHECK(a.surface.surface == "sphere");
  CHECK(a.grid[0] == 32);

  {
    std::ofstream out(dir / "b.toml");
    out << "command = \"catalog\"\n";
  }
  CHECK(load_config((dir / "b.toml").string()).command == "catalog");

  CHECK_THROWS_AS((void)load_config((dir / "missing.json").string()), Error);
  {
    std::ofstream out(dir / "c.json");
    out << "{not json";
  }
  CHECK_THROWS_AS((void)load_config((dir / "c.json").string()), Error);
  fs::remove_all(dir);
}

TEST_CASE("CLI exit codes and artifacts") {
  CHECK(run_cli("energy --surface sphere --grid 4") == 2);   // below minimum
  CHECK(run_cli("energy --surface nonsense --grid 32") == 2);
  CHECK(run_cli("align --surface sphere --model nonsense --grid 32") == 2);
  CHECK(run_cli("catalog") == 0);

  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "wlab_cli_test";
  fs::create_directories(dir);
  const std::string out = (dir / "sphere_energy").string();
  CHECK(run_cli("energy --surface sphere --grid 64 --out " + out) == 0);
  std::ifstream in(out + ".json");
  REQUIRE(in.good());
  json art;
  in >> art;
  CHECK(art.at("version").get<std::string>() == tool_version);
  CHECK(art.at("config").at("command").get<std::string>() == "energy");
  CHECK(std::abs(art.at("result").at("willmore").get<double>() - 4 * pi) < 1e-4);

  // config file driving the run, with a flag override
  {
    std::ofstream cf(dir / "run.json");
    cf << R"({"command": "energy", "surface": {"surface": "clifford_torus"}, "grid": 32})";
  }
  const std::string out2 = (dir / "torus_energy").string();
  CHECK(run_cli("energy --config " + (dir / "run.json").string() + " --grid 48 --out " + out2) ==
        0);
  std::ifstream in2(out2 + ".json");
  REQUIRE(in2.good());
  json art2;
  in2 >> art2;
  CHECK(art2.at("config").at("grid").at(0).get<int>() == 48);
  CHECK(std::abs(art2.at("result").at("willmore").get<double>() - 2 * pi * pi) < 1e-4);

  fs::remove_all(dir);
}

TEST_CASE("serialization forms") {
  // Moebius transform JSON round trip
  Rng rng(3);
  Vec t(3), c(3);
  t << 1.0, -0.5, 2.0;
  c << 0.3, 0.1, -4.0;
  std::vector<double> rp = {0.2, 0.4, -0.3};
  MoebiusTransform m = MoebiusTransform::similarity(rotation_from_params(3, rp), 1.4, t);
  m.inversion_center = c;
  const MoebiusTransform back = moebius_from_json(to_json(m));
  CHECK((back.rotation - m.rotation).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
  CHECK(back.scale == m.scale);
  CHECK((back.translation - m.translation).norm() == doctest::Approx(0.0));
  REQUIRE(back.inversion_center.has_value());
  CHECK((*back.inversion_center - c).norm() == doctest::Approx(0.0));

  // energy report JSON carries the documented fields
  const Immersion s = make_catalog_surface("sphere");
  const EnergyReport er = energy_report(s, sample_grid(s, {48, 48}));
  const json j = to_json(er);
  for (const char* key : {"area", "willmore", "total_sff", "total_gauss", "total_traceless",
                          "error_estimates", "truncation_tail"})
    CHECK(j.contains(key));
  const std::string row = energy_csv_row(er);
  CHECK(row.find("sphere") != std::string::npos);
  CHECK(energy_csv_header().rfind("surface,", 0) == 0);

  WeightedDistance d;
  d.value = 2.0;
  d.comp[0] = 1.0;
  d.comp[1] = 1.0;
  d.comp[2] = 2.0;
  d.grid_tag = "core:sphere:48x48";
  CHECK(distance_csv_row("perturbed_sphere", "round_sphere", d) ==
        "perturbed_sphere,round_sphere,2,1,1,2,core:sphere:48x48\n");
  CHECK(distance_csv_header() == "surface,model,value,comp0,comp1,comp2,grid\n");
}

TEST_CASE("sweep artifacts are reproducible byte for byte") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "wlab_sweep_test";
  fs::create_directories(dir);
  const std::string args =
      "sweep --family round_sphere --epsilons 0.05,0.1 --grid 32 --restarts 2 "
      "--max-iterations 400 --seed 7 --out ";
  CHECK(run_cli(args + (dir / "a").string()) == 0);
  CHECK(run_cli(args + (dir / "b").string()) == 0);
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  };
  CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
  CHECK(slurp(dir / "a.dat") == slurp(dir / "b.dat"));
  const std::string csv = slurp(dir / "a.csv");
  CHECK(csv.rfind("epsilon,delta,distance,area,normalized_distance,converged\n", 0) == 0);
  fs::remove_all(dir);
}
