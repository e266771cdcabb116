#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "wlab/acceptance.hpp"
#include "wlab/config.hpp"
#include "wlab/serialize.hpp"
#include "wlab/trimesh.hpp"

namespace {

using wlab::json;

void write_text(const std::string& path, const std::string& text) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw wlab::config_error("cannot open output file: " + path);
  out << text;
}

json artifact(const wlab::ExperimentConfig& cfg, json result) {
  return json{{"version", wlab::tool_version}, {"config", cfg.resolved()}, {"result", std::move(result)}};
}

void emit(const wlab::ExperimentConfig& cfg, const json& result, const std::string& suffix = ".json") {
  const json art = artifact(cfg, result);
  if (cfg.output.empty()) {
    std::cout << art.dump(2) << "\n";
  } else {
    write_text(cfg.output + suffix, art.dump(2) + "\n");
  }
}

wlab::Vec parse_center(const std::string& text, int dim) {
  std::vector<double> vals;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string tok = comma == std::string::npos ? text.substr(pos) : text.substr(pos, comma - pos);
    vals.push_back(std::stod(tok));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (int(vals.size()) != dim)
    throw wlab::config_error("inversion center needs " + std::to_string(dim) + " components");
  wlab::Vec c(dim);
  for (int i = 0; i < dim; ++i) c[i] = vals[i];
  return c;
}

int run(const wlab::ExperimentConfig& cfg) {
  using namespace wlab;

  if (cfg.command == "catalog") {
    json list = json::array();
    for (const std::string& id : catalog_ids()) list.push_back(id);
    emit(cfg, json{{"surfaces", list}});
    return 0;
  }

  if (cfg.command == "energy") {
    const Immersion f = make_catalog_surface(cfg.surface);
    const EnergyReport r = energy_report(f, sample_grid(f, cfg.grid));
    emit(cfg, to_json(r));
    return 0;
  }

  if (cfg.command == "ledger") {
    const Immersion f = make_catalog_surface(cfg.surface);
    const QuadratureGrid grid = sample_grid(f, cfg.grid);
    json result{{"gauss_bonnet", to_json(gauss_bonnet_ledger(f, grid))}};
    if (cfg.invert != "none") {
      Immersion g = f;
      Vec x0;
      if (cfg.invert == "auto") {
        const SafeCenter sc = safe_inversion_center(f, sample_grid(f, {48, 48}, false));
        g = pushforward(f, MoebiusTransform::dilation(f.ambient_dim(), sc.applied_dilation));
        x0 = sc.center;
        result["safe_center"] = {{"center", std::vector<double>(x0.data(), x0.data() + x0.size())},
                                 {"applied_dilation", sc.applied_dilation},
                                 {"min_distance", sc.min_distance}};
      } else {
        x0 = parse_center(cfg.invert, f.ambient_dim());
      }
      const InversionLedger L = inversion_ledger(g, x0, sample_grid(g, cfg.grid));
      result["inversion"] = to_json(L);
    }
    emit(cfg, result);
    return 0;
  }

  if (cfg.command == "invert") {
    const Immersion f = make_catalog_surface(cfg.surface);
    Vec x0;
    Immersion g = f;
    json result;
    if (cfg.invert == "auto" || cfg.invert == "none") {
      const SafeCenter sc = safe_inversion_center(f, sample_grid(f, {48, 48}, false));
      g = pushforward(f, MoebiusTransform::dilation(f.ambient_dim(), sc.applied_dilation));
      x0 = sc.center;
      result["safe_center"] = {{"center", std::vector<double>(x0.data(), x0.data() + x0.size())},
                               {"applied_dilation", sc.applied_dilation},
                               {"min_distance", sc.min_distance}};
    } else {
      x0 = parse_center(cfg.invert, f.ambient_dim());
    }
    const Immersion pushed = pushforward(g, MoebiusTransform::inversion(x0));
    const EnergyReport r = energy_report(pushed, sample_grid(pushed, cfg.grid));
    result["energy"] = to_json(r);
    if (!cfg.output.empty()) {
      write_off(mesh_from_immersion(pushed, std::max(64, cfg.grid[0] / 2)), cfg.output + ".off");
      result["mesh"] = cfg.output + ".off";
    }
    emit(cfg, result);
    return 0;
  }

  if (cfg.command == "align") {
    const Immersion f = make_catalog_surface(cfg.surface);
    AlignmentResult ar;
    if (cfg.model == "round_sphere") {
      ar = nearest_round_sphere(f, cfg.optimizer);
    } else if (cfg.model == "inverted_catenoid") {
      ar = align_to_model(f, ModelFamily::inverted_catenoid, cfg.optimizer);
    } else if (cfg.model == "inverted_enneper") {
      ar = align_to_model(f, ModelFamily::inverted_enneper, cfg.optimizer);
    } else if (cfg.model == "inverted_chen") {
      ar = align_to_model(f, ModelFamily::inverted_chen, cfg.optimizer);
    } else {
      throw config_error("align: unknown model '" + cfg.model + "'");
    }
    emit(cfg, to_json(ar));
    return ar.converged ? 0 : 3;
  }

  if (cfg.command == "sweep") {
    if (cfg.epsilons.empty()) throw config_error("sweep: provide sweep.epsilons");
    {
      double lo = cfg.epsilons.front(), hi = cfg.epsilons.front();
      for (double e : cfg.epsilons) {
        if (e > 0) lo = std::min(lo > 0 ? lo : e, e);
        hi = std::max(hi, e);
      }
      if (cfg.epsilons.size() < 4 || (lo > 0 && hi / lo < 10.0))
        std::cerr << "warning: exponent fits want >= 4 epsilons spanning a decade\n";
    }
    const SweepResult r = perturbation_sweep(cfg.family, cfg.epsilons, cfg.optimizer, cfg.workers);
    if (cfg.output.empty()) {
      emit(cfg, to_json(r));
    } else {
      write_text(cfg.output + ".csv", sweep_csv(r));
      write_text(cfg.output + ".dat", sweep_dat(r));
      write_text(cfg.output + ".gp",
                 sweep_gnuplot(std::filesystem::path(cfg.output + ".dat").filename().string()));
      write_text(cfg.output + "_fit.json",
                 artifact(cfg, json{{"exponent", r.exponent},
                                    {"residual", r.fit_residual},
                                    {"rows_used", r.rows_used},
                                    {"spearman", r.spearman}})
                         .dump(2) +
                     "\n");
      emit(cfg, to_json(r));
    }
    bool all_converged = true;
    for (const SweepRow& row : r.rows)
      if (!row.converged) {
        std::cerr << "warning: sweep row epsilon=" << row.epsilon
                  << " did not converge; excluded from the fit\n";
        all_converged = false;
      }
    return all_converged ? 0 : 3;
  }

  if (cfg.command == "verify-all") {
    std::ostringstream report;
    const int failures = run_acceptance(report);
    std::cout << report.str();
    if (!cfg.output.empty())
      write_text(cfg.output + ".txt", report.str());
    return failures > 0 ? 1 : 0;
  }

  throw config_error("unknown command: " + cfg.command);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"willmore-lab: energies, Moebius ledgers, and rigidity experiments for "
               "exactly parameterized surfaces"};
  app.require_subcommand(0, 1);

  std::string config_path, surface = "sphere", invert = "none", model, family, out, center;
  std::vector<std::string> params;
  std::vector<double> epsilons;
  int grid = 256;
  int workers = 1;
  if (const char* env = std::getenv("WLAB_WORKERS")) workers = std::max(1, std::atoi(env));
  std::uint64_t seed = 20240501;
  int max_iter = 400, restarts = 5;
  double tol = 1e-7;
  bool search_inversion = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON or TOML config file");
    sub->add_option("--surface", surface, "catalog surface id");
    sub->add_option("--param", params, "surface parameter KEY=VALUE (repeatable)");
    sub->add_option("--center", center, "inversion center x,y,z[,w] for inverted_* surfaces");
    sub->add_option("--grid", grid, "grid resolution per axis");
    sub->add_option("--out", out, "output path prefix");
    sub->add_option("--workers", workers, "worker threads for sweeps");
    sub->add_option("--seed", seed, "optimizer seed");
    sub->add_option("--max-iterations", max_iter, "optimizer iteration cap");
    sub->add_option("--restarts", restarts, "optimizer restarts");
    sub->add_option("--tolerance", tol, "optimizer tolerance");
    sub->add_flag("--search-inversion", search_inversion,
                  "extend the alignment search by an inversion leg");
  };

  CLI::App* c_catalog = app.add_subcommand("catalog", "list catalog surfaces");
  CLI::App* c_energy = app.add_subcommand("energy", "energy report for a surface");
  CLI::App* c_ledger = app.add_subcommand("ledger", "Gauss-Bonnet (and inversion) ledgers");
  CLI::App* c_invert = app.add_subcommand("invert", "pushforward under a (safe) inversion");
  CLI::App* c_align = app.add_subcommand("align", "align a surface to a model family");
  CLI::App* c_sweep = app.add_subcommand("sweep", "delta-vs-distance perturbation sweep");
  CLI::App* c_verify = app.add_subcommand("verify-all", "run the acceptance suite");
  for (CLI::App* sub : {c_catalog, c_energy, c_ledger, c_invert, c_align, c_sweep, c_verify})
    add_common(sub);
  c_ledger->add_option("--invert", invert, "inversion center: auto | x,y,z[,w] | none");
  c_invert->add_option("--invert", invert, "inversion center: auto | x,y,z[,w]");
  c_align->add_option("--model", model,
                      "round_sphere | inverted_catenoid | inverted_enneper | inverted_chen");
  c_sweep->add_option("--family", family, "round_sphere | inverted_catenoid");
  c_sweep->add_option("--epsilons", epsilons, "perturbation amplitudes")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    json j = json::object();
    if (!config_path.empty()) {
      // load first so explicit flags can override below
      std::ifstream probe(config_path);
      if (!probe) throw wlab::config_error("config file does not exist: " + config_path);
      wlab::ExperimentConfig file_cfg = wlab::load_config(config_path);
      j = file_cfg.resolved();
    }

    CLI::App* sub = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front();
    if (sub == nullptr && j.empty()) {
      std::cerr << app.help();
      return 2;
    }
    if (sub != nullptr) j["command"] = sub->get_name();

    auto set_if = [&](CLI::App* s, const std::string& flag, auto&& fn) {
      if (s == nullptr) return;
      const CLI::Option* o = s->get_option_no_throw(flag);
      if (o != nullptr && o->count() > 0) fn();
    };
    json jsurface = j.contains("surface") ? j["surface"] : json{{"surface", surface}};
    if (!jsurface.is_object()) jsurface = json{{"surface", jsurface}};
    set_if(sub, "--surface", [&] { jsurface["surface"] = surface; });
    set_if(sub, "--param", [&] {
      json p = jsurface.value("params", json::object());
      for (const std::string& kv : params) {
        const std::size_t eq = kv.find('=');
        if (eq == std::string::npos)
          throw wlab::config_error("--param expects KEY=VALUE, got '" + kv + "'");
        p[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
      }
      jsurface["params"] = p;
    });
    set_if(sub, "--center", [&] {
      json c = json::array();
      std::size_t pos = 0;
      while (pos <= center.size()) {
        const std::size_t comma = center.find(',', pos);
        c.push_back(std::stod(comma == std::string::npos ? center.substr(pos)
                                                         : center.substr(pos, comma - pos)));
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
      jsurface["center"] = c;
    });
    j["surface"] = jsurface;
    set_if(sub, "--grid", [&] { j["grid"] = grid; });
    set_if(sub, "--out", [&] { j["output"] = out; });
    set_if(sub, "--workers", [&] { j["workers"] = workers; });
    if (!j.contains("workers")) j["workers"] = workers;
    json opt = j.value("optimizer", json::object());
    set_if(sub, "--seed", [&] { opt["seed"] = seed; });
    set_if(sub, "--max-iterations", [&] { opt["max_iterations"] = max_iter; });
    set_if(sub, "--restarts", [&] { opt["restarts"] = restarts; });
    set_if(sub, "--tolerance", [&] { opt["tolerance"] = tol; });
    set_if(sub, "--search-inversion", [&] { opt["search_inversion"] = search_inversion; });
    if (!opt.empty()) j["optimizer"] = opt;
    set_if(sub, "--invert", [&] { j["invert"] = invert; });
    set_if(sub, "--model", [&] { j["model"] = model; });
    set_if(sub, "--family", [&] {
      json sweep = j.value("sweep", json::object());
      sweep["family"] = family;
      j["sweep"] = sweep;
    });
    set_if(sub, "--epsilons", [&] {
      json sweep = j.value("sweep", json::object());
      sweep["epsilons"] = epsilons;
      j["sweep"] = sweep;
    });

    const wlab::ExperimentConfig cfg = wlab::config_from_json(j, "command line");
    return run(cfg);
  } catch (const wlab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.code) {
      case wlab::Error::Code::config:
      case wlab::Error::Code::domain:
        return 2;
      case wlab::Error::Code::numerical:
        return 3;
    }
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
