#include "wlab/config.hpp"

#include <fstream>
#include <sstream>

namespace wlab {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json& obj, const std::vector<std::string>& known,
                         const std::string& path) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end())
      throw config_error("unknown config key '" + (path.empty() ? it.key() : path + "." + it.key()) +
                         "'");
  }
}

}  // namespace

nlohmann::json ExperimentConfig::resolved() const {
  json surf{{"surface", surface.surface}, {"params", json::object()}};
  for (const auto& [k, v] : surface.params) surf["params"][k] = v;
  if (surface.center) {
    json c = json::array();
    for (int i = 0; i < surface.center->size(); ++i) c.push_back((*surface.center)[i]);
    surf["center"] = c;
  }
  json tols = json::object();
  for (const auto& [k, v] : tolerance_overrides) tols[k] = v;
  return json{{"command", command},
              {"surface", surf},
              {"grid", {grid[0], grid[1]}},
              {"optimizer",
               {{"max_iterations", optimizer.max_iterations},
                {"tolerance", optimizer.tolerance},
                {"restarts", optimizer.restarts},
                {"seed", optimizer.seed},
                {"search_inversion", optimizer.search_inversion}}},
              {"model", model},
              {"sweep", {{"family", family}, {"epsilons", epsilons}}},
              {"invert", invert},
              {"output", output},
              {"workers", workers},
              {"tolerances", tols}};
}

ExperimentConfig config_from_json(const json& j, const std::string& source) {
  if (!j.is_object()) throw config_error(source + ": config root must be an object/table");
  reject_unknown_keys(j, {"command", "surface", "grid", "optimizer", "model", "sweep", "invert",
                          "output", "workers", "tolerances"},
                      "");
  ExperimentConfig c;
  if (!j.contains("command") || !j.at("command").is_string())
    throw config_error(source + ": missing required string key 'command'");
  c.command = j.at("command").get<std::string>();

  if (j.contains("surface")) {
    const json& s = j.at("surface");
    if (s.is_string()) {
      c.surface.surface = s.get<std::string>();
    } else if (s.is_object()) {
      reject_unknown_keys(s, {"surface", "params", "center"}, "surface");
      if (!s.contains("surface")) throw config_error("surface.surface is required");
      c.surface.surface = s.at("surface").get<std::string>();
      if (s.contains("params")) {
        for (auto it = s.at("params").begin(); it != s.at("params").end(); ++it) {
          if (!it.value().is_number())
            throw config_error("surface.params." + it.key() + " must be a number");
          c.surface.params[it.key()] = it.value().get<double>();
        }
      }
      if (s.contains("center")) {
        const json& cc = s.at("center");
        if (!cc.is_array() || cc.size() < 3 || cc.size() > 4)
          throw config_error("surface.center must be an array of 3 or 4 numbers");
        Vec v(int(cc.size()));
        for (int i = 0; i < int(cc.size()); ++i) v[i] = cc.at(i).get<double>();
        c.surface.center = v;
      }
    } else {
      throw config_error("surface must be a string or an object");
    }
  }

  if (j.contains("grid")) {
    const json& g = j.at("grid");
    if (g.is_number_integer()) {
      c.grid = {g.get<int>(), g.get<int>()};
    } else if (g.is_array() && g.size() == 2) {
      c.grid = {g.at(0).get<int>(), g.at(1).get<int>()};
    } else {
      throw config_error("grid must be an integer or a pair of integers");
    }
    if (c.grid[0] < 8 || c.grid[1] < 8)
      throw config_error("grid resolution below minimum (8 per axis)");
  }

  if (j.contains("optimizer")) {
    const json& o = j.at("optimizer");
    reject_unknown_keys(o, {"max_iterations", "tolerance", "restarts", "seed", "search_inversion"},
                        "optimizer");
    if (o.contains("max_iterations")) c.optimizer.max_iterations = o.at("max_iterations").get<int>();
    if (o.contains("tolerance")) c.optimizer.tolerance = o.at("tolerance").get<double>();
    if (o.contains("restarts")) c.optimizer.restarts = o.at("restarts").get<int>();
    if (o.contains("seed")) c.optimizer.seed = o.at("seed").get<std::uint64_t>();
    if (o.contains("search_inversion"))
      c.optimizer.search_inversion = o.at("search_inversion").get<bool>();
    if (c.optimizer.max_iterations < 1) throw config_error("optimizer.max_iterations must be >= 1");
    if (!(c.optimizer.tolerance > 0)) throw config_error("optimizer.tolerance must be > 0");
    if (c.optimizer.restarts < 1) throw config_error("optimizer.restarts must be >= 1");
  }
  c.optimizer.grid = c.grid;

  if (j.contains("model")) c.model = j.at("model").get<std::string>();
  if (j.contains("sweep")) {
    const json& s = j.at("sweep");
    reject_unknown_keys(s, {"family", "epsilons"}, "sweep");
    if (s.contains("family")) c.family = s.at("family").get<std::string>();
    if (s.contains("epsilons")) {
      for (const auto& e : s.at("epsilons")) c.epsilons.push_back(e.get<double>());
    }
  }
  if (j.contains("invert")) c.invert = j.at("invert").get<std::string>();
  if (j.contains("output")) c.output = j.at("output").get<std::string>();
  if (j.contains("workers")) {
    c.workers = j.at("workers").get<int>();
    if (c.workers < 1) throw config_error("workers must be >= 1");
  }
  if (j.contains("tolerances")) {
    for (auto it = j.at("tolerances").begin(); it != j.at("tolerances").end(); ++it)
      c.tolerance_overrides[it.key()] = it.value().get<double>();
  }
  return c;
}

// ---------------------------------------------------------------------------
// Minimal TOML subset: [tables], key = value with strings, numbers, booleans,
// and flat arrays; '#' comments. Enough for the documented schema.
// ---------------------------------------------------------------------------

namespace {

std::string strip(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  std::size_t b = s.find_last_not_of(" \t\r");
  return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

json parse_toml_scalar(const std::string& tok, const std::string& source, int line) {
  if (tok.empty()) throw config_error(source + ":" + std::to_string(line) + ": empty value");
  if (tok.front() == '"') {
    if (tok.size() < 2 || tok.back() != '"')
      throw config_error(source + ":" + std::to_string(line) + ": unterminated string");
    return tok.substr(1, tok.size() - 2);
  }
  if (tok == "true") return true;
  if (tok == "false") return false;
  try {
    std::size_t used = 0;
    if (tok.find('.') == std::string::npos && tok.find('e') == std::string::npos &&
        tok.find('E') == std::string::npos) {
      const long long v = std::stoll(tok, &used);
      if (used == tok.size()) return v;
    }
    const double d = std::stod(tok, &used);
    if (used == tok.size()) return d;
  } catch (...) {
  }
  throw config_error(source + ":" + std::to_string(line) + ": cannot parse value '" + tok + "'");
}

}  // namespace

json toml_subset_to_json(const std::string& text, const std::string& source) {
  json root = json::object();
  json* current = &root;
  std::istringstream in(text);
  std::string rawline;
  int lineno = 0;
  while (std::getline(in, rawline)) {
    ++lineno;
    // strip comments outside strings
    std::string line;
    bool in_str = false;
    for (char ch : rawline) {
      if (ch == '"') in_str = !in_str;
      if (ch == '#' && !in_str) break;
      line += ch;
    }
    line = strip(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw config_error(source + ":" + std::to_string(lineno) + ": malformed table header");
      const std::string name = strip(line.substr(1, line.size() - 2));
      if (name.empty())
        throw config_error(source + ":" + std::to_string(lineno) + ": empty table name");
      current = &root;
      std::size_t pos = 0;
      while (pos != std::string::npos) {
        const std::size_t dot = name.find('.', pos);
        const std::string part =
            strip(dot == std::string::npos ? name.substr(pos) : name.substr(pos, dot - pos));
        json& next = (*current)[part];
        if (next.is_null()) next = json::object();
        current = &next;
        pos = dot == std::string::npos ? std::string::npos : dot + 1;
      }
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw config_error(source + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = strip(line.substr(0, eq));
    const std::string val = strip(line.substr(eq + 1));
    if (key.empty())
      throw config_error(source + ":" + std::to_string(lineno) + ": empty key");
    if (!val.empty() && val.front() == '[') {
      if (val.back() != ']')
        throw config_error(source + ":" + std::to_string(lineno) + ": unterminated array");
      json arr = json::array();
      std::string inner = strip(val.substr(1, val.size() - 2));
      if (!inner.empty()) {
        std::size_t pos = 0;
        while (pos <= inner.size()) {
          std::size_t comma = inner.find(',', pos);
          const std::string tok =
              strip(comma == std::string::npos ? inner.substr(pos) : inner.substr(pos, comma - pos));
          arr.push_back(parse_toml_scalar(tok, source, lineno));
          if (comma == std::string::npos) break;
          pos = comma + 1;
        }
      }
      (*current)[key] = arr;
    } else {
      (*current)[key] = parse_toml_scalar(val, source, lineno);
    }
  }
  return root;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("config file does not exist: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();

  json j;
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".toml") {
    j = toml_subset_to_json(text, path);
  } else {
    try {
      j = json::parse(text);
    } catch (const std::exception& e) {
      throw config_error(path + ": JSON parse error: " + e.what());
    }
  }
  return config_from_json(j, path);
}

}  // namespace wlab
