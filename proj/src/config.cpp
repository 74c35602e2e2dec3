#include "parastab/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>

#include <json.hpp>

namespace parastab {

using nlohmann::json;

bool RunConfig::operator==(const RunConfig& other) const {
  auto windows_equal = [](const std::vector<Window>& a, const std::vector<Window>& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i) {
      if (a[i].begin != b[i].begin || a[i].end != b[i].end) return false;
    }
    return true;
  };
  return scenario == other.scenario && preset == other.preset && n_nodes == other.n_nodes &&
         bc == other.bc && nu == other.nu && actuator_count == other.actuator_count &&
         support_ratio == other.support_ratio && lambda == other.lambda &&
         k_values == other.k_values && dt == other.dt && T == other.T &&
         record_every == other.record_every && windows_equal(feed_on, other.feed_on) &&
         contact_eps == other.contact_eps && out_dir == other.out_dir;
}

RunConfig config_from_scenario(const Scenario& s) {
  RunConfig c;
  c.scenario = s.name;
  c.preset = s.preset;
  c.n_nodes = s.n_nodes;
  c.bc = (s.bc == Bc::NeumannHomogeneous) ? "neumann" : "dirichlet";
  c.nu = s.nu;
  c.actuator_count = s.actuator_count;
  c.support_ratio = s.support_ratio;
  c.lambda = s.lambda;
  c.k_values = s.k_values;
  c.dt = s.dt;
  c.T = s.T;
  c.record_every = s.record_every;
  c.feed_on = s.feed_on;
  c.contact_eps = s.contact_eps;
  return c;
}

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "scenario",   "preset",       "n_nodes",   "bc",          "nu",
      "M",          "support_ratio", "lambda",    "k",           "dt",
      "T",          "record_every", "feed_on",   "contact_eps", "out_dir"};
  return keys;
}

void validate(const RunConfig& c) {
  if (c.scenario != "default" && c.scenario != "nonsmooth") {
    throw ConfigError("unknown scenario: " + c.scenario);
  }
  if (c.preset != "smooth" && c.preset != "nonsmooth") {
    throw ConfigError("unknown coefficient preset: " + c.preset);
  }
  if (c.bc != "neumann" && c.bc != "dirichlet") {
    throw ConfigError("bc must be \"neumann\" or \"dirichlet\"");
  }
  if (c.n_nodes < 3) throw ConfigError("n_nodes must be >= 3");
  if (!(c.nu > 0.0)) throw ConfigError("nu must be positive");
  if (c.actuator_count < 1) throw ConfigError("M must be >= 1");
  if (!(c.support_ratio > 0.0 && c.support_ratio < 1.0)) {
    throw ConfigError("support_ratio must lie in (0,1)");
  }
  if (!(c.lambda > 0.0)) throw ConfigError("lambda must be positive");
  if (c.k_values.empty()) throw ConfigError("k must contain at least one value");
  for (double k : c.k_values) {
    if (!(k > 0.0)) throw ConfigError("k values must be positive");
  }
  if (!(c.dt > 0.0)) throw ConfigError("dt must be positive");
  if (!(c.T > 0.0)) throw ConfigError("T must be positive");
  if (c.record_every < 1) throw ConfigError("record_every must be >= 1");
  if (!(c.contact_eps > 0.0)) throw ConfigError("contact_eps must be positive");
  for (const Window& w : c.feed_on) {
    if (w.begin < 0.0 || w.end > c.T || w.begin > w.end) {
      throw ConfigError("feed_on windows must satisfy 0 <= begin <= end <= T");
    }
  }
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config root must be a JSON object");
  for (const auto& item : doc.items()) {
    if (known_keys().count(item.key()) == 0) {
      throw ConfigError("unknown config key: " + item.key());
    }
  }

  const std::string scenario_name = doc.value("scenario", std::string("default"));
  Scenario base;
  if (scenario_name == "default") {
    base = scenario_default();
  } else if (scenario_name == "nonsmooth") {
    base = scenario_nonsmooth();
  } else {
    throw ConfigError("unknown scenario: " + scenario_name);
  }
  RunConfig c = config_from_scenario(base);

  try {
    if (doc.contains("preset")) c.preset = doc.at("preset").get<std::string>();
    if (doc.contains("n_nodes")) c.n_nodes = doc.at("n_nodes").get<int>();
    if (doc.contains("bc")) c.bc = doc.at("bc").get<std::string>();
    if (doc.contains("nu")) c.nu = doc.at("nu").get<double>();
    if (doc.contains("M")) c.actuator_count = doc.at("M").get<int>();
    if (doc.contains("support_ratio")) c.support_ratio = doc.at("support_ratio").get<double>();
    if (doc.contains("lambda")) c.lambda = doc.at("lambda").get<double>();
    if (doc.contains("k")) {
      c.k_values.clear();
      if (doc.at("k").is_array()) {
        for (const auto& v : doc.at("k")) c.k_values.push_back(v.get<double>());
      } else {
        c.k_values.push_back(doc.at("k").get<double>());
      }
    }
    if (doc.contains("dt")) c.dt = doc.at("dt").get<double>();
    if (doc.contains("T")) c.T = doc.at("T").get<double>();
    if (doc.contains("record_every")) c.record_every = doc.at("record_every").get<int>();
    if (doc.contains("feed_on")) {
      c.feed_on.clear();
      for (const auto& w : doc.at("feed_on")) {
        if (!w.is_array() || w.size() != 2) {
          throw ConfigError("feed_on must be a list of [begin, end] pairs");
        }
        c.feed_on.push_back(Window{w.at(0).get<double>(), w.at(1).get<double>()});
      }
    }
    if (doc.contains("contact_eps")) c.contact_eps = doc.at("contact_eps").get<double>();
    if (doc.contains("out_dir")) c.out_dir = doc.at("out_dir").get<std::string>();
  } catch (const ConfigError&) {
    throw;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config value has wrong type: ") + e.what());
  }

  // a "default" scenario whose T changed needs its feed window refreshed when
  // the window was not set explicitly
  if (!doc.contains("feed_on") && doc.contains("T")) {
    c.feed_on = {{0.0, c.T}};
  }
  validate(c);
  return c;
}

RunConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_config(text);
}

std::string serialize(const RunConfig& c) {
  json doc;
  doc["scenario"] = c.scenario;
  doc["preset"] = c.preset;
  doc["n_nodes"] = c.n_nodes;
  doc["bc"] = c.bc;
  doc["nu"] = c.nu;
  doc["M"] = c.actuator_count;
  doc["support_ratio"] = c.support_ratio;
  doc["lambda"] = c.lambda;
  doc["k"] = c.k_values;
  doc["dt"] = c.dt;
  doc["T"] = c.T;
  doc["record_every"] = c.record_every;
  json windows = json::array();
  for (const Window& w : c.feed_on) windows.push_back({w.begin, w.end});
  doc["feed_on"] = windows;
  doc["contact_eps"] = c.contact_eps;
  doc["out_dir"] = c.out_dir;
  return doc.dump(2) + "\n";
}

Scenario to_scenario(const RunConfig& c) {
  validate(c);
  Scenario s;
  s.name = c.scenario;
  s.preset = c.preset;
  s.n_nodes = c.n_nodes;
  s.bc = (c.bc == "neumann") ? Bc::NeumannHomogeneous : Bc::DirichletHomogeneous;
  s.nu = c.nu;
  s.actuator_count = c.actuator_count;
  s.support_ratio = c.support_ratio;
  s.lambda = c.lambda;
  s.k_values = c.k_values;
  s.dt = c.dt;
  s.T = c.T;
  s.record_every = c.record_every;
  s.feed_on = c.feed_on;
  s.contact_eps = c.contact_eps;
  for (double k : c.k_values) {
    const double tightened = s.tightened_dt(k);
    if (tightened != s.dt) {
      std::fprintf(stderr, "warning: dt = %.3g tightened to %.3g for k = %.5g (dt*k < 2)\n",
                   s.dt, tightened, k);
    }
  }
  return s;
}

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest) {
  json doc;
  doc["config"] = json::parse(serialize(manifest.config));
  doc["version"] = manifest.version;
  doc["command"] = manifest.command;
  doc["wall_seconds"] = manifest.wall_seconds;
  doc["outputs"] = manifest.outputs;
  doc["dt_used"] = manifest.dt_used;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write manifest: " + tmp.string());
    out << doc.dump(2) << "\n";
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace parastab
