#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "relaysec/experiment.hpp"

namespace relaysec::experiment {

namespace {

using nlohmann::json;

// JSON has no infinity; an unlimited interference level is written as null.
json db_value(double v) { return std::isinf(v) && v > 0 ? json(nullptr) : json(v); }

double db_from(const json& j, const std::string& key) {
  if (j.is_null()) return std::numeric_limits<double>::infinity();
  if (j.is_string() && (j == "inf" || j == "+inf")) return std::numeric_limits<double>::infinity();
  if (!j.is_number()) throw std::invalid_argument("config key '" + key + "' must be a number");
  return j.get<double>();
}

std::vector<double> db_list(const json& j, const std::string& key) {
  if (!j.is_array()) throw std::invalid_argument("config key '" + key + "' must be an array");
  std::vector<double> out;
  for (const auto& v : j) out.push_back(db_from(v, key));
  return out;
}

template <class T>
T typed(const json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw std::invalid_argument("config key '" + key + "' has the wrong type");
  }
}

} // namespace

std::string to_json(const ExperimentConfig& cfg) {
  json j;
  j["name"] = cfg.name;
  j["relays"] = cfg.relays;
  j["sigma_g"] = cfg.sigma_g;
  j["sigma_h"] = cfg.sigma_h;
  j["sigma_z"] = cfg.sigma_z;
  j["sigma_k"] = cfg.sigma_k;
  j["relay_noise"] = cfg.relay_noise;
  j["dest_noise"] = cfg.dest_noise;
  j["ps_db"] = cfg.ps_db;
  j["pt_over_ps_db_range"] = cfg.pt_over_ps_db_range;
  j["gamma_db"] = db_value(cfg.gamma_db);
  json gammas = json::array();
  for (double g : cfg.gamma_db_range) gammas.push_back(db_value(g));
  j["gamma_db_range"] = gammas;
  j["pt_over_ps_db"] = cfg.pt_over_ps_db;
  j["n_realizations"] = cfg.n_realizations;
  j["seed"] = cfg.seed;
  json schemes = json::array();
  for (Scheme s : cfg.schemes) schemes.push_back(to_string(s));
  j["schemes"] = schemes;
  j["power_mode"] = to_string(cfg.power_mode);
  j["primary_users"] = cfg.primary_users;
  j["eavesdroppers"] = cfg.eavesdroppers;
  j["threads"] = cfg.threads;
  return j.dump(2) + "\n";
}

ExperimentConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");

  ExperimentConfig cfg;
  // A preset supplies the defaults that the remaining keys override.
  if (j.contains("preset")) cfg = ExperimentConfig::preset(typed<std::string>(j["preset"], "preset"));
  for (const auto& [key, v] : j.items()) {
    if (key == "preset") continue;
    else if (key == "name") cfg.name = typed<std::string>(v, key);
    else if (key == "relays") cfg.relays = typed<int>(v, key);
    else if (key == "sigma_g") cfg.sigma_g = typed<double>(v, key);
    else if (key == "sigma_h") cfg.sigma_h = typed<double>(v, key);
    else if (key == "sigma_z") cfg.sigma_z = typed<double>(v, key);
    else if (key == "sigma_k") cfg.sigma_k = typed<double>(v, key);
    else if (key == "relay_noise") cfg.relay_noise = typed<double>(v, key);
    else if (key == "dest_noise") cfg.dest_noise = typed<double>(v, key);
    else if (key == "ps_db") cfg.ps_db = typed<double>(v, key);
    else if (key == "pt_over_ps_db_range") cfg.pt_over_ps_db_range = db_list(v, key);
    else if (key == "gamma_db") cfg.gamma_db = db_from(v, key);
    else if (key == "gamma_db_range") cfg.gamma_db_range = db_list(v, key);
    else if (key == "pt_over_ps_db") cfg.pt_over_ps_db = typed<double>(v, key);
    else if (key == "n_realizations") cfg.n_realizations = typed<int>(v, key);
    else if (key == "seed") cfg.seed = typed<std::uint64_t>(v, key);
    else if (key == "schemes") {
      cfg.schemes.clear();
      for (const auto& s : typed<std::vector<std::string>>(v, key)) {
        const Scheme sc = scheme_from_string(s);
        if (std::find(cfg.schemes.begin(), cfg.schemes.end(), sc) == cfg.schemes.end()) cfg.schemes.push_back(sc);
      }
    }
    else if (key == "power_mode") cfg.power_mode = power_mode_from_string(typed<std::string>(v, key));
    else if (key == "primary_users") cfg.primary_users = typed<int>(v, key);
    else if (key == "eavesdroppers") cfg.eavesdroppers = typed<int>(v, key);
    else if (key == "threads") cfg.threads = typed<int>(v, key);
    else throw std::invalid_argument("unknown config key '" + key + "'");
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open config '" + path.string() + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  try {
    return config_from_json(ss.str());
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

void dump_weights(const std::vector<SweepRow>& rows, const std::filesystem::path& path) {
  json out = json::array();
  for (const auto& row : rows) {
    for (const auto& o : row.outcomes) {
      json e;
      e["sweep_var"] = row.sweep_var;
      e["value"] = db_value(row.value);
      e["realization_index"] = row.realization;
      e["scheme"] = to_string(o.scheme);
      e["status"] = to_string(o.failure);
      json w = json::array();
      for (Index i = 0; i < o.w.size(); ++i) w.push_back({o.w[i].real(), o.w[i].imag()});
      e["w"] = w;
      out.push_back(e);
    }
  }
  std::ofstream f(path);
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
  f << out.dump(1) << "\n";
  if (!f) throw IoError("write to '" + path.string() + "' failed");
}

} // namespace relaysec::experiment
