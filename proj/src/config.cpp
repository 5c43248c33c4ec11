// SPDX-License-Identifier: Apache-2.0

#include "sensreg/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include <json.hpp>

#include "sensreg/errors.hpp"

namespace sensreg {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ValidationError("config field '" + field + "': " + what);
}

void reject_unknown(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) fail(where, "expected an object");
  for (const auto& [key, _] : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      fail(where.empty() ? key : where + "." + key, "unknown key");
    }
  }
}

const json& require(const json& obj, const std::string& where, const char* key) {
  if (!obj.contains(key)) fail(where.empty() ? key : where + "." + key, "missing");
  return obj.at(key);
}

double number(const json& v, const std::string& field) {
  if (!v.is_number()) fail(field, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(field, "must be finite");
  return d;
}

double non_negative(const json& v, const std::string& field) {
  const double d = number(v, field);
  if (d < 0.0) fail(field, "must be non-negative");
  return d;
}

std::pair<double, double> pair_of(const json& v, const std::string& field) {
  if (!v.is_array() || v.size() != 2) fail(field, "expected a two-element array");
  return {number(v[0], field + "[0]"), number(v[1], field + "[1]")};
}

// Reads exactly one of `<base>_km` / `<base>_m` and returns meters.
template <typename Reader>
auto length_field(const json& obj, const std::string& where, const std::string& base, Reader read) {
  const bool km = obj.contains(base + "_km");
  const bool m = obj.contains(base + "_m");
  if (km == m) fail(where + "." + base + "_km", km ? "give either _km or _m, not both" : "missing");
  const std::string key = base + (km ? "_km" : "_m");
  return read(obj.at(key), where + "." + key, km ? 1000.0 : 1.0);
}

SensorConfig parse_sensor(const json& s, const std::string& where) {
  reject_unknown(s, where,
                 {"id", "position_km", "position_m", "period_s", "offset_s", "range_bias_km", "range_bias_m",
                  "azimuth_bias_deg"});
  SensorConfig cfg;
  const json& id = require(s, where, "id");
  if (!id.is_number_integer()) fail(where + ".id", "expected an integer");
  cfg.id = id.get<int>();
  const auto [px, py] = length_field(s, where, "position", [](const json& v, const std::string& f, double scale) {
    const auto p = pair_of(v, f);
    return std::pair{p.first * scale, p.second * scale};
  });
  cfg.position = {px, py};
  cfg.period_s = number(require(s, where, "period_s"), where + ".period_s");
  if (!(cfg.period_s > 0.0)) fail(where + ".period_s", "must be positive");
  cfg.offset_s = s.contains("offset_s") ? non_negative(s.at("offset_s"), where + ".offset_s") : 0.0;
  cfg.true_range_bias_m = length_field(s, where, "range_bias", [](const json& v, const std::string& f, double scale) {
    return number(v, f) * scale;
  });
  cfg.true_azimuth_bias_rad =
      deg_to_rad(number(require(s, where, "azimuth_bias_deg"), where + ".azimuth_bias_deg"));
  return cfg;
}

NoisePoint parse_noise(const json& n, const std::string& where) {
  reject_unknown(n, where, {"sigma_rho_m", "sigma_phi_deg", "q_m2ps3"});
  NoisePoint p;
  p.sigma_rho_m = non_negative(require(n, where, "sigma_rho_m"), where + ".sigma_rho_m");
  p.sigma_phi_rad = deg_to_rad(non_negative(require(n, where, "sigma_phi_deg"), where + ".sigma_phi_deg"));
  p.q = non_negative(require(n, where, "q_m2ps3"), where + ".q_m2ps3");
  return p;
}

void parse_bcd(const json& b, BcdConfig& cfg) {
  reject_unknown(b, "bcd", {"max_iters", "rel_obj_tol", "rank_ratio", "sdp_tol", "sdp_max_iter", "azimuth_solver"});
  if (b.contains("max_iters")) {
    if (!b.at("max_iters").is_number_integer() || b.at("max_iters").get<int>() < 1) {
      fail("bcd.max_iters", "expected a positive integer");
    }
    cfg.max_iters = b.at("max_iters").get<int>();
  }
  auto positive = [&](const char* key, double& out) {
    if (!b.contains(key)) return;
    out = number(b.at(key), std::string("bcd.") + key);
    if (!(out > 0.0)) fail(std::string("bcd.") + key, "must be positive");
  };
  positive("rel_obj_tol", cfg.rel_obj_tol);
  positive("rank_ratio", cfg.sdr.rank_ratio);
  positive("sdp_tol", cfg.sdr.sdp.tol);
  if (b.contains("sdp_max_iter")) {
    if (!b.at("sdp_max_iter").is_number_integer() || b.at("sdp_max_iter").get<int>() < 1) {
      fail("bcd.sdp_max_iter", "expected a positive integer");
    }
    cfg.sdr.sdp.max_iter = b.at("sdp_max_iter").get<int>();
  }
  if (b.contains("azimuth_solver")) {
    if (!b.at("azimuth_solver").is_string()) fail("bcd.azimuth_solver", "expected a string");
    try {
      cfg.azimuth_solver = parse_azimuth_solver(b.at("azimuth_solver").get<std::string>());
    } catch (const ValidationError& e) {
      fail("bcd.azimuth_solver", e.what());
    }
  }
}

int line_of_offset(const std::string& text, std::size_t byte) {
  const auto end = text.begin() + static_cast<std::ptrdiff_t>(std::min(byte, text.size()));
  return 1 + static_cast<int>(std::count(text.begin(), end, '\n'));
}

}  // namespace

const char* to_string(Estimator e) {
  switch (e) {
    case Estimator::bcd_sdr:
      return "bcd-sdr";
    case Estimator::bcd_gp:
      return "bcd-gp";
    case Estimator::two_stage:
      return "two-stage";
  }
  return "unknown";
}

Estimator parse_estimator(const std::string& name) {
  if (name == "bcd-sdr") return Estimator::bcd_sdr;
  if (name == "bcd-gp") return Estimator::bcd_gp;
  if (name == "two-stage") return Estimator::two_stage;
  throw ValidationError("unknown estimator '" + name + "' (expected bcd-sdr, bcd-gp or two-stage)");
}

Scenario ExperimentConfig::scenario_at(const NoisePoint& noise) const {
  Scenario s = scenario;
  s.target.position_var_m2 = position_var_m2.value_or(10.0 * noise.q);
  s.target.velocity_var_m2ps2 = velocity_var_m2ps2.value_or(noise.q);
  return s;
}

ExperimentConfig parse_config(const std::string& json_text, const std::string& source) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(source + ":" + std::to_string(line_of_offset(json_text, e.byte)) + ": " + e.what());
  }

  reject_unknown(root, "",
                 {"scenario", "noise_grid", "num_runs", "base_seed", "estimators", "bcd", "threads", "output_dir"});
  ExperimentConfig cfg;

  const json& sc = require(root, "", "scenario");
  reject_unknown(sc, "scenario", {"horizon_s", "sensors", "target"});
  cfg.scenario.horizon_s = number(require(sc, "scenario", "horizon_s"), "scenario.horizon_s");
  if (!(cfg.scenario.horizon_s > 0.0)) fail("scenario.horizon_s", "must be positive");

  const json& sensors = require(sc, "scenario", "sensors");
  if (!sensors.is_array() || sensors.empty()) fail("scenario.sensors", "expected a non-empty array");
  std::set<int> ids;
  for (std::size_t i = 0; i < sensors.size(); ++i) {
    const std::string where = "scenario.sensors[" + std::to_string(i) + "]";
    auto s = parse_sensor(sensors[i], where);
    if (!ids.insert(s.id).second) fail(where + ".id", "duplicate sensor id " + std::to_string(s.id));
    cfg.scenario.sensors.push_back(s);
  }
  std::sort(cfg.scenario.sensors.begin(), cfg.scenario.sensors.end(),
            [](const SensorConfig& a, const SensorConfig& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < cfg.scenario.sensors.size(); ++i) {
    if (cfg.scenario.sensors[i].id != static_cast<int>(i) + 1) {
      fail("scenario.sensors", "ids must be exactly 1..M");
    }
    if (!(cfg.scenario.horizon_s > cfg.scenario.sensors[i].offset_s)) {
      fail("scenario.horizon_s", "must exceed every sensor offset");
    }
  }

  const json& tg = require(sc, "scenario", "target");
  reject_unknown(tg, "scenario.target",
                 {"initial_position_km", "initial_position_m", "velocity_mps", "position_var_m2",
                  "velocity_var_m2ps2"});
  const auto [tx, ty] =
      length_field(tg, "scenario.target", "initial_position", [](const json& v, const std::string& f, double k) {
        const auto p = pair_of(v, f);
        return std::pair{p.first * k, p.second * k};
      });
  cfg.scenario.target.mean_position = {tx, ty};
  const auto [vx, vy] = pair_of(require(tg, "scenario.target", "velocity_mps"), "scenario.target.velocity_mps");
  cfg.scenario.target.mean_velocity = Velocity(vx, vy);
  if (tg.contains("position_var_m2")) {
    cfg.position_var_m2 = non_negative(tg.at("position_var_m2"), "scenario.target.position_var_m2");
  }
  if (tg.contains("velocity_var_m2ps2")) {
    cfg.velocity_var_m2ps2 = non_negative(tg.at("velocity_var_m2ps2"), "scenario.target.velocity_var_m2ps2");
  }

  const json& grid = require(root, "", "noise_grid");
  if (!grid.is_array() || grid.empty()) fail("noise_grid", "expected a non-empty array");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    cfg.noise_grid.push_back(parse_noise(grid[i], "noise_grid[" + std::to_string(i) + "]"));
  }

  if (root.contains("num_runs")) {
    const json& n = root.at("num_runs");
    if (!n.is_number_integer() || n.get<long long>() < 1) fail("num_runs", "expected an integer >= 1");
    cfg.num_runs = n.get<int>();
  }
  if (root.contains("base_seed")) {
    const json& s = root.at("base_seed");
    if (!s.is_number_integer() || s.get<long long>() < 0) fail("base_seed", "expected a non-negative integer");
    cfg.base_seed = s.get<std::uint64_t>();
  }
  if (root.contains("estimators")) {
    const json& e = root.at("estimators");
    if (!e.is_array() || e.empty()) fail("estimators", "expected a non-empty array");
    cfg.estimators.clear();
    for (const auto& name : e) {
      if (!name.is_string()) fail("estimators", "expected strings");
      try {
        const auto est = parse_estimator(name.get<std::string>());
        if (std::find(cfg.estimators.begin(), cfg.estimators.end(), est) != cfg.estimators.end()) {
          fail("estimators", "duplicate estimator '" + name.get<std::string>() + "'");
        }
        cfg.estimators.push_back(est);
      } catch (const ValidationError& ex) {
        if (std::string(ex.what()).rfind("config field", 0) == 0) throw;
        fail("estimators", ex.what());
      }
    }
  }
  if (root.contains("bcd")) parse_bcd(root.at("bcd"), cfg.bcd);
  if (root.contains("threads")) {
    const json& t = root.at("threads");
    if (!t.is_number_integer() || t.get<int>() < 0) fail("threads", "expected a non-negative integer");
    cfg.threads = t.get<int>();
  }
  if (root.contains("output_dir")) {
    if (!root.at("output_dir").is_string()) fail("output_dir", "expected a string");
    cfg.output_dir = root.at("output_dir").get<std::string>();
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError("cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str(), path);
}

}  // namespace sensreg
