#include "ranslice/sim_config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace ranslice {

namespace {
constexpr double kOccupiedBandwidthFactor = 0.9;

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument(std::string("SimConfig: ") + name + " must be strictly positive");
  }
}
}  // namespace

int SimConfig::slots_per_ap() const {
  return static_cast<int>(std::lround(ap_duration / slot_duration));
}

int SimConfig::delay_budget_slots() const {
  return static_cast<int>(std::lround(delay_budget / slot_duration));
}

void SimConfig::validate() const {
  require_positive(cell_radius, "cell_radius");
  require_positive(carrier_bandwidth, "carrier_bandwidth");
  require_positive(subcarrier_spacing, "subcarrier_spacing");
  require_positive(slot_duration, "slot_duration");
  require_positive(ap_duration, "ap_duration");
  require_positive(shadowing_sigma, "shadowing_sigma");
  require_positive(fading_sigma, "fading_sigma");
  require_positive(delay_budget, "delay_budget");
  require_positive(static_cast<double>(packet_size), "packet_size");
  if (arrival_rate < 0.0 || !std::isfinite(arrival_rate)) {
    throw std::invalid_argument("SimConfig: arrival_rate must be non-negative");
  }
  if (!(shadowing_rho >= 0.0 && shadowing_rho <= 1.0)) {
    throw std::invalid_argument("SimConfig: shadowing_rho must be in [0,1]");
  }
  if (!std::isfinite(tx_power) || !std::isfinite(noise_psd) || !std::isfinite(noise_figure)) {
    throw std::invalid_argument("SimConfig: link budget terms must be finite");
  }
  const double budget_slots = delay_budget / slot_duration;
  if (std::abs(budget_slots - std::round(budget_slots)) > 1e-9) {
    throw std::invalid_argument("SimConfig: delay_budget must be an integer multiple of slot_duration");
  }
  const double ap_slots = ap_duration / slot_duration;
  if (std::abs(ap_slots - std::round(ap_slots)) > 1e-9) {
    throw std::invalid_argument("SimConfig: ap_duration must be an integer multiple of slot_duration");
  }
  ResourceGrid grid = ResourceGrid::from_config(*this);
  if (grid.n_rbs < 1) {
    throw std::invalid_argument("SimConfig: carrier too narrow for a single RB");
  }
  if (grid.n_rbs * grid.rb_bandwidth > carrier_bandwidth) {
    throw std::invalid_argument("SimConfig: RB grid exceeds carrier bandwidth");
  }
}

ResourceGrid ResourceGrid::from_config(const SimConfig& cfg) {
  ResourceGrid g;
  g.rb_bandwidth = 12.0 * cfg.subcarrier_spacing;
  g.slot_duration = cfg.slot_duration;
  g.n_rbs = static_cast<int>(std::floor(kOccupiedBandwidthFactor * cfg.carrier_bandwidth / g.rb_bandwidth));
  return g;
}

SimConfig sim_config_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("SimConfig: JSON parse error: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("SimConfig: top level must be a JSON object");

  static const std::set<std::string> known = {
      "cell_radius",     "tx_power",        "noise_psd",       "noise_figure",
      "carrier_bandwidth", "subcarrier_spacing", "slot_duration", "ap_duration",
      "pathloss_coeffs", "shadowing_sigma", "shadowing_rho",   "fading_sigma",
      "packet_size",     "arrival_rate",    "delay_budget",    "seed"};
  for (const auto& item : j.items()) {
    if (!known.count(item.key())) {
      throw std::invalid_argument("SimConfig: unknown key '" + item.key() + "'");
    }
  }

  SimConfig cfg;
  auto get = [&](const char* key, auto& out) {
    if (j.contains(key)) out = j.at(key).get<std::decay_t<decltype(out)>>();
  };
  get("cell_radius", cfg.cell_radius);
  get("tx_power", cfg.tx_power);
  get("noise_psd", cfg.noise_psd);
  get("noise_figure", cfg.noise_figure);
  get("carrier_bandwidth", cfg.carrier_bandwidth);
  get("subcarrier_spacing", cfg.subcarrier_spacing);
  get("slot_duration", cfg.slot_duration);
  get("ap_duration", cfg.ap_duration);
  get("shadowing_sigma", cfg.shadowing_sigma);
  get("shadowing_rho", cfg.shadowing_rho);
  get("fading_sigma", cfg.fading_sigma);
  get("packet_size", cfg.packet_size);
  get("arrival_rate", cfg.arrival_rate);
  get("delay_budget", cfg.delay_budget);
  get("seed", cfg.seed);
  if (j.contains("pathloss_coeffs")) {
    const auto& pc = j.at("pathloss_coeffs");
    if (!pc.is_array() || pc.size() != 2) {
      throw std::invalid_argument("SimConfig: pathloss_coeffs must be [intercept_db, slope_db_per_decade]");
    }
    cfg.pathloss_coeffs.intercept_db = pc.at(0).get<double>();
    cfg.pathloss_coeffs.slope_db_per_decade = pc.at(1).get<double>();
  }
  cfg.validate();
  return cfg;
}

SimConfig load_sim_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("SimConfig: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return sim_config_from_json_text(ss.str());
}

std::string sim_config_to_json_text(const SimConfig& cfg) {
  nlohmann::json j;
  j["cell_radius"] = cfg.cell_radius;
  j["tx_power"] = cfg.tx_power;
  j["noise_psd"] = cfg.noise_psd;
  j["noise_figure"] = cfg.noise_figure;
  j["carrier_bandwidth"] = cfg.carrier_bandwidth;
  j["subcarrier_spacing"] = cfg.subcarrier_spacing;
  j["slot_duration"] = cfg.slot_duration;
  j["ap_duration"] = cfg.ap_duration;
  j["pathloss_coeffs"] = {cfg.pathloss_coeffs.intercept_db, cfg.pathloss_coeffs.slope_db_per_decade};
  j["shadowing_sigma"] = cfg.shadowing_sigma;
  j["shadowing_rho"] = cfg.shadowing_rho;
  j["fading_sigma"] = cfg.fading_sigma;
  j["packet_size"] = cfg.packet_size;
  j["arrival_rate"] = cfg.arrival_rate;
  j["delay_budget"] = cfg.delay_budget;
  j["seed"] = cfg.seed;
  return j.dump(2);
}

}  // namespace ranslice
