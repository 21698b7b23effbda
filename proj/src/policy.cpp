#include "ranslice/policy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ranslice/channel.hpp"

namespace ranslice {

PolicySpec::Kind PolicySpec::parse_kind(const std::string& name) {
  if (name == "fixed") return Kind::Fixed;
  if (name == "heuristic") return Kind::Heuristic;
  if (name == "ddpg") return Kind::Ddpg;
  if (name == "oracle") return Kind::Oracle;
  throw std::invalid_argument("PolicySpec: unknown kind '" + name + "'");
}

std::string PolicySpec::kind_name(Kind kind) {
  switch (kind) {
    case Kind::Fixed: return "fixed";
    case Kind::Heuristic: return "heuristic";
    case Kind::Ddpg: return "ddpg";
    case Kind::Oracle: return "oracle";
  }
  throw std::logic_error("PolicySpec: bad kind enum");
}

void PolicySpec::validate() const {
  if (kind == Kind::Fixed && !(b0 >= kActionLow && b0 <= kActionHigh)) {
    throw std::invalid_argument("PolicySpec: b0 out of action range");
  }
  if (kind == Kind::Heuristic && !(weight > 0.0)) {
    throw std::invalid_argument("PolicySpec: heuristic weight must be positive");
  }
  if (kind == Kind::Heuristic && t_ref_bytes < 0.0) {
    throw std::invalid_argument("PolicySpec: t_ref must be >= 0 (0 = derive)");
  }
  if (kind == Kind::Oracle) {
    if (!(grid_step > 0.0)) throw std::invalid_argument("PolicySpec: grid_step must be positive");
    const double n = (kActionHigh - kActionLow) / grid_step;
    if (std::abs(n - std::round(n)) > 1e-9) {
      throw std::invalid_argument("PolicySpec: grid_step must divide the action range");
    }
  }
}

double fixed_policy(double b0) { return b0; }

double heuristic_policy(double next_ap_traffic_bytes, double weight, double t_ref_bytes) {
  if (!(t_ref_bytes > 0.0)) throw std::invalid_argument("heuristic_policy: t_ref must be positive");
  return std::clamp(weight * next_ap_traffic_bytes / t_ref_bytes, kActionLow, kActionHigh);
}

double default_t_ref_bytes(const SimConfig& cfg, const ResourceGrid& grid) {
  const double cqi7_db = cqi_thresholds_db()[6];
  const double eff = std::log2(1.0 + db_to_linear(cqi7_db));  // bit/s/Hz
  return grid.n_rbs * grid.rb_bandwidth * eff * cfg.ap_duration / 8.0;
}

OracleResult oracle_search(Environment& env, double grid_step) {
  if (!(grid_step > 0.0)) throw std::invalid_argument("oracle_search: grid_step must be positive");
  const double span = kActionHigh - kActionLow;
  const int n_steps = static_cast<int>(std::round(span / grid_step));
  if (std::abs(n_steps * grid_step - span) > 1e-9 || n_steps < 1) {
    throw std::invalid_argument("oracle_search: grid_step must divide the action range");
  }

  const uint64_t pre_hash = env.state_hash();
  OracleResult out;
  for (int i = 0; i <= n_steps; ++i) {
    const double b = kActionLow + span * i / n_steps;
    Environment trial = env;  // full snapshot, shares only immutable data
    const std::vector<int> pool = apply_request({b}, env.grid());
    const ApReport rep = trial.run_ap(pool, -1, nullptr, /*abort_on_drop=*/true).second;
    if (rep.qos_ok) {
      out.b = b;
      out.feasible = true;
      break;
    }
  }
  if (env.state_hash() != pre_hash) {
    throw std::runtime_error("oracle_search: environment mutated during candidate scan");
  }

  const std::vector<int> pool = apply_request({out.b}, env.grid());
  std::tie(out.obs, out.report) = env.run_ap(pool);
  return out;
}

}  // namespace ranslice
