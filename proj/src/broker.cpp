#include "ranslice/broker.hpp"

#include <cmath>
#include <stdexcept>

namespace ranslice {

void SliceRequest::validate() const {
  if (!(b >= kActionLow && b <= kActionHigh)) {
    throw std::invalid_argument("SliceRequest: b outside [0.1, 0.9]");
  }
}

Observation Observation::initial(int k_worst) {
  Observation obs;
  obs.worst_cqis.assign(k_worst, 1.0);
  return obs;
}

std::vector<double> Observation::to_vector() const {
  std::vector<double> v;
  v.reserve(2 + worst_cqis.size());
  v.push_back(max_buffer);
  v.push_back(traffic);
  v.insert(v.end(), worst_cqis.begin(), worst_cqis.end());
  return v;
}

double default_traffic_norm(const SimConfig& sim, double n_vehicles_mean) {
  return sim.arrival_rate * n_vehicles_mean * sim.packet_size * sim.ap_duration * 2.0;
}

std::vector<int> apply_request(const SliceRequest& req, const ResourceGrid& grid) {
  req.validate();
  int n = static_cast<int>(std::lround(req.b * grid.n_rbs));
  n = std::max(1, std::min(n, grid.n_rbs));
  std::vector<int> pool(n);
  for (int i = 0; i < n; ++i) pool[i] = i;
  return pool;
}

bool check_qos(const ApReport& report, double delay_budget_s) {
  return report.n_dropped == 0 && report.max_delay <= delay_budget_s;
}

double compute_reward(const SliceRequest& req, bool qos_ok) {
  req.validate();
  return qos_ok ? 1.0 - req.b : -1.0;
}

}  // namespace ranslice
