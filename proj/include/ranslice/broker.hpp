#pragma once

#include <vector>

#include "ranslice/sim_config.hpp"

namespace ranslice {

constexpr double kActionLow = 0.1;
constexpr double kActionHigh = 0.9;

// Fraction of the maximum bandwidth requested for one allocation period.
struct SliceRequest {
  double b = kActionLow;

  void validate() const;
};

// What the tenant sees at the end of an allocation period. Everything
// is normalized to [0,1]; worst_cqis is ascending and padded with 1.0
// when fewer than K users are attached, so absence of users never looks
// like bad radio.
struct Observation {
  double max_buffer = 0.0;
  double traffic = 0.0;
  std::vector<double> worst_cqis;

  static Observation initial(int k_worst);
  std::vector<double> to_vector() const;  // [max_buffer, traffic, worst_cqis...]
  int dim() const { return 2 + static_cast<int>(worst_cqis.size()); }
};

struct ObsConfig {
  double buffer_norm_bytes = 3200.0;   // 100 packets of 32 B per user
  double traffic_norm_bytes = 0.0;     // 0 = derive from sim + mean population
  int k_worst = 5;
};

double default_traffic_norm(const SimConfig& sim, double n_vehicles_mean);

// Infrastructure-side ground truth for one allocation period.
struct ApReport {
  bool qos_ok = false;
  double max_delay = 0.0;        // s, over packets delivered in this AP
  int64_t n_delivered = 0;
  int64_t n_dropped = 0;
  int64_t served_bytes = 0;
  int64_t arrived_bytes = 0;
  int rb_pool_size = 0;
};

// The first round(b * n_rbs) RBs, at least 1; fixed for the whole AP.
// Out-of-range requests are rejected here, before the environment.
std::vector<int> apply_request(const SliceRequest& req, const ResourceGrid& grid);

bool check_qos(const ApReport& report, double delay_budget_s);

// 1 - b on QoS success, -1 otherwise.
double compute_reward(const SliceRequest& req, bool qos_ok);

}  // namespace ranslice
