#pragma once

#include <string>

#include "ranslice/environment.hpp"

namespace ranslice {

struct PolicySpec {
  enum class Kind { Fixed, Heuristic, Ddpg, Oracle };

  Kind kind = Kind::Fixed;
  double b0 = 0.9;           // fixed
  double weight = 1.0;       // heuristic scale; also reused by sweeps
  double t_ref_bytes = 0.0;  // heuristic reference volume, 0 = derive
  std::string checkpoint;    // ddpg actor
  double grid_step = 0.01;   // oracle scan resolution

  static Kind parse_kind(const std::string& name);
  static std::string kind_name(Kind kind);
  void validate() const;
};

double fixed_policy(double b0);

// b proportional to the (perfectly predicted) traffic of the coming AP.
double heuristic_policy(double next_ap_traffic_bytes, double weight, double t_ref_bytes);

// Default heuristic reference: bytes the whole grid can serve in one AP
// at mid-table (CQI 7) spectral efficiency.
double default_t_ref_bytes(const SimConfig& cfg, const ResourceGrid& grid);

struct OracleResult {
  double b = kActionHigh;
  bool feasible = false;  // false when even the top of the grid fails
  Observation obs;        // from the committed period
  ApReport report;
};

// Minimum-bandwidth scan for the coming AP: candidates ascend the grid
// {lo, lo+step, ..., hi}, each replayed from a snapshot of env under
// identical noise, stopping at the first b that satisfies QoS. env is
// then advanced once with the winner. A state-hash mismatch after the
// scan (the snapshot leaking writes into env) is a hard fault.
OracleResult oracle_search(Environment& env, double grid_step);

}  // namespace ranslice
