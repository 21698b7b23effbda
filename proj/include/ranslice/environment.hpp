#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "ranslice/broker.hpp"
#include "ranslice/channel.hpp"
#include "ranslice/mac.hpp"
#include "ranslice/mobility.hpp"
#include "ranslice/rng.hpp"
#include "ranslice/sim_config.hpp"

namespace ranslice {

// Test hook: everything the MAC layer consumed and produced in one slot.
struct SlotObservation {
  int64_t slot = 0;
  std::vector<int> arrival_counts;  // per queue index
  RateMatrix rates;
  SlotAllocation alloc;
  SlotReport report;
};
using SlotObserver = std::function<void(const SlotObservation&)>;

// Single-cell downlink environment for one slice. All randomness is
// drawn through counter-based keys of (seed, stream, vehicle, slot/ap),
// so a copied instance replays the exact same noise: snapshot/restore
// is plain value copy, and candidate actions replayed from the same
// snapshot share their random numbers.
class Environment {
 public:
  Environment(const SimConfig& cfg, const ObsConfig& obs_cfg, MobilityTrace trace, uint64_t seed);

  // Advances exactly one allocation period under the granted RB pool.
  // n_slots_override (> 0) shortens the period; test use only.
  // abort_on_drop stops at the first dropped packet — the period is
  // already failed then — and is only for throwaway probe copies.
  std::pair<Observation, ApReport> run_ap(const std::vector<int>& pool, int n_slots_override = -1,
                                          const SlotObserver& observer = nullptr,
                                          bool abort_on_drop = false);

  // Exact byte volume the coming AP will generate, without advancing
  // state. This is the "perfect prediction" the heuristic policy gets.
  int64_t peek_next_ap_arrival_bytes() const;

  uint64_t state_hash() const;

  int ap_index() const { return ap_; }
  int max_aps() const { return trace_->n_seconds(); }
  const SimConfig& cfg() const { return cfg_; }
  const ObsConfig& obs_cfg() const { return obs_cfg_; }
  const ResourceGrid& grid() const { return grid_; }
  const std::vector<UserQueue>& queues() const { return queues_; }
  const std::vector<VehicleState>& vehicles() const { return vehicles_; }

 private:
  void advance_mobility_and_channel();

  SimConfig cfg_;
  ResourceGrid grid_;
  ObsConfig obs_cfg_;
  std::shared_ptr<const MobilityTrace> trace_;  // immutable, shared across snapshots
  CounterRng rng_;

  int ap_ = 0;  // index of the next AP to run
  // parallel arrays, sorted by vehicle id
  std::vector<VehicleState> vehicles_;
  std::vector<UserQueue> queues_;
  std::vector<double> slow_sinr_db_;
  std::vector<int> cqi_;
  std::vector<int64_t> occupancy_;  // bytes, tracked incrementally
  std::vector<int> attach_ap_;      // AP at which the vehicle attached

  // rate = rb_bandwidth * log2(1 + 10^(d/10)) tabulated over d in dB;
  // shared so snapshots copy a pointer, not the table
  std::shared_ptr<const std::vector<double>> rate_table_;
  double rate_from_db(double total_db) const;

  // scratch reused across slots
  RateMatrix rates_scratch_;
};

}  // namespace ranslice
