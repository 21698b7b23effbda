#pragma once

#include <cstdint>
#include <deque>
#include <vector>

namespace ranslice {

struct Packet {
  int owner = 0;           // vehicle_id
  int size = 0;            // bytes
  int64_t arrival_slot = 0;
  int remaining = 0;       // bytes left to serve
};

struct UserQueue {
  int owner = 0;
  std::deque<Packet> packets;        // FIFO by arrival_slot
  int64_t served_bytes_total = 0;
  double avg_rate = 0.0;             // bit/s, exponentially smoothed, diagnostics only

  int64_t occupancy_bytes() const {
    int64_t sum = 0;
    for (const auto& p : packets) sum += p.remaining;
    return sum;
  }
  bool backlogged() const { return !packets.empty(); }
};

// Per-user achievable rates on each RB of the granted pool.
// rates[u][k] is user u's rate (bit/s) on pool position k.
struct RateMatrix {
  std::vector<std::vector<double>> rates;
};

// owner_by_pool_pos[k] is the queue index served on pool position k, or
// -1 when the RB is left unassigned.
struct SlotAllocation {
  std::vector<int> owner_by_pool_pos;
};

struct DeliveredPacket {
  Packet packet;
  int delay_slots = 0;
};

struct DroppedPacket {
  Packet packet;
  int age_slots = 0;
};

struct SlotReport {
  std::vector<int64_t> served_bytes;  // per queue index
  std::vector<DeliveredPacket> delivered;
  std::vector<DroppedPacket> dropped;
};

// Throughput-to-Average metric: this RB's achievable rate over the
// user's mean achievable rate across the pool. Degenerate zero mean
// maps to 0.
double tta_metric(double rb_rate, double user_mean_rate_over_rbs);

// Greedy per-RB rule: each RB in the pool goes to the backlogged user
// maximizing the TTA metric on it, ties broken by lowest vehicle_id.
// RBs with no backlogged user stay unassigned.
SlotAllocation schedule_slot(const std::vector<UserQueue>& queues, int pool_size,
                             const RateMatrix& rates);

// Drains each user's FIFO by floor(sum of assigned RB rates *
// slot_duration / 8) bytes. Before service, head packets older than the
// delay budget are dropped and recorded; a packet whose last byte is
// served this slot is delivered with delay = slot - arrival_slot + 1.
SlotReport serve_queues(const SlotAllocation& alloc, std::vector<UserQueue>& queues,
                        const RateMatrix& rates, int64_t slot, double slot_duration,
                        int delay_budget_slots);

constexpr double kAvgRateSmoothing = 0.1;  // per-slot EWMA constant

}  // namespace ranslice
