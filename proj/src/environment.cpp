#include "ranslice/environment.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace ranslice {

namespace {

constexpr double kRateTableLoDb = -80.0;
constexpr double kRateTableHiDb = 80.0;
constexpr double kRateTableStepDb = 0.05;
constexpr double kLog2Of10Over10 = 0.33219280948873623;  // log2(10)/10

std::shared_ptr<const std::vector<double>> build_rate_table(double rb_bandwidth) {
  const int n = static_cast<int>(std::lround((kRateTableHiDb - kRateTableLoDb) / kRateTableStepDb)) + 1;
  auto table = std::make_shared<std::vector<double>>(n);
  for (int i = 0; i < n; ++i) {
    const double db = kRateTableLoDb + i * kRateTableStepDb;
    (*table)[i] = shannon_rate(rb_bandwidth, db_to_linear(db));
  }
  return table;
}

inline void hash_u64(uint64_t& h, uint64_t v) {
  // FNV-1a over the 8 bytes
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xff;
    h *= 0x100000001b3ull;
  }
}

inline void hash_double(uint64_t& h, double v) { hash_u64(h, std::bit_cast<uint64_t>(v)); }

}  // namespace

Environment::Environment(const SimConfig& cfg, const ObsConfig& obs_cfg, MobilityTrace trace,
                         uint64_t seed)
    : cfg_(cfg),
      grid_(ResourceGrid::from_config(cfg)),
      obs_cfg_(obs_cfg),
      trace_(std::make_shared<MobilityTrace>(std::move(trace))),
      rng_(seed) {
  cfg_.validate();
  if (obs_cfg_.traffic_norm_bytes <= 0.0) {
    throw std::invalid_argument("Environment: traffic_norm_bytes must be resolved before construction");
  }
  rate_table_ = build_rate_table(grid_.rb_bandwidth);
}

double Environment::rate_from_db(double total_db) const {
  if (total_db >= kRateTableHiDb) {
    // log2(1+x) ~ log2(x) up to 1e-8 relative in this region
    return grid_.rb_bandwidth * total_db * kLog2Of10Over10;
  }
  if (total_db <= kRateTableLoDb) return 0.0;
  const double pos = (total_db - kRateTableLoDb) / kRateTableStepDb;
  const int i = static_cast<int>(pos);
  const double frac = pos - i;
  const auto& t = *rate_table_;
  return t[i] + (t[i + 1] - t[i]) * frac;
}

void Environment::advance_mobility_and_channel() {
  if (ap_ >= trace_->n_seconds()) {
    throw std::out_of_range("Environment: mobility trace exhausted at AP " + std::to_string(ap_));
  }
  const auto frame = trace_->frame(ap_);  // sorted by vehicle id

  std::vector<VehicleState> vehicles;
  std::vector<UserQueue> queues;
  std::vector<double> slow;
  std::vector<int> cqi;
  std::vector<int64_t> occ;
  std::vector<int> attach_ap;
  vehicles.reserve(frame.size());

  const double tx_rb = tx_power_per_rb_dbm(cfg_);
  const double noise_rb = noise_per_rb_dbm(cfg_);

  size_t old_i = 0;
  for (const auto& s : frame) {
    while (old_i < vehicles_.size() && vehicles_[old_i].id < s.vehicle_id) ++old_i;  // departed, queue discarded

    VehicleState v;
    v.id = s.vehicle_id;
    v.x_m = s.x_m;
    v.y_m = s.y_m;
    v.attached = true;

    if (old_i < vehicles_.size() && vehicles_[old_i].id == s.vehicle_id) {
      const double z = rng_.normal(stream::kShadowStep, s.vehicle_id, ap_, 0);
      v.shadowing_db = update_shadowing(vehicles_[old_i].shadowing_db, cfg_.shadowing_rho,
                                        cfg_.shadowing_sigma, z);
      queues.push_back(std::move(queues_[old_i]));
      occ.push_back(occupancy_[old_i]);
      attach_ap.push_back(attach_ap_[old_i]);
      ++old_i;
    } else {
      const double z = rng_.normal(stream::kShadowInit, s.vehicle_id, ap_, 0);
      v.shadowing_db = cfg_.shadowing_sigma * z;
      UserQueue q;
      q.owner = s.vehicle_id;
      queues.push_back(std::move(q));
      occ.push_back(0);
      attach_ap.push_back(ap_);
    }

    const double d = std::hypot(v.x_m, v.y_m);
    const double pl = path_loss_db(cfg_.pathloss_coeffs, d);
    const double sinr_db = tx_rb - pl - v.shadowing_db - noise_rb;
    slow.push_back(sinr_db);
    cqi.push_back(sinr_to_cqi(sinr_db).index);
    vehicles.push_back(v);
  }

  vehicles_ = std::move(vehicles);
  queues_ = std::move(queues);
  slow_sinr_db_ = std::move(slow);
  cqi_ = std::move(cqi);
  occupancy_ = std::move(occ);
  attach_ap_ = std::move(attach_ap);
}

std::pair<Observation, ApReport> Environment::run_ap(const std::vector<int>& pool,
                                                     int n_slots_override,
                                                     const SlotObserver& observer,
                                                     bool abort_on_drop) {
  if (pool.empty()) throw std::invalid_argument("Environment: empty RB pool");
  for (int rb : pool) {
    if (rb < 0 || rb >= grid_.n_rbs) throw std::invalid_argument("Environment: RB index outside grid");
  }
  advance_mobility_and_channel();

  const int n_slots = n_slots_override > 0 ? n_slots_override : cfg_.slots_per_ap();
  const int pool_size = static_cast<int>(pool.size());
  const int budget_slots = cfg_.delay_budget_slots();
  const double lambda_slot = cfg_.arrival_rate * cfg_.slot_duration;
  const size_t n_users = queues_.size();

  ApReport report;
  report.rb_pool_size = pool_size;
  int max_delay_slots = 0;
  int64_t peak_occupancy = 0;

  auto& rates = rates_scratch_;
  rates.rates.resize(n_users);

  for (int s = 0; s < n_slots; ++s) {
    const int64_t gslot = static_cast<int64_t>(ap_) * cfg_.slots_per_ap() + s;

    std::vector<int> arrival_counts;
    if (observer) arrival_counts.assign(n_users, 0);
    for (size_t u = 0; u < n_users; ++u) {
      const int id = vehicles_[u].id;
      const int n = rng_.poisson(stream::kArrival, id, gslot, lambda_slot);
      for (int k = 0; k < n; ++k) {
        queues_[u].packets.push_back({id, cfg_.packet_size, gslot, cfg_.packet_size});
      }
      const int64_t bytes = static_cast<int64_t>(n) * cfg_.packet_size;
      occupancy_[u] += bytes;
      report.arrived_bytes += bytes;
      if (observer) arrival_counts[u] = n;
    }

    for (size_t u = 0; u < n_users; ++u) {
      auto& row = rates.rates[u];
      row.assign(pool_size, 0.0);
      if (!queues_[u].backlogged()) continue;
      const int id = vehicles_[u].id;
      const double slow = slow_sinr_db_[u];
      for (int k = 0; k < pool_size; ++k) {
        const double fad = cfg_.fading_sigma * rng_.normal(stream::kFading, id, gslot, pool[k]);
        row[k] = rate_from_db(slow + fad);
      }
    }

    SlotAllocation alloc = schedule_slot(queues_, pool_size, rates);
    SlotReport slot_report =
        serve_queues(alloc, queues_, rates, gslot, cfg_.slot_duration, budget_slots);

    for (size_t u = 0; u < n_users; ++u) {
      occupancy_[u] -= slot_report.served_bytes[u];
      report.served_bytes += slot_report.served_bytes[u];
      if (occupancy_[u] > peak_occupancy) peak_occupancy = occupancy_[u];
    }
    for (const auto& drop : slot_report.dropped) {
      // scan is fine: drops are rare and per-user lookup is by sorted id
      for (size_t u = 0; u < n_users; ++u) {
        if (vehicles_[u].id == drop.packet.owner) {
          occupancy_[u] -= drop.packet.remaining;
          break;
        }
      }
    }
    report.n_delivered += static_cast<int64_t>(slot_report.delivered.size());
    report.n_dropped += static_cast<int64_t>(slot_report.dropped.size());
    for (const auto& d : slot_report.delivered) {
      if (d.delay_slots > max_delay_slots) max_delay_slots = d.delay_slots;
    }

    if (observer) {
      SlotObservation so;
      so.slot = gslot;
      so.arrival_counts = std::move(arrival_counts);
      so.rates = rates;
      so.alloc = std::move(alloc);
      so.report = std::move(slot_report);
      observer(so);
    }

    if (abort_on_drop && report.n_dropped > 0) break;
  }

  report.max_delay = max_delay_slots * cfg_.slot_duration;
  report.qos_ok = check_qos(report, cfg_.delay_budget);

  Observation obs;
  obs.max_buffer = std::clamp(peak_occupancy / obs_cfg_.buffer_norm_bytes, 0.0, 1.0);
  obs.traffic = std::clamp(report.arrived_bytes / obs_cfg_.traffic_norm_bytes, 0.0, 1.0);
  std::vector<double> cqis;
  cqis.reserve(cqi_.size());
  for (int c : cqi_) cqis.push_back(c / 15.0);
  std::sort(cqis.begin(), cqis.end());
  cqis.resize(obs_cfg_.k_worst, 1.0);
  obs.worst_cqis = std::move(cqis);

  ++ap_;
  return {obs, report};
}

int64_t Environment::peek_next_ap_arrival_bytes() const {
  if (ap_ >= trace_->n_seconds()) return 0;
  const auto frame = trace_->frame(ap_);
  const int n_slots = cfg_.slots_per_ap();
  const double lambda_slot = cfg_.arrival_rate * cfg_.slot_duration;
  int64_t packets = 0;
  for (const auto& s : frame) {
    for (int slot = 0; slot < n_slots; ++slot) {
      const int64_t gslot = static_cast<int64_t>(ap_) * n_slots + slot;
      packets += rng_.poisson(stream::kArrival, s.vehicle_id, gslot, lambda_slot);
    }
  }
  return packets * cfg_.packet_size;
}

uint64_t Environment::state_hash() const {
  uint64_t h = 0xcbf29ce484222325ull;
  hash_u64(h, rng_.seed());
  hash_u64(h, static_cast<uint64_t>(ap_));
  hash_u64(h, vehicles_.size());
  for (size_t u = 0; u < vehicles_.size(); ++u) {
    hash_u64(h, static_cast<uint64_t>(vehicles_[u].id));
    hash_double(h, vehicles_[u].x_m);
    hash_double(h, vehicles_[u].y_m);
    hash_double(h, vehicles_[u].shadowing_db);
    hash_u64(h, static_cast<uint64_t>(attach_ap_[u]));
    hash_u64(h, static_cast<uint64_t>(occupancy_[u]));
    hash_u64(h, static_cast<uint64_t>(queues_[u].served_bytes_total));
    hash_double(h, queues_[u].avg_rate);
    hash_u64(h, queues_[u].packets.size());
    for (const auto& p : queues_[u].packets) {
      hash_u64(h, static_cast<uint64_t>(p.arrival_slot));
      hash_u64(h, static_cast<uint64_t>(p.remaining));
    }
  }
  return h;
}

}  // namespace ranslice
