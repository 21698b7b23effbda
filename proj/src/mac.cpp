#include "ranslice/mac.hpp"

#include <cmath>
#include <stdexcept>

namespace ranslice {

double tta_metric(double rb_rate, double user_mean_rate_over_rbs) {
  if (user_mean_rate_over_rbs <= 0.0) return 0.0;
  return rb_rate / user_mean_rate_over_rbs;
}

SlotAllocation schedule_slot(const std::vector<UserQueue>& queues, int pool_size,
                             const RateMatrix& rates) {
  if (static_cast<int>(rates.rates.size()) != static_cast<int>(queues.size())) {
    throw std::invalid_argument("schedule_slot: rate matrix does not cover the queues");
  }
  const size_t n_users = queues.size();
  std::vector<double> mean_rate(n_users, 0.0);
  std::vector<char> backlogged(n_users, 0);
  for (size_t u = 0; u < n_users; ++u) {
    if (static_cast<int>(rates.rates[u].size()) != pool_size) {
      throw std::invalid_argument("schedule_slot: rate row does not cover the pool");
    }
    backlogged[u] = queues[u].backlogged() ? 1 : 0;
    if (!backlogged[u]) continue;
    double sum = 0.0;
    for (double r : rates.rates[u]) sum += r;
    mean_rate[u] = sum / pool_size;
  }

  SlotAllocation alloc;
  alloc.owner_by_pool_pos.assign(pool_size, -1);
  for (int k = 0; k < pool_size; ++k) {
    int best = -1;
    double best_metric = -1.0;
    for (size_t u = 0; u < n_users; ++u) {
      if (!backlogged[u]) continue;
      const double m = tta_metric(rates.rates[u][k], mean_rate[u]);
      if (m > best_metric ||
          (m == best_metric && best >= 0 && queues[u].owner < queues[best].owner)) {
        best_metric = m;
        best = static_cast<int>(u);
      }
    }
    alloc.owner_by_pool_pos[k] = best;
  }
  return alloc;
}

SlotReport serve_queues(const SlotAllocation& alloc, std::vector<UserQueue>& queues,
                        const RateMatrix& rates, int64_t slot, double slot_duration,
                        int delay_budget_slots) {
  const size_t n_users = queues.size();
  const int pool_size = static_cast<int>(alloc.owner_by_pool_pos.size());

  std::vector<double> user_rate(n_users, 0.0);  // bit/s summed over assigned RBs
  for (int k = 0; k < pool_size; ++k) {
    const int u = alloc.owner_by_pool_pos[k];
    if (u < 0) continue;
    if (u >= static_cast<int>(n_users)) throw std::invalid_argument("serve_queues: allocation owner out of range");
    user_rate[u] += rates.rates[u][k];
  }

  SlotReport report;
  report.served_bytes.assign(n_users, 0);
  for (size_t u = 0; u < n_users; ++u) {
    auto& q = queues[u];

    // deadline drops happen every slot, allocation or not
    while (!q.packets.empty()) {
      const int age = static_cast<int>(slot - q.packets.front().arrival_slot) + 1;
      if (age <= delay_budget_slots) break;
      report.dropped.push_back({q.packets.front(), age});
      q.packets.pop_front();
    }

    int64_t budget = static_cast<int64_t>(std::floor(user_rate[u] * slot_duration / 8.0));
    while (budget > 0 && !q.packets.empty()) {
      Packet& p = q.packets.front();
      const int64_t take = std::min<int64_t>(budget, p.remaining);
      p.remaining -= static_cast<int>(take);
      budget -= take;
      report.served_bytes[u] += take;
      if (p.remaining == 0) {
        report.delivered.push_back({p, static_cast<int>(slot - p.arrival_slot) + 1});
        q.packets.pop_front();
      }
    }
    q.served_bytes_total += report.served_bytes[u];
    q.avg_rate = (1.0 - kAvgRateSmoothing) * q.avg_rate +
                 kAvgRateSmoothing * (report.served_bytes[u] * 8.0 / slot_duration);
  }
  return report;
}

}  // namespace ranslice
