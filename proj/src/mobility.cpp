#include "ranslice/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

namespace ranslice {

namespace {

// Mean time a vehicle stays in the cell. Short enough that the attached
// count mixes well within a 100 s trace.
constexpr double kMeanDwellS = 30.0;

void validate_trace(const MobilityTrace& trace) {
  if (trace.samples.empty()) throw std::invalid_argument("mobility trace: empty trace");
  std::map<int, double> last_time;
  double prev_t = -1.0;
  for (size_t i = 0; i < trace.samples.size(); ++i) {
    const auto& s = trace.samples[i];
    if (s.time_s < prev_t) {
      throw std::invalid_argument("mobility trace: rows not sorted by time at row " + std::to_string(i + 1));
    }
    prev_t = s.time_s;
    auto it = last_time.find(s.vehicle_id);
    if (it != last_time.end() && s.time_s <= it->second) {
      throw std::invalid_argument("mobility trace: non-increasing time for vehicle " +
                                  std::to_string(s.vehicle_id) + " at row " + std::to_string(i + 1));
    }
    last_time[s.vehicle_id] = s.time_s;
  }
}

}  // namespace

std::vector<TraceSample> MobilityTrace::frame(int second) const {
  std::vector<TraceSample> out;
  std::map<int, TraceSample> latest;
  const double lo = static_cast<double>(second);
  const double hi = lo + 1.0;
  // samples sorted by time, so a linear scan keeps the last sample per vehicle
  auto begin = std::lower_bound(samples.begin(), samples.end(), lo,
                                [](const TraceSample& s, double t) { return s.time_s < t; });
  for (auto it = begin; it != samples.end() && it->time_s < hi; ++it) {
    latest[it->vehicle_id] = *it;
  }
  out.reserve(latest.size());
  for (const auto& [id, s] : latest) out.push_back(s);
  return out;
}

MobilityTrace load_mobility_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("mobility trace: cannot open '" + path + "'");

  MobilityTrace trace;
  std::string line;
  size_t line_no = 0;
  if (!std::getline(in, line)) throw std::invalid_argument("mobility trace: empty file");
  ++line_no;
  if (line != "time_s,vehicle_id,x_m,y_m") {
    throw std::invalid_argument("mobility trace: bad header at line 1");
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ss(line);
    TraceSample s;
    char c1, c2, c3;
    if (!(ss >> s.time_s >> c1 >> s.vehicle_id >> c2 >> s.x_m >> c3 >> s.y_m) ||
        c1 != ',' || c2 != ',' || c3 != ',') {
      throw std::invalid_argument("mobility trace: parse error at line " + std::to_string(line_no));
    }
    trace.samples.push_back(s);
  }
  validate_trace(trace);
  trace.horizon_s = trace.samples.back().time_s;
  return trace;
}

void save_mobility_trace(const MobilityTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("mobility trace: cannot write '" + path + "'");
  out << "time_s,vehicle_id,x_m,y_m\n";
  char buf[128];
  for (const auto& s : trace.samples) {
    std::snprintf(buf, sizeof(buf), "%.17g,%d,%.17g,%.17g\n", s.time_s, s.vehicle_id, s.x_m, s.y_m);
    out << buf;
  }
  if (!out) throw std::runtime_error("mobility trace: write failed for '" + path + "'");
}

MobilityTrace synth_trace(double n_vehicles_mean, double horizon_s, double speed_mps,
                          uint64_t seed, double radius_m, double density_jitter) {
  if (!(n_vehicles_mean > 0.0)) throw std::invalid_argument("synth_trace: n_vehicles_mean must be > 0");
  if (!(horizon_s >= 0.0)) throw std::invalid_argument("synth_trace: negative horizon");
  if (speed_mps < 0.0) throw std::invalid_argument("synth_trace: negative speed");
  if (density_jitter < 0.0 || density_jitter >= 1.0) {
    throw std::invalid_argument("synth_trace: density_jitter must be in [0, 1)");
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (density_jitter > 0.0) {
    // draw only when enabled so jitter-free traces stay reproducible
    n_vehicles_mean *= 1.0 + density_jitter * (2.0 * unit(rng) - 1.0);
  }
  std::exponential_distribution<double> dwell(1.0 / kMeanDwellS);
  const double arrival_rate = n_vehicles_mean / kMeanDwellS;

  auto disc_point = [&](double& x, double& y) {
    // uniform over the disc
    const double r = radius_m * std::sqrt(unit(rng));
    const double phi = 2.0 * M_PI * unit(rng);
    x = r * std::cos(phi);
    y = r * std::sin(phi);
  };

  struct Dwell {
    int id;
    double t_in, t_out;
    double x0, y0;
  };
  std::vector<Dwell> dwells;
  int next_id = 0;

  // stationary start: Poisson(n_mean) vehicles already in the cell with
  // memoryless residual dwell
  std::poisson_distribution<int> init_count(n_vehicles_mean);
  const int n0 = init_count(rng);
  for (int i = 0; i < n0; ++i) {
    Dwell d;
    d.id = next_id++;
    d.t_in = 0.0;
    d.t_out = dwell(rng);
    disc_point(d.x0, d.y0);
    dwells.push_back(d);
  }
  // Poisson arrivals over the horizon
  std::exponential_distribution<double> gap(arrival_rate);
  for (double t = gap(rng); t <= horizon_s; t += gap(rng)) {
    Dwell d;
    d.id = next_id++;
    d.t_in = t;
    d.t_out = t + dwell(rng);
    disc_point(d.x0, d.y0);
    dwells.push_back(d);
  }

  // random-waypoint walk sampled at integer seconds
  MobilityTrace trace;
  for (const auto& d : dwells) {
    double x = d.x0, y = d.y0;
    double tx, ty;
    disc_point(tx, ty);
    const int first = static_cast<int>(std::ceil(d.t_in));
    const int last = static_cast<int>(std::floor(std::min(d.t_out, horizon_s)));
    double t_prev = d.t_in;
    for (int t = first; t <= last; ++t) {
      double dt = t - t_prev;
      t_prev = t;
      while (dt > 0.0) {
        const double dist = std::hypot(tx - x, ty - y);
        const double step = speed_mps * dt;
        if (speed_mps <= 0.0 || dist < 1e-12) {
          if (speed_mps > 0.0) disc_point(tx, ty);
          break;
        }
        if (step < dist) {
          x += (tx - x) * step / dist;
          y += (ty - y) * step / dist;
          dt = 0.0;
        } else {
          x = tx;
          y = ty;
          dt -= dist / speed_mps;
          disc_point(tx, ty);
        }
      }
      trace.samples.push_back({static_cast<double>(t), d.id, x, y});
    }
  }
  std::sort(trace.samples.begin(), trace.samples.end(), [](const TraceSample& a, const TraceSample& b) {
    if (a.time_s != b.time_s) return a.time_s < b.time_s;
    return a.vehicle_id < b.vehicle_id;
  });
  if (trace.samples.empty()) {
    // degenerate seed with nobody in the cell over the whole horizon
    throw std::runtime_error("synth_trace: generated trace is empty, retry with another seed");
  }
  trace.horizon_s = trace.samples.back().time_s;
  validate_trace(trace);
  return trace;
}

}  // namespace ranslice
