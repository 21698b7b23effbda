#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ranslice {

struct TraceSample {
  double time_s = 0.0;
  int vehicle_id = 0;
  double x_m = 0.0;
  double y_m = 0.0;
};

struct VehicleState {
  int id = 0;
  double x_m = 0.0;
  double y_m = 0.0;
  double shadowing_db = 0.0;
  bool attached = false;
};

// Positions of the slice's subscribers over time, sampled once per
// second. A vehicle is attached during second k iff it has a sample
// with time in [k, k+1).
struct MobilityTrace {
  std::vector<TraceSample> samples;  // sorted by time, per-vehicle times strictly increasing
  double horizon_s = 0.0;

  // (vehicle_id, x, y) of every vehicle present during second k; the
  // last sample in [k, k+1) wins if a vehicle has several.
  std::vector<TraceSample> frame(int second) const;
  int n_seconds() const { return static_cast<int>(horizon_s) + 1; }
};

// CSV schema: header `time_s,vehicle_id,x_m,y_m`, rows sorted by time.
MobilityTrace load_mobility_trace(const std::string& path);
void save_mobility_trace(const MobilityTrace& trace, const std::string& path);

// Random-waypoint vehicles with Poisson arrivals and exponential dwell
// times, stationary-initialized so the attached count averages
// n_vehicles_mean from t=0. Positions stay within the disc of the given
// radius. density_jitter > 0 scales the mean count for the whole trace
// by a factor drawn uniformly from [1-j, 1+j], modelling day-to-day
// demand swings a static reservation has to cover at the high end.
MobilityTrace synth_trace(double n_vehicles_mean, double horizon_s, double speed_mps,
                          uint64_t seed, double radius_m = 250.0, double density_jitter = 0.0);

}  // namespace ranslice
