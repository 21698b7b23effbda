#pragma once

#include <cstdint>
#include <string>

namespace ranslice {

struct PathlossCoeffs {
  double intercept_db = 128.1;     // loss at the 1 km reference distance
  double slope_db_per_decade = 37.6;
};

// Physical-layer and traffic parameters for one cell. Defaults model a
// 10 MHz macro cell serving a vehicular low-latency slice.
struct SimConfig {
  double cell_radius = 250.0;          // m
  double tx_power = 46.0;              // dBm, total over the carrier
  double noise_psd = -174.0;           // dBm/Hz
  double noise_figure = 9.0;           // dB
  double carrier_bandwidth = 10e6;     // Hz
  double subcarrier_spacing = 15e3;    // Hz
  double slot_duration = 1e-3;         // s
  double ap_duration = 1.0;            // s, interval between bandwidth requests
  PathlossCoeffs pathloss_coeffs;
  double shadowing_sigma = 8.0;        // dB
  double shadowing_rho = 0.9;          // per-AP Gauss-Markov correlation
  double fading_sigma = 3.0;           // dB, per-RB lognormal, redrawn each slot
  int packet_size = 32;                // bytes
  double arrival_rate = 250.0;         // packets/s per vehicle
  double delay_budget = 5e-3;          // s
  uint64_t seed = 1;

  int slots_per_ap() const;
  int delay_budget_slots() const;

  // Throws std::invalid_argument on any violated constraint.
  void validate() const;
};

// The schedulable grid carved out of the carrier. One RB spans 12
// subcarriers; the usable RB count applies the standard 90% occupied
// bandwidth convention, which yields 50 RBs for a 10 MHz carrier.
struct ResourceGrid {
  int n_rbs = 0;
  double rb_bandwidth = 180e3;  // Hz
  double slot_duration = 1e-3;  // s

  static ResourceGrid from_config(const SimConfig& cfg);
};

// Loads a flat JSON object whose keys match SimConfig field names
// exactly. Unknown keys are a hard error; missing keys keep defaults.
SimConfig load_sim_config(const std::string& path);
SimConfig sim_config_from_json_text(const std::string& text);
std::string sim_config_to_json_text(const SimConfig& cfg);

}  // namespace ranslice
