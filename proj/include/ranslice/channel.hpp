#pragma once

#include <cmath>
#include <vector>

#include "ranslice/sim_config.hpp"

namespace ranslice {

constexpr double kMinPathlossDistance = 10.0;  // m, clamp floor

struct Cqi {
  int index = 1;  // 1..15
};

struct ChannelSample {
  double pathloss_db = 0.0;
  double shadowing_db = 0.0;
  std::vector<double> per_rb_fading_db;
  std::vector<double> sinr_per_rb;  // linear
};

// Urban-macro distance law: PL = A + B*log10(d_km). Distances below the
// clamp floor behave as the floor.
double path_loss_db(const PathlossCoeffs& coeffs, double distance_m);

// One Gauss-Markov step of the lognormal shadowing process. z is a
// standard normal draw supplied by the caller's stream; stationary
// variance is sigma^2.
double update_shadowing(double prev_db, double rho, double sigma_db, double z);

// Per-RB linear SINR from the link budget. Total tx power is split
// evenly across the full grid's RBs, not just the granted pool.
std::vector<double> sinr_per_rb(const SimConfig& cfg, double pathloss_db, double shadowing_db,
                                const std::vector<double>& fading_db);

// Scalar pieces of the same budget, used by the environment hot path.
double tx_power_per_rb_dbm(const SimConfig& cfg);
double noise_per_rb_dbm(const SimConfig& cfg);

double shannon_rate(double bandwidth_hz, double sinr_linear);

Cqi sinr_to_cqi(double sinr_db);

// dB threshold for each CQI index 1..15 (position 0 holds index 1).
const std::vector<double>& cqi_thresholds_db();

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

}  // namespace ranslice
