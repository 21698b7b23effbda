#include "ranslice/channel.hpp"

#include <algorithm>
#include <stdexcept>

namespace ranslice {

double path_loss_db(const PathlossCoeffs& coeffs, double distance_m) {
  const double d = std::max(distance_m, kMinPathlossDistance);
  return coeffs.intercept_db + coeffs.slope_db_per_decade * std::log10(d / 1000.0);
}

double update_shadowing(double prev_db, double rho, double sigma_db, double z) {
  if (rho < 0.0 || rho > 1.0) throw std::invalid_argument("update_shadowing: rho outside [0,1]");
  return rho * prev_db + std::sqrt(1.0 - rho * rho) * sigma_db * z;
}

double tx_power_per_rb_dbm(const SimConfig& cfg) {
  const ResourceGrid grid = ResourceGrid::from_config(cfg);
  return cfg.tx_power - 10.0 * std::log10(static_cast<double>(grid.n_rbs));
}

double noise_per_rb_dbm(const SimConfig& cfg) {
  const ResourceGrid grid = ResourceGrid::from_config(cfg);
  return cfg.noise_psd + 10.0 * std::log10(grid.rb_bandwidth) + cfg.noise_figure;
}

std::vector<double> sinr_per_rb(const SimConfig& cfg, double pathloss_db, double shadowing_db,
                                const std::vector<double>& fading_db) {
  const ResourceGrid grid = ResourceGrid::from_config(cfg);
  if (static_cast<int>(fading_db.size()) != grid.n_rbs) {
    throw std::invalid_argument("sinr_per_rb: fading length must equal n_rbs");
  }
  const double fixed_db = tx_power_per_rb_dbm(cfg) - pathloss_db - shadowing_db - noise_per_rb_dbm(cfg);
  std::vector<double> out(fading_db.size());
  for (size_t i = 0; i < fading_db.size(); ++i) {
    out[i] = db_to_linear(fixed_db + fading_db[i]);
  }
  return out;
}

double shannon_rate(double bandwidth_hz, double sinr_linear) {
  if (bandwidth_hz <= 0.0) throw std::invalid_argument("shannon_rate: bandwidth must be positive");
  if (sinr_linear < 0.0) throw std::invalid_argument("shannon_rate: sinr must be non-negative");
  return bandwidth_hz * std::log2(1.0 + sinr_linear);
}

const std::vector<double>& cqi_thresholds_db() {
  static const std::vector<double> thresholds = {-6.7, -4.7, -2.3, 0.2,  2.4,
                                                 4.3,  5.9,  8.1,  10.3, 11.7,
                                                 14.1, 16.3, 18.7, 21.0, 22.7};
  return thresholds;
}

Cqi sinr_to_cqi(double sinr_db) {
  if (!std::isfinite(sinr_db)) throw std::invalid_argument("sinr_to_cqi: non-finite input");
  const auto& th = cqi_thresholds_db();
  int index = 1;
  for (size_t i = 0; i < th.size(); ++i) {
    if (sinr_db >= th[i]) index = static_cast<int>(i) + 1;
  }
  return Cqi{index};
}

}  // namespace ranslice
