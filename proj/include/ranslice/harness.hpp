#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ranslice/ddpg.hpp"
#include "ranslice/environment.hpp"
#include "ranslice/policy.hpp"

namespace ranslice {

struct TraceConfig {
  double n_vehicles_mean = 25.0;
  double speed_mps = 13.0;      // ~47 km/h urban traffic
  double density_jitter = 0.4;  // per-episode demand swing, 0 disables
  std::string file;             // non-empty: load this CSV instead of synthesizing
};

struct EpisodeMetrics {
  int episode_index = 0;
  double mean_b = 0.0;
  double qos_availability = 0.0;  // fraction of APs with qos_ok
  double mean_reward = 0.0;
  int n_aps = 0;
};

// Everything one experiment needs. JSON layout mirrors the nesting here
// ({"sim": {...}, "trace": {...}, ...}); unknown keys at any level are
// a hard error so typos cannot silently fall back to defaults.
struct RunConfig {
  SimConfig sim;
  TraceConfig trace;
  ObsConfig obs;
  DdpgConfig agent;
  PolicySpec policy;
  int episodes = 1500;
  int aps_per_episode = 100;
  int eval_runs = 200;
  int reward_window = 100;
  std::string output_dir = "out";

  void validate() const;
  // obs with traffic_norm_bytes resolved against sim + trace density.
  ObsConfig resolved_obs() const;
};

RunConfig load_run_config(const std::string& path);
RunConfig run_config_from_json_text(const std::string& text);
std::string run_config_to_json_text(const RunConfig& cfg);

// A frozen per-AP action source for one of the policy kinds. The oracle
// kind cannot act through this interface (it needs to drive the
// environment itself) and is dispatched inside run_eval_episode.
class PolicyDriver {
 public:
  PolicyDriver(const PolicySpec& spec, const SimConfig& sim);

  // b for the coming AP, given the previous AP's observation. scale
  // multiplies the policy's raw output before the [0.1, 0.9] clamp.
  double act(const Observation& prev_obs, const Environment& env, double scale = 1.0) const;
  const PolicySpec& spec() const { return spec_; }

 private:
  PolicySpec spec_;
  double t_ref_bytes_ = 0.0;
  std::optional<Mlp> actor_;
};

// One episode with a frozen policy; fresh-environment metrics.
// actions_out, when given, receives every per-AP b.
EpisodeMetrics run_eval_episode(Environment& env, const PolicyDriver& driver, int n_aps,
                                double scale = 1.0, std::vector<double>* actions_out = nullptr);

// One episode acting with exploration noise, pushing transitions and
// training once per AP. The episode's final transition is flagged done.
EpisodeMetrics run_training_episode(Environment& env, DdpgAgent& agent, ReplayBuffer& buffer,
                                    double noise_sigma, int n_aps);

struct TrainSummary {
  std::vector<EpisodeMetrics> episodes;
  std::vector<double> running_avg;  // trailing reward_window mean
  std::string best_checkpoint;
  std::string final_checkpoint;
  int best_episode = -1;
  double best_running_avg = 0.0;
};

// Full training run: writes reward_curve.csv, best/final actor
// checkpoints, run.log and a config copy into cfg.output_dir.
TrainSummary train(const RunConfig& cfg, uint64_t master_seed);

struct EvalSummary {
  std::vector<EpisodeMetrics> runs;
  double mean_b = 0.0;
  double mean_availability = 0.0;
  double mean_reward = 0.0;
  std::vector<double> actions;       // every per-AP b across runs
  std::vector<int64_t> hist_counts;  // kHistBins bins over the action range
};

constexpr int kHistBins = 40;  // (0.9 - 0.1) / 0.02

// Frozen-policy evaluation over n_runs seeded episodes; writes eval.csv
// and action_hist.csv when write_files.
EvalSummary evaluate(const RunConfig& cfg, int n_runs, uint64_t master_seed,
                     bool write_files = true);

struct SweepRow {
  std::string policy;
  double weight = 0.0;  // scale for ddpg/heuristic, b0 for fixed
  double mean_b = 0.0;
  double qos_availability = 0.0;
};

// Availability curves: ddpg and heuristic actions scaled by each weight,
// fixed swept over b0_grid directly. All rows share the same episode
// seeds. Writes sweep.csv when write_files.
std::vector<SweepRow> sweep_availability(const RunConfig& cfg, const std::vector<double>& weights,
                                         const std::vector<double>& b0_grid, int n_runs,
                                         uint64_t master_seed, bool write_files = true);

// Episode environment builders; exposed for tests and the acceptance
// driver. Index seeds derive from the master via the train/eval tags.
Environment make_train_env(const RunConfig& cfg, uint64_t master_seed, int episode);
Environment make_eval_env(const RunConfig& cfg, uint64_t master_seed, int run);

std::string fmt_double(double v);  // shortest decimal that round-trips

}  // namespace ranslice
