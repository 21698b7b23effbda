#include "ranslice/harness.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include <json.hpp>

namespace ranslice {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void reject_unknown_keys(const json& j, const std::set<std::string>& known, const char* where) {
  for (const auto& item : j.items()) {
    if (!known.count(item.key())) {
      throw std::invalid_argument(std::string("RunConfig: unknown key '") + item.key() + "' in " +
                                  where);
    }
  }
}

template <typename T>
void get_if(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

TraceConfig trace_from_json(const json& j) {
  reject_unknown_keys(j, {"n_vehicles_mean", "speed_mps", "density_jitter", "file"}, "trace");
  TraceConfig t;
  get_if(j, "n_vehicles_mean", t.n_vehicles_mean);
  get_if(j, "speed_mps", t.speed_mps);
  get_if(j, "density_jitter", t.density_jitter);
  get_if(j, "file", t.file);
  return t;
}

ObsConfig obs_from_json(const json& j) {
  reject_unknown_keys(j, {"buffer_norm_bytes", "traffic_norm_bytes", "k_worst"}, "obs");
  ObsConfig o;
  get_if(j, "buffer_norm_bytes", o.buffer_norm_bytes);
  get_if(j, "traffic_norm_bytes", o.traffic_norm_bytes);
  get_if(j, "k_worst", o.k_worst);
  return o;
}

DdpgConfig agent_from_json(const json& j) {
  reject_unknown_keys(j,
                      {"gamma", "tau", "lr_actor", "lr_critic", "batch_size", "capacity",
                       "noise_sigma_start", "noise_sigma_end", "noise_decay_episodes",
                       "hidden_dims", "warmup", "cut_bootstrap_at_done"},
                      "agent");
  DdpgConfig a;
  get_if(j, "gamma", a.gamma);
  get_if(j, "tau", a.tau);
  get_if(j, "lr_actor", a.lr_actor);
  get_if(j, "lr_critic", a.lr_critic);
  get_if(j, "batch_size", a.batch_size);
  get_if(j, "capacity", a.capacity);
  get_if(j, "noise_sigma_start", a.noise_sigma_start);
  get_if(j, "noise_sigma_end", a.noise_sigma_end);
  get_if(j, "noise_decay_episodes", a.noise_decay_episodes);
  get_if(j, "hidden_dims", a.hidden_dims);
  get_if(j, "warmup", a.warmup);
  get_if(j, "cut_bootstrap_at_done", a.cut_bootstrap_at_done);
  return a;
}

PolicySpec policy_from_json(const json& j) {
  reject_unknown_keys(j, {"kind", "b0", "weight", "t_ref_bytes", "checkpoint", "grid_step"},
                      "policy");
  PolicySpec p;
  if (j.contains("kind")) p.kind = PolicySpec::parse_kind(j.at("kind").get<std::string>());
  get_if(j, "b0", p.b0);
  get_if(j, "weight", p.weight);
  get_if(j, "t_ref_bytes", p.t_ref_bytes);
  get_if(j, "checkpoint", p.checkpoint);
  get_if(j, "grid_step", p.grid_step);
  return p;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  return out;
}

Environment make_env(const RunConfig& cfg, uint64_t trace_seed, uint64_t env_seed) {
  MobilityTrace trace =
      cfg.trace.file.empty()
          ? synth_trace(cfg.trace.n_vehicles_mean, cfg.aps_per_episode, cfg.trace.speed_mps,
                        trace_seed, cfg.sim.cell_radius, cfg.trace.density_jitter)
          : load_mobility_trace(cfg.trace.file);
  Environment env(cfg.sim, cfg.resolved_obs(), std::move(trace), env_seed);
  if (env.max_aps() < cfg.aps_per_episode) {
    throw std::runtime_error("mobility trace shorter than aps_per_episode");
  }
  return env;
}

}  // namespace

void RunConfig::validate() const {
  sim.validate();
  agent.validate();
  policy.validate();
  if (episodes < 1 || aps_per_episode < 1 || eval_runs < 1 || reward_window < 1) {
    throw std::invalid_argument("RunConfig: counts must be positive");
  }
  if (reward_window > episodes) {
    throw std::invalid_argument("RunConfig: reward_window must not exceed episodes");
  }
  if (!(trace.n_vehicles_mean > 0.0)) {
    throw std::invalid_argument("RunConfig: trace.n_vehicles_mean must be positive");
  }
  if (trace.speed_mps < 0.0) {
    throw std::invalid_argument("RunConfig: trace.speed_mps must be non-negative");
  }
  if (trace.density_jitter < 0.0 || trace.density_jitter >= 1.0) {
    throw std::invalid_argument("RunConfig: trace.density_jitter must be in [0, 1)");
  }
  if (obs.k_worst < 1) throw std::invalid_argument("RunConfig: obs.k_worst must be positive");
  if (output_dir.empty()) throw std::invalid_argument("RunConfig: output_dir must be set");
}

ObsConfig RunConfig::resolved_obs() const {
  ObsConfig o = obs;
  if (o.traffic_norm_bytes <= 0.0) {
    o.traffic_norm_bytes = default_traffic_norm(sim, trace.n_vehicles_mean);
  }
  return o;
}

RunConfig run_config_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("RunConfig: JSON parse error: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("RunConfig: top level must be a JSON object");
  reject_unknown_keys(j,
                      {"sim", "trace", "obs", "agent", "policy", "episodes", "aps_per_episode",
                       "eval_runs", "reward_window", "output_dir"},
                      "top level");

  RunConfig cfg;
  if (j.contains("sim")) cfg.sim = sim_config_from_json_text(j.at("sim").dump());
  if (j.contains("trace")) cfg.trace = trace_from_json(j.at("trace"));
  if (j.contains("obs")) cfg.obs = obs_from_json(j.at("obs"));
  if (j.contains("agent")) cfg.agent = agent_from_json(j.at("agent"));
  if (j.contains("policy")) cfg.policy = policy_from_json(j.at("policy"));
  get_if(j, "episodes", cfg.episodes);
  get_if(j, "aps_per_episode", cfg.aps_per_episode);
  get_if(j, "eval_runs", cfg.eval_runs);
  get_if(j, "reward_window", cfg.reward_window);
  get_if(j, "output_dir", cfg.output_dir);
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("RunConfig: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return run_config_from_json_text(ss.str());
}

std::string run_config_to_json_text(const RunConfig& cfg) {
  json j;
  j["sim"] = json::parse(sim_config_to_json_text(cfg.sim));
  j["trace"] = {{"n_vehicles_mean", cfg.trace.n_vehicles_mean},
                {"speed_mps", cfg.trace.speed_mps},
                {"density_jitter", cfg.trace.density_jitter},
                {"file", cfg.trace.file}};
  j["obs"] = {{"buffer_norm_bytes", cfg.obs.buffer_norm_bytes},
              {"traffic_norm_bytes", cfg.obs.traffic_norm_bytes},
              {"k_worst", cfg.obs.k_worst}};
  j["agent"] = {{"gamma", cfg.agent.gamma},
                {"tau", cfg.agent.tau},
                {"lr_actor", cfg.agent.lr_actor},
                {"lr_critic", cfg.agent.lr_critic},
                {"batch_size", cfg.agent.batch_size},
                {"capacity", cfg.agent.capacity},
                {"noise_sigma_start", cfg.agent.noise_sigma_start},
                {"noise_sigma_end", cfg.agent.noise_sigma_end},
                {"noise_decay_episodes", cfg.agent.noise_decay_episodes},
                {"hidden_dims", cfg.agent.hidden_dims},
                {"warmup", cfg.agent.warmup},
                {"cut_bootstrap_at_done", cfg.agent.cut_bootstrap_at_done}};
  j["policy"] = {{"kind", PolicySpec::kind_name(cfg.policy.kind)},
                 {"b0", cfg.policy.b0},
                 {"weight", cfg.policy.weight},
                 {"t_ref_bytes", cfg.policy.t_ref_bytes},
                 {"checkpoint", cfg.policy.checkpoint},
                 {"grid_step", cfg.policy.grid_step}};
  j["episodes"] = cfg.episodes;
  j["aps_per_episode"] = cfg.aps_per_episode;
  j["eval_runs"] = cfg.eval_runs;
  j["reward_window"] = cfg.reward_window;
  j["output_dir"] = cfg.output_dir;
  return j.dump(2);
}

PolicyDriver::PolicyDriver(const PolicySpec& spec, const SimConfig& sim) : spec_(spec) {
  spec_.validate();
  if (spec_.kind == PolicySpec::Kind::Heuristic) {
    t_ref_bytes_ = spec_.t_ref_bytes > 0.0
                       ? spec_.t_ref_bytes
                       : default_t_ref_bytes(sim, ResourceGrid::from_config(sim));
  }
  if (spec_.kind == PolicySpec::Kind::Ddpg) {
    if (spec_.checkpoint.empty()) {
      throw std::runtime_error("PolicyDriver: ddpg policy needs a checkpoint path");
    }
    actor_ = load_mlp_file(spec_.checkpoint);
    if (actor_->head != Mlp::Head::BoundedAction || actor_->output_dim() != 1) {
      throw std::runtime_error("PolicyDriver: checkpoint is not an actor network");
    }
  }
}

double PolicyDriver::act(const Observation& prev_obs, const Environment& env, double scale) const {
  switch (spec_.kind) {
    case PolicySpec::Kind::Fixed:
      return std::clamp(scale * spec_.b0, kActionLow, kActionHigh);
    case PolicySpec::Kind::Heuristic: {
      const double traffic = static_cast<double>(env.peek_next_ap_arrival_bytes());
      return std::clamp(scale * spec_.weight * traffic / t_ref_bytes_, kActionLow, kActionHigh);
    }
    case PolicySpec::Kind::Ddpg: {
      const std::vector<double> state = prev_obs.to_vector();
      if (static_cast<int>(state.size()) != actor_->input_dim()) {
        throw std::runtime_error("PolicyDriver: observation size does not match actor input");
      }
      return std::clamp(scale * mlp_forward(*actor_, state)[0], kActionLow, kActionHigh);
    }
    case PolicySpec::Kind::Oracle:
      throw std::logic_error("PolicyDriver: oracle is dispatched inside run_eval_episode");
  }
  throw std::logic_error("PolicyDriver: bad kind enum");
}

EpisodeMetrics run_eval_episode(Environment& env, const PolicyDriver& driver, int n_aps,
                                double scale, std::vector<double>* actions_out) {
  EpisodeMetrics m;
  m.n_aps = n_aps;
  Observation prev = Observation::initial(env.obs_cfg().k_worst);
  double sum_b = 0.0, sum_reward = 0.0;
  int n_ok = 0;

  for (int t = 0; t < n_aps; ++t) {
    double b;
    ApReport rep;
    Observation obs;
    if (driver.spec().kind == PolicySpec::Kind::Oracle) {
      OracleResult r = oracle_search(env, driver.spec().grid_step);
      b = r.b;
      rep = r.report;
      obs = std::move(r.obs);
    } else {
      b = driver.act(prev, env, scale);
      const std::vector<int> pool = apply_request({b}, env.grid());
      std::tie(obs, rep) = env.run_ap(pool);
    }
    sum_b += b;
    sum_reward += compute_reward({b}, rep.qos_ok);
    if (rep.qos_ok) ++n_ok;
    if (actions_out) actions_out->push_back(b);
    prev = std::move(obs);
  }

  m.mean_b = sum_b / n_aps;
  m.qos_availability = static_cast<double>(n_ok) / n_aps;
  m.mean_reward = sum_reward / n_aps;
  return m;
}

EpisodeMetrics run_training_episode(Environment& env, DdpgAgent& agent, ReplayBuffer& buffer,
                                    double noise_sigma, int n_aps) {
  EpisodeMetrics m;
  m.n_aps = n_aps;
  Observation prev = Observation::initial(env.obs_cfg().k_worst);
  std::vector<double> prev_vec = prev.to_vector();
  double sum_b = 0.0, sum_reward = 0.0;
  int n_ok = 0;

  for (int t = 0; t < n_aps; ++t) {
    const double b = agent.act(prev_vec, noise_sigma);
    const std::vector<int> pool = apply_request({b}, env.grid());
    auto [obs, rep] = env.run_ap(pool);
    const double reward = compute_reward({b}, rep.qos_ok);

    std::vector<double> next_vec = obs.to_vector();
    buffer.push({prev_vec, b, reward, next_vec, t == n_aps - 1});
    agent.train_step(buffer);

    sum_b += b;
    sum_reward += reward;
    if (rep.qos_ok) ++n_ok;
    prev_vec = std::move(next_vec);
  }

  m.mean_b = sum_b / n_aps;
  m.qos_availability = static_cast<double>(n_ok) / n_aps;
  m.mean_reward = sum_reward / n_aps;
  return m;
}

Environment make_train_env(const RunConfig& cfg, uint64_t master_seed, int episode) {
  return make_env(cfg, derive_seed(master_seed, seed_tag::kTrainTrace, episode),
                  derive_seed(master_seed, seed_tag::kTrainEnv, episode));
}

Environment make_eval_env(const RunConfig& cfg, uint64_t master_seed, int run) {
  return make_env(cfg, derive_seed(master_seed, seed_tag::kEvalTrace, run),
                  derive_seed(master_seed, seed_tag::kEvalEnv, run));
}

std::string fmt_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

TrainSummary train(const RunConfig& cfg, uint64_t master_seed) {
  cfg.validate();
  if (cfg.policy.kind != PolicySpec::Kind::Ddpg) {
    throw std::invalid_argument("train: policy.kind must be ddpg");
  }
  fs::create_directories(cfg.output_dir);

  // Enforce the train/eval dataset split before burning any compute.
  std::unordered_set<uint64_t> train_seeds;
  for (int e = 0; e < cfg.episodes; ++e) {
    train_seeds.insert(derive_seed(master_seed, seed_tag::kTrainTrace, e));
  }
  for (int r = 0; r < cfg.eval_runs; ++r) {
    if (train_seeds.count(derive_seed(master_seed, seed_tag::kEvalTrace, r))) {
      throw std::runtime_error("train: train/eval trace seed collision");
    }
  }

  const ObsConfig obs = cfg.resolved_obs();
  const int state_dim = 2 + obs.k_worst;
  DdpgAgent agent(state_dim, cfg.agent, derive_seed(master_seed, seed_tag::kAgentInit, 0));
  ReplayBuffer buffer(cfg.agent.capacity);

  TrainSummary summary;
  summary.best_checkpoint = (fs::path(cfg.output_dir) / "actor_best.txt").string();
  summary.final_checkpoint = (fs::path(cfg.output_dir) / "actor_final.txt").string();
  summary.best_running_avg = -2.0;  // below any reachable reward

  double window_sum = 0.0;
  for (int e = 0; e < cfg.episodes; ++e) {
    Environment env = make_train_env(cfg, master_seed, e);
    EpisodeMetrics m =
        run_training_episode(env, agent, buffer, cfg.agent.noise_sigma(e), cfg.aps_per_episode);
    m.episode_index = e;
    summary.episodes.push_back(m);

    window_sum += m.mean_reward;
    if (e >= cfg.reward_window) window_sum -= summary.episodes[e - cfg.reward_window].mean_reward;
    const double avg = window_sum / std::min(e + 1, cfg.reward_window);
    summary.running_avg.push_back(avg);

    if (avg > summary.best_running_avg) {
      summary.best_running_avg = avg;
      summary.best_episode = e;
      agent.save_actor(summary.best_checkpoint);
    }
  }
  agent.save_actor(summary.final_checkpoint);

  {
    auto out = open_out(fs::path(cfg.output_dir) / "reward_curve.csv");
    out << "episode,reward,running_avg\n";
    for (size_t e = 0; e < summary.episodes.size(); ++e) {
      out << e << ',' << fmt_double(summary.episodes[e].mean_reward) << ','
          << fmt_double(summary.running_avg[e]) << '\n';
    }
  }
  {
    auto out = open_out(fs::path(cfg.output_dir) / "config.json");
    out << run_config_to_json_text(cfg) << '\n';
  }
  {
    auto out = open_out(fs::path(cfg.output_dir) / "run.log");
    out << "master_seed=" << master_seed << '\n'
        << "episodes=" << cfg.episodes << " aps_per_episode=" << cfg.aps_per_episode << '\n'
        << "train/eval trace seeds disjoint: yes (" << cfg.episodes << " train, " << cfg.eval_runs
        << " eval)\n"
        << "best_episode=" << summary.best_episode
        << " best_running_avg=" << fmt_double(summary.best_running_avg) << '\n'
        << "best_checkpoint=" << summary.best_checkpoint << '\n'
        << "final_checkpoint=" << summary.final_checkpoint << '\n';
  }
  return summary;
}

EvalSummary evaluate(const RunConfig& cfg, int n_runs, uint64_t master_seed, bool write_files) {
  cfg.validate();
  if (n_runs < 1) throw std::invalid_argument("evaluate: n_runs must be positive");
  const PolicyDriver driver(cfg.policy, cfg.sim);

  EvalSummary s;
  s.hist_counts.assign(kHistBins, 0);
  for (int r = 0; r < n_runs; ++r) {
    Environment env = make_eval_env(cfg, master_seed, r);
    EpisodeMetrics m = run_eval_episode(env, driver, cfg.aps_per_episode, 1.0, &s.actions);
    m.episode_index = r;
    s.runs.push_back(m);
    s.mean_b += m.mean_b;
    s.mean_availability += m.qos_availability;
    s.mean_reward += m.mean_reward;
  }
  s.mean_b /= n_runs;
  s.mean_availability /= n_runs;
  s.mean_reward /= n_runs;

  const double span = kActionHigh - kActionLow;
  const double width = span / kHistBins;
  for (double b : s.actions) {
    int idx = static_cast<int>((b - kActionLow) / width);
    idx = std::clamp(idx, 0, kHistBins - 1);
    ++s.hist_counts[idx];
  }

  if (write_files) {
    fs::create_directories(cfg.output_dir);
    {
      auto out = open_out(fs::path(cfg.output_dir) / "eval.csv");
      out << "run,mean_b,qos_availability,mean_reward\n";
      for (const auto& m : s.runs) {
        out << m.episode_index << ',' << fmt_double(m.mean_b) << ','
            << fmt_double(m.qos_availability) << ',' << fmt_double(m.mean_reward) << '\n';
      }
    }
    {
      auto out = open_out(fs::path(cfg.output_dir) / "action_hist.csv");
      out << "bin_lo,bin_hi,density\n";
      const double total = static_cast<double>(s.actions.size());
      for (int i = 0; i < kHistBins; ++i) {
        const double lo = kActionLow + span * i / kHistBins;
        const double hi = kActionLow + span * (i + 1) / kHistBins;
        const double density = total > 0 ? s.hist_counts[i] / (total * width) : 0.0;
        out << fmt_double(lo) << ',' << fmt_double(hi) << ',' << fmt_double(density) << '\n';
      }
    }
  }
  return s;
}

std::vector<SweepRow> sweep_availability(const RunConfig& cfg, const std::vector<double>& weights,
                                         const std::vector<double>& b0_grid, int n_runs,
                                         uint64_t master_seed, bool write_files) {
  cfg.validate();
  if (n_runs < 1) throw std::invalid_argument("sweep: n_runs must be positive");

  // Same eval seeds for every row: curves differ by policy, not noise.
  auto row_for = [&](const PolicyDriver& driver, double scale, const std::string& name,
                     double weight_col) {
    SweepRow row;
    row.policy = name;
    row.weight = weight_col;
    for (int r = 0; r < n_runs; ++r) {
      Environment env = make_eval_env(cfg, master_seed, r);
      EpisodeMetrics m = run_eval_episode(env, driver, cfg.aps_per_episode, scale);
      row.mean_b += m.mean_b;
      row.qos_availability += m.qos_availability;
    }
    row.mean_b /= n_runs;
    row.qos_availability /= n_runs;
    return row;
  };

  std::vector<SweepRow> rows;
  for (double b0 : b0_grid) {
    PolicySpec spec;
    spec.kind = PolicySpec::Kind::Fixed;
    spec.b0 = b0;
    rows.push_back(row_for(PolicyDriver(spec, cfg.sim), 1.0, "fixed", b0));
  }
  {
    PolicySpec spec;
    spec.kind = PolicySpec::Kind::Heuristic;
    spec.weight = 1.0;
    spec.t_ref_bytes = cfg.policy.t_ref_bytes;
    const PolicyDriver driver(spec, cfg.sim);
    for (double w : weights) rows.push_back(row_for(driver, w, "heuristic", w));
  }
  if (!cfg.policy.checkpoint.empty()) {  // agent rows need a trained actor
    PolicySpec spec;
    spec.kind = PolicySpec::Kind::Ddpg;
    spec.checkpoint = cfg.policy.checkpoint;
    const PolicyDriver driver(spec, cfg.sim);
    for (double w : weights) rows.push_back(row_for(driver, w, "ddpg", w));
  }

  if (write_files) {
    fs::create_directories(cfg.output_dir);
    auto out = open_out(fs::path(cfg.output_dir) / "sweep.csv");
    out << "policy,weight,mean_b,qos_availability\n";
    for (const auto& row : rows) {
      out << row.policy << ',' << fmt_double(row.weight) << ',' << fmt_double(row.mean_b) << ','
          << fmt_double(row.qos_availability) << '\n';
    }
  }
  return rows;
}

}  // namespace ranslice
