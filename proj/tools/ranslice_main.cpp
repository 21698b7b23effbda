#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ranslice/harness.hpp"

namespace {

using namespace ranslice;

struct CommonArgs {
  std::string config_path;
  uint64_t seed = 0;
  bool seed_set = false;
  std::string out_dir;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "Run configuration JSON")
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", args.seed, "Master seed (overrides the config's)")
      ->each([&args](const std::string&) { args.seed_set = true; });
  cmd->add_option("--out", args.out_dir, "Output directory (overrides the config's)");
}

RunConfig resolve_config(const CommonArgs& args) {
  RunConfig cfg = args.config_path.empty() ? RunConfig{} : load_run_config(args.config_path);
  if (args.seed_set) cfg.sim.seed = args.seed;
  if (!args.out_dir.empty()) cfg.output_dir = args.out_dir;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Single-cell RAN slicing simulator and tenant bandwidth agent"};
  app.require_subcommand(1);

  CommonArgs trace_args;
  double trace_horizon = -1.0;
  auto* trace_cmd = app.add_subcommand("trace-gen", "Synthesize a mobility trace CSV");
  add_common(trace_cmd, trace_args);
  trace_cmd->add_option("--horizon", trace_horizon, "Trace length in seconds");

  CommonArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "Train the DDPG agent");
  add_common(train_cmd, train_args);

  CommonArgs eval_args;
  int eval_runs = -1;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate the configured policy");
  add_common(eval_cmd, eval_args);
  eval_cmd->add_option("--runs", eval_runs, "Evaluation episodes (overrides the config's)");

  CommonArgs sweep_args;
  int sweep_runs = 40;
  std::vector<double> sweep_weights = {1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 8.0};
  std::vector<double> sweep_b0;
  auto* sweep_cmd = app.add_subcommand("sweep", "Availability-vs-bandwidth curves per policy");
  add_common(sweep_cmd, sweep_args);
  sweep_cmd->add_option("--runs", sweep_runs, "Episodes per sweep point");
  sweep_cmd->add_option("--weights", sweep_weights, "Action scales for ddpg/heuristic");
  sweep_cmd->add_option("--b0-grid", sweep_b0, "b0 values for the fixed policy");

  CommonArgs oracle_args;
  int oracle_runs = -1;
  double oracle_step = -1.0;
  auto* oracle_cmd = app.add_subcommand("oracle", "Evaluate the per-AP minimum-bandwidth oracle");
  add_common(oracle_cmd, oracle_args);
  oracle_cmd->add_option("--runs", oracle_runs, "Evaluation episodes (overrides the config's)");
  oracle_cmd->add_option("--grid-step", oracle_step, "Oracle scan resolution");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*trace_cmd) {
      RunConfig cfg = resolve_config(trace_args);
      const double horizon = trace_horizon > 0.0 ? trace_horizon : cfg.aps_per_episode;
      MobilityTrace trace = synth_trace(cfg.trace.n_vehicles_mean, horizon, cfg.trace.speed_mps,
                                        cfg.sim.seed, cfg.sim.cell_radius,
                                        cfg.trace.density_jitter);
      std::filesystem::create_directories(cfg.output_dir);
      const auto path = std::filesystem::path(cfg.output_dir) / "trace.csv";
      save_mobility_trace(trace, path.string());
      std::cout << "wrote " << path.string() << " (" << trace.samples.size() << " samples)\n";
    } else if (*train_cmd) {
      RunConfig cfg = resolve_config(train_args);
      cfg.policy.kind = PolicySpec::Kind::Ddpg;
      TrainSummary s = train(cfg, cfg.sim.seed);
      std::cout << "trained " << cfg.episodes << " episodes; best running avg "
                << fmt_double(s.best_running_avg) << " at episode " << s.best_episode << '\n'
                << "checkpoints: " << s.best_checkpoint << ", " << s.final_checkpoint << '\n';
    } else if (*eval_cmd) {
      RunConfig cfg = resolve_config(eval_args);
      const int runs = eval_runs > 0 ? eval_runs : cfg.eval_runs;
      EvalSummary s = evaluate(cfg, runs, cfg.sim.seed);
      std::cout << "policy " << PolicySpec::kind_name(cfg.policy.kind) << " over " << runs
                << " runs: mean_b " << fmt_double(s.mean_b) << ", availability "
                << fmt_double(s.mean_availability) << ", mean reward "
                << fmt_double(s.mean_reward) << '\n';
    } else if (*sweep_cmd) {
      RunConfig cfg = resolve_config(sweep_args);
      if (sweep_b0.empty()) {
        for (int i = 0; i <= 16; ++i) sweep_b0.push_back(0.1 + 0.05 * i);
      }
      auto rows = sweep_availability(cfg, sweep_weights, sweep_b0, sweep_runs, cfg.sim.seed);
      std::cout << "wrote sweep.csv with " << rows.size() << " rows\n";
    } else if (*oracle_cmd) {
      RunConfig cfg = resolve_config(oracle_args);
      cfg.policy.kind = PolicySpec::Kind::Oracle;
      if (oracle_step > 0.0) cfg.policy.grid_step = oracle_step;
      const int runs = oracle_runs > 0 ? oracle_runs : cfg.eval_runs;
      EvalSummary s = evaluate(cfg, runs, cfg.sim.seed);
      std::cout << "oracle over " << runs << " runs: mean_b " << fmt_double(s.mean_b)
                << ", availability " << fmt_double(s.mean_availability) << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
