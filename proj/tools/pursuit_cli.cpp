#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "pursuit/allocator.hpp"
#include "pursuit/config.hpp"
#include "pursuit/live_server.hpp"

using namespace pursuit;

namespace {

template <typename Fn>
void with_output(const std::string& path, Fn&& fn) {
  if (path.empty()) return;
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  fn(out);
}

void report_sweep(const RunConfig& cfg, const SweepResult& result) {
  write_sweep_csv(std::cout, result);
  with_output(cfg.out_csv, [&](std::ostream& out) { write_sweep_csv(out, result); });
  with_output(cfg.out_json, [&](std::ostream& out) { out << sweep_to_json(result).dump(2) << '\n'; });
}

SweepSpec base_spec(const RunConfig& cfg) {
  SweepSpec spec;
  spec.trials_per_value = cfg.trials;
  spec.evader = cfg.evader;
  spec.base = cfg.sim();
  spec.neighbor_cap = cfg.train.neighbor_cap;
  spec.base_seed = cfg.base_seed;
  spec.workers = cfg.workers;
  return spec;
}

int cmd_train(RunConfig& cfg) {
  if (cfg.checkpoint.empty()) throw ConfigError("train needs --checkpoint");
  cfg.train.train_evader = cfg.evader;
  cfg.train.eval_evader = cfg.evader;
  cfg.train.eval_workers = cfg.workers;
  const TrainResult result = train(cfg.train, [](const CurvePoint& p) {
    std::cerr << "step " << p.step << "  success " << p.success_rate << "  avg_steps "
              << (p.avg_steps ? std::to_string(*p.avg_steps) : "-") << "  critic_loss " << p.critic_loss
              << "  d_cap " << p.capture_radius << "  episodes " << p.episodes << '\n';
  });
  const std::string path = checkpoint_path_for(cfg.checkpoint, cfg.sim().n_pursuers);
  save_checkpoint(path, make_checkpoint(*result.agent, cfg.train));
  with_output(cfg.curve_csv, [&](std::ostream& out) { write_curve_csv(out, result.curve); });
  std::cout << "saved " << path << " after " << result.episodes << " episodes\n";
  return 0;
}

int cmd_eval(const RunConfig& cfg) {
  SweepSpec spec = base_spec(cfg);
  spec.axis = SweepAxis::EvaderSpeedRatio;
  spec.values = {cfg.sim().evader_speed / cfg.sim().pursuer_speed};
  report_sweep(cfg, run_sweep(spec, make_policy_provider(cfg), std::string(to_string(cfg.policy))));
  return 0;
}

int cmd_sweep(const RunConfig& cfg) {
  SweepSpec spec = base_spec(cfg);
  spec.axis = cfg.sweep_axis;
  spec.values = cfg.sweep_values;
  report_sweep(cfg, run_sweep(spec, make_policy_provider(cfg), std::string(to_string(cfg.policy))));
  return 0;
}

int cmd_tune_gain(const RunConfig& cfg) {
  if (cfg.policy == PolicyKind::Td3) throw ConfigError("tune-gain applies to baseline policies");
  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(cfg.trials));
  for (std::size_t k = 0; k < seeds.size(); ++k) seeds[k] = cfg.base_seed + k;
  const GainTuningReport report = tune_gain(cfg.gain_grid, cfg.trials, [&](double gain) {
    BaselineSettings settings = cfg.baseline;
    settings.gain = gain;
    int captures = 0;
    for (const auto& r : run_trials(make_baseline_factory(cfg.policy, cfg.sim(), settings), cfg.evader, cfg.sim(), seeds,
                                    cfg.workers)) {
      captures += r.captured ? 1 : 0;
    }
    return captures;
  });
  std::cout << "gain,trials,captures,capture_rate\n";
  for (const auto& e : report.entries) {
    std::cout << e.gain << ',' << e.trials << ',' << e.captures << ',' << e.capture_rate() << '\n';
  }
  std::cout << "best_gain = " << report.best_gain << (report.degenerate ? "  (no captures at any gain)" : "") << '\n';
  return 0;
}

int cmd_replay_export(const RunConfig& cfg) {
  SweepSpec spec = base_spec(cfg);
  spec.values = {cfg.sim().evader_speed / cfg.sim().pursuer_speed};
  const SweepPoint point = sweep_point(spec, 0);
  auto policy = make_policy_provider(cfg)(point)();
  std::vector<Frame> frames;
  const TrialReport report = run_trial(*policy, cfg.evader, point.sim, cfg.train.seed, 0, &frames);
  if (cfg.replay_out.empty()) {
    replay_export(std::cout, frames);
  } else {
    with_output(cfg.replay_out, [&](std::ostream& out) { replay_export(out, frames); });
    std::cerr << (report.captured ? "captured" : "timeout") << " after " << report.steps << " steps, " << frames.size()
              << " frames -> " << cfg.replay_out << '\n';
  }
  return 0;
}

int cmd_serve(const RunConfig& cfg) {
  const SimConfig sim = live_sim_config(cfg.sim(), cfg.live);
  SweepSpec spec = base_spec(cfg);
  spec.base = sim;
  spec.values = {sim.evader_speed / sim.pursuer_speed};
  LiveSession session(sim, make_policy_provider(cfg)(sweep_point(spec, 0)), cfg.live, cfg.train.seed);
  LiveServer server(session, cfg.live);
  std::cerr << "serving on ws://" << cfg.live.bind_address << ':' << server.port() << " at " << cfg.live.tick_hz << " Hz\n";
  server.run();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  pursuit::retain_freed_memory();
  CLI::App app{"Multi-agent pursuit-evasion simulator, trainer and benchmark harness"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  std::string config_file;
  bool print_config = false;
  app.add_option("-c,--config", config_file, "key = value configuration file; flags override it");
  app.add_flag("--print-config", print_config, "Print the effective configuration and exit");

  std::map<std::string, std::string> overrides;
  for (const auto& key : config_keys()) {
    app.add_option_function<std::string>("--" + key.name, [&overrides, name = key.name](const std::string& v) { overrides[name] = v; },
                                         key.help)
        ->group("Configuration keys");
  }

  struct Command {
    const char* name;
    const char* help;
    int (*run)(RunConfig&);
  };
  const Command commands[] = {
      {"train", "Train a TD3 pursuit policy and save a checkpoint", cmd_train},
      {"eval", "Evaluate a policy against the configured evader",
       [](RunConfig& c) { return cmd_eval(c); }},
      {"sweep", "Run a parameter sweep and emit CSV/JSON", [](RunConfig& c) { return cmd_sweep(c); }},
      {"tune-gain", "Grid-search the heading controller gain of a baseline",
       [](RunConfig& c) { return cmd_tune_gain(c); }},
      {"replay-export", "Run one trial and write its per-step frames as JSON lines",
       [](RunConfig& c) { return cmd_replay_export(c); }},
      {"serve", "Run the live websocket server with a human-driven evader", [](RunConfig& c) { return cmd_serve(c); }},
  };
  for (const auto& c : commands) app.add_subcommand(c.name, c.help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    RunConfig cfg;
    if (!config_file.empty()) load_config_file(config_file, cfg);
    for (const auto& [key, value] : overrides) set_config_value(cfg, key, value);
    cfg.finalize();
    cfg.train.validate();
    if (cfg.trials < 1) throw ConfigError("trials must be >= 1");
    if (cfg.workers < 1) throw ConfigError("workers must be >= 1");
    if (print_config) {
      write_config(std::cout, cfg);
      return 0;
    }
    for (const auto& c : commands) {
      if (app.got_subcommand(c.name)) return c.run(cfg);
    }
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
