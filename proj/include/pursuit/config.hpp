#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pursuit/bench.hpp"
#include "pursuit/policy.hpp"
#include "pursuit/trainer.hpp"

namespace pursuit {

struct LiveConfig {
  double tick_hz = 20.0;
  int port = 8765;
  std::string bind_address = "127.0.0.1";
  double reset_delay_s = 2.0;
  double human_speed_ratio = 1.2;  ///< evader speed relative to pursuer speed
  std::string command_log;         ///< where to persist the per-session command log (empty: off)
};

/// Everything a CLI run can be configured with. Loaded from `key = value`
/// files; every key can also be given as a `--key value` flag.
struct RunConfig {
  TrainConfig train;  ///< owns sim, reward and td3 settings
  std::optional<double> evader_speed_ratio;  ///< when set, evader_speed = ratio * pursuer_speed

  PolicyKind policy = PolicyKind::Janosov;
  std::string checkpoint;  ///< td3 actor file; may contain "{n}" for the pursuer count
  BaselineSettings baseline;

  EvaderSetup evader;
  int trials = 100;
  std::uint64_t base_seed = 0;
  int workers = 1;
  SweepAxis sweep_axis = SweepAxis::EvaderSpeedRatio;
  std::vector<double> sweep_values = {0.8, 1.0, 1.2, 1.4, 1.6, 1.8, 2.0};
  std::vector<double> gain_grid = default_gain_grid();

  std::string out_csv;
  std::string out_json;
  std::string curve_csv;
  std::string replay_out;

  LiveConfig live;

  SimConfig& sim() { return train.sim; }
  const SimConfig& sim() const { return train.sim; }

  /// Applies derived settings (evader speed ratio); call after all keys are set.
  void finalize();
};

struct ConfigKey {
  std::string name;
  std::string help;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

/// Every recognized key, in documentation order.
const std::vector<ConfigKey>& config_keys();

/// Sets one key; throws ConfigError for unknown keys or unparsable values.
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);

/// Parses `key = value` lines; `#` starts a comment; blank lines are ignored.
void load_config(std::istream& in, RunConfig& cfg, const std::string& source = "<stream>");
void load_config_file(const std::string& path, RunConfig& cfg);

/// Writes every key with its current value in loadable form.
void write_config(std::ostream& out, const RunConfig& cfg);

/// Checkpoint path with "{n}" replaced by the pursuer count.
std::string checkpoint_path_for(const std::string& pattern, int n_pursuers);

/// Policy provider for sweeps and evaluation under this configuration.
PolicyProvider make_policy_provider(const RunConfig& cfg);

}  // namespace pursuit
