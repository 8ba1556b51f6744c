#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pursuit/evaders.hpp"
#include "pursuit/frame.hpp"
#include "pursuit/policy.hpp"

namespace pursuit {

/// How the evader behaves during a batch of trials.
struct EvaderSetup {
  enum class Mode { Repulsive, FixedPaths, FixedPath };
  Mode mode = Mode::Repulsive;
  PathId path = PathId::A;  ///< used when mode == FixedPath
  RepulsionSign sign = RepulsionSign::Repel;

  /// "repulsive", "repulsive_printed", "fixed" (paths cycle A, B, C by trial) or "fixed:A".
  static EvaderSetup parse(std::string_view s);
  std::string to_string() const;

  /// Path for trial `k`, if this is a fixed-path setup.
  std::optional<PathId> path_for_trial(std::size_t k) const;
};

struct TrialReport {
  std::uint64_t seed = 0;
  bool captured = false;
  std::optional<std::size_t> captor;
  int steps = 0;
  std::optional<PathId> path;
  std::vector<double> q_trace;         ///< formation score after each step (0 with one pursuer)
  std::vector<double> min_dist_trace;  ///< nearest pursuer-evader distance after each step

  bool operator==(const TrialReport&) const = default;
};

/// Plays one episode to capture or timeout. Deterministic given `seed`.
/// When `frames` is non-null every post-step world is appended to it.
TrialReport run_trial(PursuitPolicy& policy, const EvaderSetup& evader, const SimConfig& cfg, std::uint64_t seed,
                      std::size_t trial_index = 0, std::vector<Frame>* frames = nullptr);

struct TrialStats {
  int trials = 0;
  int captures = 0;
  long capture_steps = 0;       ///< sum of steps over successful trials
  long capture_steps_sq = 0;

  void add(const TrialReport& r);
  double success_rate() const { return trials > 0 ? static_cast<double>(captures) / trials : 0.0; }
  /// Standard error of the success rate.
  double success_stderr() const;
  /// Mean steps over successful trials only; empty when nothing was captured.
  std::optional<double> avg_steps() const;
  std::optional<double> steps_stderr() const;
};

/// Runs trials `seeds[k]` on `workers` threads; reports come back in seed order.
std::vector<TrialReport> run_trials(const PolicyFactory& factory, const EvaderSetup& evader, const SimConfig& cfg,
                                    const std::vector<std::uint64_t>& seeds, int workers = 1);

enum class SweepAxis { EvaderSpeedRatio, NPursuers, ArenaScale, NeighborCap };

SweepAxis sweep_axis_from_string(std::string_view s);
std::string_view to_string(SweepAxis a);

/// One configuration visited by a sweep.
struct SweepPoint {
  double value = 0.0;
  SimConfig sim;
  int neighbor_cap = 0;
  ObservationScale train_scale;  ///< normalization of the base (training) configuration
};

using PolicyProvider = std::function<PolicyFactory(const SweepPoint&)>;

struct SweepSpec {
  SweepAxis axis = SweepAxis::EvaderSpeedRatio;
  std::vector<double> values;
  int trials_per_value = 100;
  EvaderSetup evader;
  SimConfig base;
  int neighbor_cap = -1;  ///< -1: observe all other pursuers
  std::uint64_t base_seed = 0;
  int workers = 1;

  void validate() const;
};

/// Configuration for value index j of the sweep.
SweepPoint sweep_point(const SweepSpec& spec, std::size_t j);

/// Seed of trial k at value index j.
inline std::uint64_t sweep_seed(std::uint64_t base, std::size_t j, std::size_t k) {
  return base + static_cast<std::uint64_t>(j) * 1'000'000ULL + static_cast<std::uint64_t>(k);
}

struct SweepRow {
  double value = 0.0;
  TrialStats all;
  std::vector<std::pair<PathId, TrialStats>> per_path;  ///< fixed-path setups only
};

struct SweepResult {
  SweepAxis axis = SweepAxis::EvaderSpeedRatio;
  std::string policy;
  std::string evader;
  std::vector<SweepRow> rows;
};

SweepResult run_sweep(const SweepSpec& spec, const PolicyProvider& policy, const std::string& policy_name);

/// value,trials,captures,success_rate,success_stderr,avg_steps,steps_stderr[,path_X_* ...]
void write_sweep_csv(std::ostream& out, const SweepResult& result);
nlohmann::json sweep_to_json(const SweepResult& result);

/// Trajectory as JSON lines, one frame message per step.
void replay_export(std::ostream& out, const std::vector<Frame>& frames);
std::vector<Frame> replay_import(std::istream& in);

}  // namespace pursuit
