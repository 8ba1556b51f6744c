#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pursuit/bench.hpp"
#include "pursuit/rewards.hpp"
#include "pursuit/td3.hpp"

namespace pursuit {

struct TrainConfig {
  SimConfig sim;  ///< capture_radius here is the final (testing) radius
  RewardConfig reward;
  Td3Config td3;
  long total_steps = 100'000;
  int neighbor_cap = -1;  ///< -1: observe all other pursuers
  bool use_curriculum = true;
  double curriculum_start = 100.0;
  double curriculum_fraction = 0.25;  ///< share of total_steps spent shrinking the radius
  /// When non-empty, each training episode draws v_T / v_p uniformly from these levels.
  std::vector<double> evader_speed_levels;
  long eval_interval = 25'000;
  int eval_trials = 100;
  std::uint64_t eval_seed = 1'000'000'000ULL;
  EvaderSetup train_evader;
  EvaderSetup eval_evader;
  std::uint64_t seed = 0;
  int eval_workers = 1;

  int resolved_neighbor_cap() const;
  void validate() const;
};

/// One row of the learning curve.
struct CurvePoint {
  long step = 0;
  double success_rate = 0.0;
  std::optional<double> avg_steps;
  double mean_q = 0.0;  ///< mean critic target over the most recent updates
  double critic_loss = 0.0;
  double actor_loss = 0.0;
  double capture_radius = 0.0;
  long episodes = 0;
};

struct TrainResult {
  std::shared_ptr<Td3Agent> agent;
  std::vector<CurvePoint> curve;
  long episodes = 0;
  std::size_t buffer_size = 0;
};

/// Trains one shared policy for cfg.sim.n_pursuers against the training evader,
/// evaluating every eval_interval env steps at the final capture radius.
TrainResult train(const TrainConfig& cfg, const std::function<void(const CurvePoint&)>& on_eval = {});

/// Capture statistics of the deterministic policy over `trials` evaluation episodes.
TrialStats evaluate_actor(const Network& actor, const TrainConfig& cfg, int trials);

/// step,success_rate,avg_steps,mean_q,critic_loss,actor_loss,capture_radius,episodes
void write_curve_csv(std::ostream& out, const std::vector<CurvePoint>& curve);

PolicyCheckpoint make_checkpoint(const Td3Agent& agent, const TrainConfig& cfg);

}  // namespace pursuit
