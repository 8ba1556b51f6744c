#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pursuit/config.hpp"
#include "pursuit/evaders.hpp"
#include "pursuit/frame.hpp"
#include "pursuit/policy.hpp"

namespace pursuit {

/// Evader directions applied at each step of one live episode. Replaying the
/// same seed and directions reproduces the episode exactly.
struct EpisodeLog {
  std::uint64_t seed = 0;
  std::vector<Vec2> directions;

  nlohmann::json to_json() const;
  static EpisodeLog from_json(const nlohmann::json& j);
};

/// Human-evader game state advanced one step per tick. Transport-agnostic:
/// the server feeds it client messages and broadcasts the frames it returns.
class LiveSession {
 public:
  enum class Mode { Live, Paused };

  LiveSession(SimConfig cfg, PolicyFactory policy, LiveConfig live, std::uint64_t seed);

  /// Applies one client message and returns the reply (ack or error message).
  /// Never throws on bad input.
  nlohmann::json handle_message(const std::string& text);

  /// Advances one step in live mode and returns the resulting frame; returns
  /// nothing while paused. A finished episode is shown for reset_delay_s and
  /// then restarts with the next seed.
  std::optional<Frame> tick();

  Mode mode() const { return mode_; }
  const WorldState& world() const { return world_; }
  const SimConfig& config() const { return cfg_; }
  Vec2 latest_direction() const { return latest_dir_; }
  std::int64_t latest_seq() const { return latest_seq_; }
  const EpisodeLog& current_log() const { return log_; }
  const std::vector<EpisodeLog>& finished_logs() const { return finished_; }
  int reset_delay_ticks() const { return reset_delay_ticks_; }

 private:
  void start_episode(std::uint64_t seed);
  void archive_episode();
  static nlohmann::json error(const std::string& message);

  SimConfig cfg_;
  PolicyFactory factory_;
  std::unique_ptr<PursuitPolicy> policy_;
  LiveConfig live_;
  PathLibrary paths_;
  WorldState world_;
  Mode mode_ = Mode::Live;
  Vec2 latest_dir_ = Vec2::Zero();
  std::int64_t latest_seq_ = -1;
  std::uint64_t next_seed_;
  int reset_delay_ticks_;
  int ticks_since_end_ = 0;
  EpisodeLog log_;
  std::vector<EpisodeLog> finished_;
};

/// Session configuration for the human-evader game: the evader is externally
/// driven at human_speed_ratio * pursuer_speed.
SimConfig live_sim_config(const SimConfig& base, const LiveConfig& live);

/// Replays a logged episode with the given pursuit policy; one frame per step.
std::vector<Frame> replay_episode(const SimConfig& cfg, PursuitPolicy& policy, const EpisodeLog& log);

}  // namespace pursuit
