#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "pursuit/geometry.hpp"

namespace pursuit {

using Rng = std::mt19937_64;

/// World parameters. Distances in pixels, angles in radians, time in steps.
struct SimConfig {
  int n_pursuers = 3;
  double arena_radius = 430.0;
  double capture_radius = 30.0;
  int timeout_steps = 500;
  double pursuer_speed = 10.0;
  double evader_speed = 12.0;
  double omega_max = kPi / 10.0;
  bool variable_speed = false;
  double pursuer_spawn_radius = 100.0;
  double evader_spawn_inner_radius = 300.0;
  std::uint64_t rng_seed = 0;

  /// Throws ConfigError when an invariant is violated.
  void validate() const;
};

/// Pose and kinematic state of one unicycle pursuer.
struct AgentState {
  Vec2 position = Vec2::Zero();
  double heading = 0.0;         ///< wrapped to [-pi, pi)
  double speed = 0.0;           ///< last applied linear speed
  double turn_rate = 0.0;       ///< last applied angular rate
  double prev_turn_rate = 0.0;  ///< heading change of the previous step, observed as psi-dot

  bool operator==(const AgentState&) const = default;
};

enum class PathId : std::uint8_t { A, B, C };

struct RepulsiveBehavior {
  bool operator==(const RepulsiveBehavior&) const = default;
};
struct FixedPathBehavior {
  PathId path = PathId::A;
  double phase = 0.0;  ///< arc-length progress along the path
  bool operator==(const FixedPathBehavior&) const = default;
};
struct ExternalBehavior {
  bool operator==(const ExternalBehavior&) const = default;
};
using EvaderBehavior = std::variant<RepulsiveBehavior, FixedPathBehavior, ExternalBehavior>;

/// Omnidirectional evader.
struct EvaderState {
  Vec2 position = Vec2::Zero();
  double speed = 0.0;
  Vec2 last_direction = Vec2::Zero();  ///< unit direction of the last commanded move (zero if none)
  Vec2 velocity = Vec2::Zero();        ///< realized displacement of the last step
  EvaderBehavior behavior = RepulsiveBehavior{};

  bool operator==(const EvaderState&) const = default;
};

enum class Outcome : std::uint8_t { Running, Captured, Timeout };

std::string_view to_string(Outcome o);

struct WorldState {
  std::vector<AgentState> agents;
  EvaderState evader;
  int t = 0;
  Outcome outcome = Outcome::Running;
  std::optional<std::size_t> captor;

  bool finished() const { return outcome != Outcome::Running; }
  bool operator==(const WorldState&) const = default;
};

/// Commanded turn rate and linear speed for one pursuer.
struct Action {
  double omega = 0.0;
  double speed = 0.0;
};

/// One explicit-Euler unicycle step. Position advances along the pre-update
/// heading, then the heading turns by the saturated rate.
AgentState integrate_unicycle(const AgentState& state, double omega_cmd, double v_cmd, double omega_max,
                              double v_max);

/// Radial projection onto the arena disk; points inside are returned unchanged.
Vec2 clamp_to_arena(const Vec2& p, double arena_radius);

/// Index of the pursuer nearest the evader if within capture_radius (ties to the lower index).
std::optional<std::size_t> detect_capture(const WorldState& world, double capture_radius);

/// Advances every entity one step. Capture is tested after all entities have moved.
WorldState step_world(WorldState world, std::span<const Action> actions, const Vec2& evader_cmd,
                      const SimConfig& cfg);

/// Samples a fresh episode: pursuers uniform in the spawn disk, evader uniform in the spawn annulus.
WorldState reset_world(const SimConfig& cfg, Rng& rng, EvaderBehavior behavior = RepulsiveBehavior{});

/// Uniform point in the annulus r_inner <= |p| <= r_outer (area-weighted).
Vec2 sample_annulus(Rng& rng, double r_inner, double r_outer);

}  // namespace pursuit
