#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "pursuit/sim_core.hpp"

namespace pursuit {

/// Range and bearing of another entity seen from an observer. The rate fields
/// are only populated for the target.
struct RelativeState {
  double distance = 0.0;
  double range_rate = 0.0;
  double bearing = 0.0;  ///< heading error in [-pi, pi)
  double bearing_rate = 0.0;

  bool operator==(const RelativeState&) const = default;
};

struct NeighborState {
  double distance = 0.0;
  double bearing = 0.0;
  bool operator==(const NeighborState&) const = default;
};

/// Per-pursuer observation. Flattened layout (index -> meaning):
///   0 heading, 1 heading rate,
///   2 target distance, 3 target range rate, 4 target bearing, 5 target bearing rate,
///   6 + 2j neighbor j distance, 7 + 2j neighbor j bearing   (j in sweep order)
struct Observation {
  double heading = 0.0;
  double heading_rate = 0.0;
  RelativeState target;
  std::vector<NeighborState> neighbors;

  std::size_t size() const { return 6 + 2 * neighbors.size(); }
  Eigen::VectorXd flatten() const;
  bool operator==(const Observation&) const = default;
};

inline constexpr std::size_t kObsHeaderSize = 6;

/// Number of features for n pursuers with at most k observed neighbors.
inline std::size_t observation_size(int n_pursuers, int neighbor_cap) {
  const int k = std::max(0, std::min(neighbor_cap, n_pursuers - 1));
  return kObsHeaderSize + 2 * static_cast<std::size_t>(k);
}

/// Distance and heading error from `observer` to `other`. When `prev` is given,
/// the rates are finite differences against it (bearing differences taken on the
/// shortest signed arc); otherwise they are zero. Coincident points give bearing 0.
RelativeState relative_state(const AgentState& observer, const Vec2& other, const std::optional<RelativeState>& prev);

/// Observation of pursuer `i`. Selects the `neighbor_cap` nearest pursuers, then
/// orders them counter-clockwise from the observer heading (bearing in [0, 2pi)),
/// ties broken by distance.
Observation build_observation(const WorldState& world, std::size_t i, int neighbor_cap,
                              const std::optional<RelativeState>& prev_target);

/// Scales for turning an Observation into network inputs.
struct ObservationScale {
  double distance = 860.0;    ///< 2 * arena radius
  double range_rate = 22.0;   ///< pursuer speed + evader speed
  double angle = kPi;
  double turn_rate = kPi / 10.0;  ///< omega_max

  static ObservationScale from(const SimConfig& cfg);
};

/// Flattened, scaled features, each clamped to [-1, 1].
Eigen::VectorXd normalize_observation(const Observation& obs, const ObservationScale& scale);

/// Inverse of normalize_observation for unclamped entries.
Observation denormalize_observation(const Eigen::Ref<const Eigen::VectorXd>& features, const ObservationScale& scale);

}  // namespace pursuit
