#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "pursuit/sim_core.hpp"

namespace pursuit {

inline constexpr int kProtocolVersion = 1;

/// Renderable snapshot of a world. Serialized as the versioned "frame" message
/// shared by the live server and trajectory replays.
struct Frame {
  struct Pose {
    double x = 0.0, y = 0.0, psi = 0.0;
    bool operator==(const Pose&) const = default;
  };
  int t = 0;
  std::vector<Pose> agents;
  double evader_x = 0.0, evader_y = 0.0;
  double capture_radius = 0.0;
  double q = 0.0;
  std::string outcome = "running";

  bool operator==(const Frame&) const = default;
};

/// Snapshot of `world`; q is the formation score (0 with fewer than two pursuers).
Frame make_frame(const WorldState& world, double capture_radius);

nlohmann::json frame_to_json(const Frame& f);
/// Throws DomainError on a malformed or wrong-version message.
Frame frame_from_json(const nlohmann::json& j);

}  // namespace pursuit
