#include "pursuit/observation.hpp"

#include <algorithm>
#include <numeric>

namespace pursuit {

Eigen::VectorXd Observation::flatten() const {
  Eigen::VectorXd f(size());
  f << heading, heading_rate, target.distance, target.range_rate, target.bearing, target.bearing_rate,
      Eigen::VectorXd::Zero(static_cast<Eigen::Index>(2 * neighbors.size()));
  for (std::size_t j = 0; j < neighbors.size(); ++j) {
    f(static_cast<Eigen::Index>(kObsHeaderSize + 2 * j)) = neighbors[j].distance;
    f(static_cast<Eigen::Index>(kObsHeaderSize + 2 * j + 1)) = neighbors[j].bearing;
  }
  return f;
}

RelativeState relative_state(const AgentState& observer, const Vec2& other, const std::optional<RelativeState>& prev) {
  const Vec2 delta = other - observer.position;
  RelativeState s;
  s.distance = delta.norm();
  s.bearing = s.distance > 0.0 ? wrap_angle(std::atan2(delta.y(), delta.x()) - observer.heading) : 0.0;
  if (prev) {
    s.range_rate = s.distance - prev->distance;
    s.bearing_rate = wrap_angle(s.bearing - prev->bearing);
  }
  return s;
}

Observation build_observation(const WorldState& world, std::size_t i, int neighbor_cap,
                              const std::optional<RelativeState>& prev_target) {
  const std::size_t n = world.agents.size();
  if (i >= n) throw DomainError("build_observation: agent index out of range");
  const AgentState& self = world.agents[i];

  Observation obs;
  obs.heading = self.heading;
  obs.heading_rate = self.prev_turn_rate;
  obs.target = relative_state(self, world.evader.position, prev_target);

  struct Candidate {
    double distance;
    double sweep;  // bearing in [0, 2pi)
    double bearing;
  };
  std::vector<Candidate> others;
  others.reserve(n - 1);
  for (std::size_t j = 0; j < n; ++j) {
    if (j == i) continue;
    const RelativeState r = relative_state(self, world.agents[j].position, std::nullopt);
    others.push_back({r.distance, angle_to_unit_turn(r.bearing), r.bearing});
  }

  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(std::max(neighbor_cap, 0)), others.size());
  if (k < others.size()) {
    // Which neighbors: nearest first. Full-key comparison keeps the selection
    // independent of world indices.
    std::partial_sort(others.begin(), others.begin() + static_cast<std::ptrdiff_t>(k), others.end(),
                      [](const Candidate& a, const Candidate& b) {
                        return a.distance != b.distance ? a.distance < b.distance : a.sweep < b.sweep;
                      });
    others.resize(k);
  }
  // Order: counter-clockwise sweep from the observer heading.
  std::sort(others.begin(), others.end(), [](const Candidate& a, const Candidate& b) {
    return a.sweep != b.sweep ? a.sweep < b.sweep : a.distance < b.distance;
  });

  obs.neighbors.reserve(others.size());
  for (const auto& c : others) obs.neighbors.push_back({c.distance, c.bearing});
  return obs;
}

ObservationScale ObservationScale::from(const SimConfig& cfg) {
  ObservationScale s;
  s.distance = 2.0 * cfg.arena_radius;
  s.range_rate = std::max(cfg.pursuer_speed + cfg.evader_speed, 1e-9);
  s.angle = kPi;
  s.turn_rate = cfg.omega_max;
  return s;
}

Eigen::VectorXd normalize_observation(const Observation& obs, const ObservationScale& scale) {
  Eigen::VectorXd f = obs.flatten();
  f(0) /= scale.angle;
  f(1) /= scale.turn_rate;
  f(2) /= scale.distance;
  f(3) /= scale.range_rate;
  f(4) /= scale.angle;
  f(5) /= scale.turn_rate;
  for (Eigen::Index j = static_cast<Eigen::Index>(kObsHeaderSize); j < f.size(); j += 2) {
    f(j) /= scale.distance;
    f(j + 1) /= scale.angle;
  }
  return f.cwiseMax(-1.0).cwiseMin(1.0);
}

Observation denormalize_observation(const Eigen::Ref<const Eigen::VectorXd>& f, const ObservationScale& scale) {
  if (f.size() < static_cast<Eigen::Index>(kObsHeaderSize) || (f.size() - kObsHeaderSize) % 2 != 0) {
    throw DomainError("denormalize_observation: bad feature length");
  }
  Observation obs;
  obs.heading = f(0) * scale.angle;
  obs.heading_rate = f(1) * scale.turn_rate;
  obs.target.distance = f(2) * scale.distance;
  obs.target.range_rate = f(3) * scale.range_rate;
  obs.target.bearing = f(4) * scale.angle;
  obs.target.bearing_rate = f(5) * scale.turn_rate;
  for (Eigen::Index j = static_cast<Eigen::Index>(kObsHeaderSize); j < f.size(); j += 2) {
    obs.neighbors.push_back({f(j) * scale.distance, f(j + 1) * scale.angle});
  }
  return obs;
}

}  // namespace pursuit
