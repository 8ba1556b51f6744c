#include "pursuit/rewards.hpp"

#include <algorithm>
#include <limits>

namespace pursuit {

void RewardConfig::validate() const {
  if (w_formation < 0.0 || w_distance < 0.0) throw ConfigError("reward weights must be >= 0");
}

namespace {

Vec2 direction_to_target(const Vec2& from, const Vec2& target, bool& degenerate) {
  const Vec2 d = target - from;
  const double len = d.norm();
  if (len == 0.0) {
    degenerate = true;
    return Vec2::UnitX();
  }
  return d / len;
}

}  // namespace

FormationScore formation_score(const WorldState& world) {
  const std::size_t n = world.agents.size();
  if (n < 2) throw DomainError("formation_score: needs at least two pursuers");
  const Vec2& target = world.evader.position;

  std::size_t closest = 0;
  double closest_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double d = (world.agents[i].position - target).squaredNorm();
    if (d < closest_d) {
      closest_d = d;
      closest = i;
    }
  }

  FormationScore out;
  const Vec2 lead = direction_to_target(world.agents[closest].position, target, out.degenerate);
  double sum = 0.0;
  for (const auto& a : world.agents) {
    sum += lead.dot(direction_to_target(a.position, target, out.degenerate)) + 1.0;
  }
  out.q = std::clamp(sum / static_cast<double>(n), 0.0, 2.0);
  return out;
}

std::vector<double> per_agent_rewards(const WorldState& /*before*/, const WorldState& after, const RewardConfig& cfg) {
  const std::size_t n = after.agents.size();
  std::vector<double> rewards(n, 0.0);
  if (after.outcome == Outcome::Captured && after.captor) {
    for (std::size_t i = 0; i < n; ++i) rewards[i] = (i == *after.captor) ? cfg.r_captor : cfg.r_helper;
    return rewards;
  }
  const double q = (cfg.use_formation_score && n >= 2) ? formation_score(after).q : 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = (after.agents[i].position - after.evader.position).norm();
    rewards[i] = -cfg.w_formation * q - cfg.w_distance * d;
  }
  return rewards;
}

}  // namespace pursuit
