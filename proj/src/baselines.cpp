#include "pursuit/baselines.hpp"

#include <algorithm>

namespace pursuit {

double heading_to_omega(const HeadingController& ctrl, double heading, double dx, double dy) {
  if (dx == 0.0 && dy == 0.0) return 0.0;
  const double desired = std::atan2(dy, dx);
  const double error = wrap_angle(desired - heading);
  return std::clamp(ctrl.gain * error, -ctrl.omega_max, ctrl.omega_max);
}

namespace {

constexpr double kMinSeparation = 1.0;

Vec2 cap_norm(const Vec2& v, double max_norm) {
  const double n = v.norm();
  return n > max_norm && n > 0.0 ? Vec2(v * (max_norm / n)) : v;
}

Vec2 unit_or_zero(const Vec2& v) {
  const double n = v.norm();
  return n > 0.0 ? Vec2(v / n) : Vec2(Vec2::Zero());
}

}  // namespace

Vec2 separation_direction(const Vec2& pi, const Vec2& pj, std::size_t i, std::size_t j) {
  const Vec2 d = pi - pj;
  const double n = d.norm();
  if (n > 0.0) return d / n;
  // Golden-angle direction keyed on the unordered pair; the lower index takes
  // it, the higher index the opposite.
  const std::size_t lo = std::min(i, j), hi = std::max(i, j);
  const double angle = 2.399963229728653 * static_cast<double>(lo * 31 + hi + 1);
  const Vec2 u = unit_from_angle(angle);
  return i < j ? u : Vec2(-u);
}

Vec2 janosov_action(const WorldState& world, std::size_t i, const JanosovParams& params, const SimConfig& cfg) {
  const AgentState& self = world.agents.at(i);
  const Vec2 aim = world.evader.position + params.prediction_horizon * world.evader.velocity;

  Vec2 v = cfg.pursuer_speed * unit_or_zero(aim - self.position);

  for (std::size_t j = 0; j < world.agents.size(); ++j) {
    if (j == i) continue;
    const double d = std::max((self.position - world.agents[j].position).norm(), kMinSeparation);
    if (d >= params.repulsion_radius) continue;
    const double strength = params.repulsion_strength * (params.repulsion_radius - d) / params.repulsion_radius;
    v += cfg.pursuer_speed * strength * separation_direction(self.position, world.agents[j].position, i, j);
  }

  const double r = self.position.norm();
  const double inner = cfg.arena_radius - params.wall_margin;
  if (r > inner && r > 0.0) {
    const double depth = std::min((r - inner) / params.wall_margin, 1.0);
    v -= cfg.pursuer_speed * params.wall_strength * depth * (self.position / r);
  }
  return cap_norm(v, cfg.pursuer_speed);
}

Vec2 angelani_action(const WorldState& world, std::size_t i, const AngelaniParams& params, const SimConfig& cfg) {
  const AgentState& self = world.agents.at(i);
  Vec2 dir = unit_or_zero(world.evader.position - self.position);

  Vec2 alignment = Vec2::Zero();
  int aligned = 0;
  Vec2 repulsion = Vec2::Zero();
  for (std::size_t j = 0; j < world.agents.size(); ++j) {
    if (j == i) continue;
    const AgentState& other = world.agents[j];
    const double d = (self.position - other.position).norm();
    if (d < params.alignment_radius) {
      alignment += unit_from_angle(other.heading);
      ++aligned;
    }
    const double dc = std::max(d, kMinSeparation);
    if (dc < params.repulsion_radius) {
      repulsion += params.repulsion_strength * (params.repulsion_radius - dc) / params.repulsion_radius *
                   separation_direction(self.position, other.position, i, j);
    }
  }
  if (aligned > 0) dir += params.alignment_weight * alignment / static_cast<double>(aligned);
  dir += repulsion;
  const Vec2 u = unit_or_zero(dir);
  return cfg.pursuer_speed * u;
}

Vec2 pure_pursuit_action(const WorldState& world, std::size_t i, const SimConfig& cfg) {
  return cfg.pursuer_speed * unit_or_zero(world.evader.position - world.agents.at(i).position);
}

GainTuningReport tune_gain(const std::vector<double>& grid, int trials, const std::function<int(double)>& evaluate) {
  if (grid.empty()) throw ConfigError("tune_gain: empty gain grid");
  std::vector<double> sorted = grid;
  std::sort(sorted.begin(), sorted.end());

  GainTuningReport report;
  int best_captures = -1;
  for (double k : sorted) {
    GainTuningEntry e{k, trials, evaluate(k)};
    report.entries.push_back(e);
    if (e.captures > best_captures) {
      best_captures = e.captures;
      report.best_gain = k;
    }
  }
  report.degenerate = best_captures <= 0;
  return report;
}

}  // namespace pursuit
