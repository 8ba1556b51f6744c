#include "pursuit/sim_core.hpp"

#include <algorithm>
#include <limits>

namespace pursuit {

void SimConfig::validate() const {
  if (n_pursuers < 1) throw ConfigError("n_pursuers must be >= 1");
  if (!(arena_radius > 0.0)) throw ConfigError("arena_radius must be > 0");
  if (!(capture_radius > 0.0)) throw ConfigError("capture_radius must be > 0");
  if (timeout_steps <= 0) throw ConfigError("timeout_steps must be > 0");
  if (pursuer_speed < 0.0 || evader_speed < 0.0) throw ConfigError("speeds must be >= 0");
  if (!(omega_max > 0.0)) throw ConfigError("omega_max must be > 0");
  if (!(pursuer_spawn_radius < evader_spawn_inner_radius && evader_spawn_inner_radius < arena_radius)) {
    throw ConfigError("spawn radii must satisfy pursuer_spawn_radius < evader_spawn_inner_radius < arena_radius");
  }
  if (pursuer_spawn_radius < 0.0) throw ConfigError("pursuer_spawn_radius must be >= 0");
}

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::Running: return "running";
    case Outcome::Captured: return "captured";
    case Outcome::Timeout: return "timeout";
  }
  return "unknown";
}

AgentState integrate_unicycle(const AgentState& state, double omega_cmd, double v_cmd, double omega_max,
                              double v_max) {
  if (!all_finite({state.position.x(), state.position.y(), state.heading, omega_cmd, v_cmd})) {
    throw DomainError("integrate_unicycle: non-finite input");
  }
  const double omega = std::clamp(omega_cmd, -omega_max, omega_max);
  const double v = std::clamp(v_cmd, 0.0, v_max);

  AgentState next = state;
  next.position.x() += v * std::cos(state.heading);
  next.position.y() += v * std::sin(state.heading);
  next.heading = wrap_angle(state.heading + omega);
  next.speed = v;
  next.turn_rate = omega;
  next.prev_turn_rate = omega;
  return next;
}

Vec2 clamp_to_arena(const Vec2& p, double arena_radius) {
  if (!std::isfinite(p.x()) || !std::isfinite(p.y())) throw DomainError("clamp_to_arena: non-finite input");
  const double r2 = arena_radius * arena_radius;
  if (p.squaredNorm() <= r2) return p;
  Vec2 q = p * (arena_radius / p.norm());
  // Rounding in the rescale may leave |q|^2 a few ulps above R^2; shrink until it is not.
  while (q.squaredNorm() > r2) {
    q.x() = std::nextafter(q.x(), 0.0);
    q.y() = std::nextafter(q.y(), 0.0);
  }
  return q;
}

std::optional<std::size_t> detect_capture(const WorldState& world, double capture_radius) {
  std::optional<std::size_t> best;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < world.agents.size(); ++i) {
    const double d = (world.agents[i].position - world.evader.position).norm();
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  if (best && best_d <= capture_radius) return best;
  return std::nullopt;
}

WorldState step_world(WorldState world, std::span<const Action> actions, const Vec2& evader_cmd,
                      const SimConfig& cfg) {
  if (world.finished()) throw StateError("step_world: episode already finished");
  if (actions.size() != world.agents.size()) throw DomainError("step_world: action count != pursuer count");
  if (!std::isfinite(evader_cmd.x()) || !std::isfinite(evader_cmd.y())) {
    throw DomainError("step_world: non-finite evader command");
  }

  for (std::size_t i = 0; i < world.agents.size(); ++i) {
    const double v_cmd = cfg.variable_speed ? actions[i].speed : cfg.pursuer_speed;
    AgentState next = integrate_unicycle(world.agents[i], actions[i].omega, v_cmd, cfg.omega_max, cfg.pursuer_speed);
    next.position = clamp_to_arena(next.position, cfg.arena_radius);
    world.agents[i] = next;
  }

  const Vec2 before = world.evader.position;
  world.evader.position = clamp_to_arena(before + world.evader.speed * evader_cmd, cfg.arena_radius);
  world.evader.velocity = world.evader.position - before;
  if (evader_cmd.squaredNorm() > 0.0) world.evader.last_direction = evader_cmd;

  ++world.t;
  if (auto c = detect_capture(world, cfg.capture_radius)) {
    world.outcome = Outcome::Captured;
    world.captor = c;
  } else if (world.t >= cfg.timeout_steps) {
    world.outcome = Outcome::Timeout;
  }
  return world;
}

Vec2 sample_annulus(Rng& rng, double r_inner, double r_outer) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  // Inverse CDF of the radius under area-uniform sampling.
  const double r2 = r_inner * r_inner + unit(rng) * (r_outer * r_outer - r_inner * r_inner);
  const double r = std::sqrt(r2);
  return r * unit_from_angle(angle(rng));
}

WorldState reset_world(const SimConfig& cfg, Rng& rng, EvaderBehavior behavior) {
  cfg.validate();
  std::uniform_real_distribution<double> heading(-kPi, kPi);
  WorldState world;
  world.agents.resize(static_cast<std::size_t>(cfg.n_pursuers));
  for (auto& a : world.agents) {
    a.position = sample_annulus(rng, 0.0, cfg.pursuer_spawn_radius);
    a.heading = heading(rng);
    a.speed = cfg.pursuer_speed;
  }
  world.evader.position = clamp_to_arena(sample_annulus(rng, cfg.evader_spawn_inner_radius, cfg.arena_radius),
                                         cfg.arena_radius);
  world.evader.speed = cfg.evader_speed;
  world.evader.behavior = behavior;
  return world;
}

}  // namespace pursuit
