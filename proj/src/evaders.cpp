#include "pursuit/evaders.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace pursuit {

ClosedPath::ClosedPath(std::vector<Vec2> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.size() < 2) throw DomainError("ClosedPath: needs at least two vertices");
  cumulative_.resize(vertices_.size() + 1);
  cumulative_[0] = 0.0;
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    cumulative_[i + 1] = cumulative_[i] + (vertex(i + 1) - vertex(i)).norm();
  }
  if (!(length() > 0.0)) throw DomainError("ClosedPath: zero length");
}

std::size_t ClosedPath::segment_of(double phase) const {
  // cumulative_ is non-decreasing; find i with cumulative_[i] <= phase < cumulative_[i+1].
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), phase);
  std::size_t i = static_cast<std::size_t>(std::distance(cumulative_.begin(), it));
  i = i == 0 ? 0 : i - 1;
  return std::min(i, vertices_.size() - 1);
}

Vec2 ClosedPath::point_at(double phase) const {
  double s = std::fmod(phase, length());
  if (s < 0.0) s += length();
  const std::size_t i = segment_of(s);
  const double seg_len = cumulative_[i + 1] - cumulative_[i];
  const double u = seg_len > 0.0 ? (s - cumulative_[i]) / seg_len : 0.0;
  return vertex(i) + u * (vertex(i + 1) - vertex(i));
}

double ClosedPath::distance_to(const Vec2& p) const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    const Vec2 a = vertex(i), d = vertex(i + 1) - a;
    const double len2 = d.squaredNorm();
    const double u = len2 > 0.0 ? std::clamp((p - a).dot(d) / len2, 0.0, 1.0) : 0.0;
    best = std::min(best, (a + u * d - p).norm());
  }
  return best;
}

std::pair<double, Vec2> ClosedPath::advance(double phase, double step) const {
  double s = std::fmod(phase, length());
  if (s < 0.0) s += length();
  const Vec2 origin = point_at(s);
  if (step <= 0.0) return {s, origin};

  std::size_t seg = segment_of(s);
  Vec2 cur = origin;
  double cur_phase = s;
  for (std::size_t visited = 0; visited <= vertices_.size(); ++visited, ++seg) {
    const std::size_t idx = seg % vertices_.size();
    const Vec2 end = vertex(idx + 1);
    const double seg_end_phase = cur_phase + (end - cur).norm();
    if ((end - origin).norm() >= step) {
      // Solve |cur + u (end - cur) - origin| = step for the root in [0, 1].
      const Vec2 w = cur - origin, d = end - cur;
      const double a = d.squaredNorm();
      const double b = 2.0 * w.dot(d);
      const double c = w.squaredNorm() - step * step;
      const double u = std::clamp((-b + std::sqrt(std::max(b * b - 4.0 * a * c, 0.0))) / (2.0 * a), 0.0, 1.0);
      const Vec2 p = cur + u * d;
      return {std::fmod(cur_phase + u * d.norm(), length()), p};
    }
    cur = end;
    cur_phase = seg_end_phase;
  }
  // Step longer than the path extent: fall back to arc-length stepping.
  const double next = std::fmod(s + step, length());
  return {next, point_at(next)};
}

std::vector<Vec2> ClosedPath::sample(std::size_t count) const {
  std::vector<Vec2> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(point_at(length() * static_cast<double>(i) / static_cast<double>(count)));
  }
  return out;
}

ClosedPath make_fixed_path(PathId id, double arena_radius) {
  std::vector<Vec2> v;
  switch (id) {
    case PathId::A: {
      const double r = 0.7 * arena_radius;
      constexpr int kSamples = 1024;
      for (int i = 0; i < kSamples; ++i) v.push_back(r * unit_from_angle(kTwoPi * i / kSamples));
      break;
    }
    case PathId::B: {
      // Lemniscate of Bernoulli, half-width a.
      const double a = 0.75 * arena_radius;
      constexpr int kSamples = 2048;
      for (int i = 0; i < kSamples; ++i) {
        const double t = kTwoPi * i / kSamples;
        const double s = std::sin(t), c = std::cos(t);
        const double den = 1.0 + s * s;
        v.emplace_back(a * c / den, a * s * c / den);
      }
      break;
    }
    case PathId::C: {
      // Equilateral triangle with rounded corners; extreme points at 0.75 R.
      const double corner = 0.15 * arena_radius;
      const double inner = 0.75 * arena_radius - corner;
      constexpr int kArcSamples = 96;
      const double third = kTwoPi / 3.0;
      for (int k = 0; k < 3; ++k) {
        const double theta = kPi / 2.0 + k * third;
        const Vec2 center = inner * unit_from_angle(theta);
        for (int j = 0; j <= kArcSamples; ++j) {
          const double phi = theta - third / 2.0 + third * j / kArcSamples;
          v.push_back(center + corner * unit_from_angle(phi));
        }
      }
      break;
    }
  }
  return ClosedPath(std::move(v));
}

PathLibrary::PathLibrary(double arena_radius)
    : arena_radius_(arena_radius),
      paths_{make_fixed_path(PathId::A, arena_radius), make_fixed_path(PathId::B, arena_radius),
             make_fixed_path(PathId::C, arena_radius)} {}

PathId path_from_string(std::string_view s) {
  if (s == "A" || s == "a") return PathId::A;
  if (s == "B" || s == "b") return PathId::B;
  if (s == "C" || s == "c") return PathId::C;
  throw ConfigError("unknown path id: " + std::string(s));
}

char path_letter(PathId id) { return static_cast<char>('A' + static_cast<int>(id)); }

namespace {

constexpr double kMinForceDistance = 1.0;

}  // namespace

Vec2 repulsive_direction(const WorldState& world, double arena_radius, const Vec2& previous, RepulsionSign sign) {
  const Vec2& e = world.evader.position;
  const double flip = sign == RepulsionSign::Repel ? 1.0 : -1.0;
  Vec2 force = Vec2::Zero();

  for (const auto& a : world.agents) {
    const Vec2 away = e - a.position;
    const double d = away.norm();
    if (d == 0.0) continue;  // no defined direction
    // (e - a) / d^2 is a unit vector scaled by 1/d.
    force += flip * (away / d) / std::max(d, kMinForceDistance);
  }

  // Nearest boundary point: radial projection; at the exact centre use the last heading.
  const double r = e.norm();
  Vec2 outward;
  if (r > 0.0) {
    outward = e / r;
  } else if (previous.squaredNorm() > 0.0) {
    outward = previous.normalized();
  } else {
    outward = Vec2::UnitX();
  }
  // (e - p_w) / d_w^2 with p_w = R * outward; written as a unit vector over d_w so
  // an evader sitting on the boundary still feels the wall.
  const double d_wall = std::max(arena_radius - r, 0.0);
  force += flip * (-outward) / std::max(d_wall, kMinForceDistance);

  const double mag = force.norm();
  if (mag == 0.0 || !std::isfinite(mag)) {
    return previous.squaredNorm() > 0.0 ? Vec2(previous.normalized()) : Vec2(Vec2::UnitX());
  }
  return force / mag;
}

std::pair<FixedPathBehavior, Vec2> fixed_path_step(const FixedPathBehavior& state, const ClosedPath& path,
                                                   double evader_speed) {
  auto [phase, pos] = path.advance(state.phase, evader_speed);
  FixedPathBehavior next = state;
  next.phase = phase;
  return {next, pos};
}

ExternalStep external_evader_step(const Vec2& cmd, double evader_speed) {
  ExternalStep out;
  if (!std::isfinite(cmd.x()) || !std::isfinite(cmd.y())) throw DomainError("external command is not finite");
  const double n = cmd.norm();
  if (n == 0.0) return out;
  out.direction = cmd;
  if (std::abs(n - 1.0) > 1e-9) {
    out.direction = cmd / n;
    out.normalized = true;
  }
  out.displacement = evader_speed * out.direction;
  return out;
}

EvaderMove plan_evader_move(const WorldState& world, const PathLibrary& paths, const Vec2& external_cmd,
                            RepulsionSign sign) {
  const EvaderState& ev = world.evader;
  EvaderMove move;
  move.behavior = ev.behavior;
  std::visit(
      [&](const auto& b) {
        using B = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<B, RepulsiveBehavior>) {
          move.direction = repulsive_direction(world, paths.arena_radius(), ev.last_direction, sign);
        } else if constexpr (std::is_same_v<B, FixedPathBehavior>) {
          if (ev.speed <= 0.0) return;
          auto [next, target] = fixed_path_step(b, paths[b.path], ev.speed);
          const Vec2 delta = target - ev.position;
          const double len = delta.norm();
          move.direction = len > 0.0 ? Vec2(delta / len) : Vec2(Vec2::Zero());
          move.behavior = next;
        } else {
          move.direction = external_evader_step(external_cmd, ev.speed).direction;
        }
      },
      ev.behavior);
  return move;
}

void start_on_path(WorldState& world, const PathLibrary& paths, PathId path, Rng& rng) {
  const ClosedPath& p = paths[path];
  std::uniform_real_distribution<double> phase(0.0, p.length());
  FixedPathBehavior b{path, phase(rng)};
  world.evader.position = p.point_at(b.phase);
  world.evader.behavior = b;
}

}  // namespace pursuit
