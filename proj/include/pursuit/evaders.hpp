#pragma once

#include <array>
#include <utility>
#include <vector>

#include "pursuit/sim_core.hpp"

namespace pursuit {

/// Closed polyline with cumulative arc length; the closing segment back to
/// the first vertex is implicit.
class ClosedPath {
 public:
  explicit ClosedPath(std::vector<Vec2> vertices);

  double length() const { return cumulative_.back(); }
  const std::vector<Vec2>& vertices() const { return vertices_; }

  /// Point at arc-length `phase` (taken modulo length()).
  Vec2 point_at(double phase) const;

  /// Distance from `p` to the nearest point on the path.
  double distance_to(const Vec2& p) const;

  /// Next point along the path whose straight-line distance from point_at(phase)
  /// is exactly `step`, and its phase. Returns the wrapped phase in [0, length()).
  std::pair<double, Vec2> advance(double phase, double step) const;

  /// Evenly spaced samples for rendering.
  std::vector<Vec2> sample(std::size_t count) const;

 private:
  std::size_t segment_of(double phase) const;
  Vec2 vertex(std::size_t i) const { return vertices_[i % vertices_.size()]; }

  std::vector<Vec2> vertices_;
  std::vector<double> cumulative_;  // cumulative_[i] = arc length at vertex i; back() = total
};

/// Circle (A), figure-eight (B) and rounded triangle (C), scaled to the arena.
ClosedPath make_fixed_path(PathId id, double arena_radius);

class PathLibrary {
 public:
  explicit PathLibrary(double arena_radius);
  const ClosedPath& operator[](PathId id) const { return paths_[static_cast<std::size_t>(id)]; }
  double arena_radius() const { return arena_radius_; }

 private:
  double arena_radius_;
  std::array<ClosedPath, 3> paths_;
};

PathId path_from_string(std::string_view s);
char path_letter(PathId id);

/// Whether the wall and pursuer terms push away from (Repel) or pull toward
/// (AsPrinted) their sources.
enum class RepulsionSign { Repel, AsPrinted };

/// Unit direction from inverse-distance-squared weighted offsets away from every
/// pursuer and from the nearest arena boundary point. Balanced forces fall back
/// to `previous` (or +x when that is zero).
Vec2 repulsive_direction(const WorldState& world, double arena_radius, const Vec2& previous,
                         RepulsionSign sign = RepulsionSign::Repel);

/// Advances a fixed-path evader so that consecutive positions are exactly v_T apart.
std::pair<FixedPathBehavior, Vec2> fixed_path_step(const FixedPathBehavior& state, const ClosedPath& path,
                                                   double evader_speed);

struct ExternalStep {
  Vec2 displacement = Vec2::Zero();
  Vec2 direction = Vec2::Zero();
  bool normalized = false;  ///< command was non-unit and got rescaled
};

/// Displacement for a human-issued direction; zero means hover.
ExternalStep external_evader_step(const Vec2& cmd, double evader_speed);

struct EvaderMove {
  Vec2 direction = Vec2::Zero();
  EvaderBehavior behavior;
};

/// Direction the evader takes this step given its behavior, and the behavior
/// state after the step. `external_cmd` is only used by ExternalBehavior.
EvaderMove plan_evader_move(const WorldState& world, const PathLibrary& paths,
                            const Vec2& external_cmd = Vec2::Zero(), RepulsionSign sign = RepulsionSign::Repel);

/// Places the evader on `path` at a uniformly random phase and switches its behavior to follow it.
void start_on_path(WorldState& world, const PathLibrary& paths, PathId path, Rng& rng);

}  // namespace pursuit
