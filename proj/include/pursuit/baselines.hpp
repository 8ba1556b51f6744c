#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pursuit/sim_core.hpp"

namespace pursuit {

/// Proportional heading controller that turns an omnidirectional velocity
/// command into a bounded unicycle turn rate.
struct HeadingController {
  double gain = 1.0;
  double omega_max = kPi / 10.0;
};

/// omega = clamp(K * wrap(atan2(dy, dx) - psi), +-omega_max); zero for a zero command.
double heading_to_omega(const HeadingController& ctrl, double heading, double dx, double dy);

/// Prediction + inter-pursuer repulsion + wall softening.
struct JanosovParams {
  double prediction_horizon = 10.0;  ///< steps of target extrapolation
  double repulsion_radius = 60.0;
  double repulsion_strength = 1.0;
  double wall_margin = 60.0;
  double wall_strength = 1.0;
};

/// Target attraction + Vicsek heading alignment + short-range repulsion.
struct AngelaniParams {
  double alignment_radius = 100.0;
  double alignment_weight = 0.5;
  double repulsion_radius = 40.0;
  double repulsion_strength = 1.0;
};

/// Omnidirectional chase velocity for pursuer `i`, magnitude at most v_p.
Vec2 janosov_action(const WorldState& world, std::size_t i, const JanosovParams& params, const SimConfig& cfg);

/// Omnidirectional velocity for pursuer `i` with magnitude v_p.
Vec2 angelani_action(const WorldState& world, std::size_t i, const AngelaniParams& params, const SimConfig& cfg);

/// Straight at the target, magnitude v_p.
Vec2 pure_pursuit_action(const WorldState& world, std::size_t i, const SimConfig& cfg);

/// Unit vector pushing pursuer i away from pursuer j. Coincident pursuers get an
/// index-seeded direction so the pair separates symmetrically.
Vec2 separation_direction(const Vec2& pi, const Vec2& pj, std::size_t i, std::size_t j);

inline const std::vector<double>& default_gain_grid() {
  static const std::vector<double> grid{0.25, 0.5, 1.0, 2.0, 4.0, 8.0};
  return grid;
}

struct GainTuningEntry {
  double gain = 0.0;
  int trials = 0;
  int captures = 0;
  double capture_rate() const { return trials > 0 ? static_cast<double>(captures) / trials : 0.0; }
};

struct GainTuningReport {
  double best_gain = 0.0;
  bool degenerate = false;  ///< no gain captured anything; smallest gain returned
  std::vector<GainTuningEntry> entries;
};

/// Grid search: `evaluate(K)` returns the capture count out of `trials`.
/// Picks the highest capture rate, ties to the smaller gain.
GainTuningReport tune_gain(const std::vector<double>& grid, int trials, const std::function<int(double)>& evaluate);

}  // namespace pursuit
