#pragma once

#include <vector>

#include "pursuit/sim_core.hpp"

namespace pursuit {

struct RewardConfig {
  double r_captor = 100.0;
  double r_helper = 10.0;
  double w_formation = 0.1;   ///< reward per formation-score unit
  double w_distance = 0.002;  ///< reward per pixel of distance to the target
  bool use_formation_score = true;

  void validate() const;
};

struct FormationScore {
  double q = 0.0;
  bool degenerate = false;  ///< some pursuer sat exactly on the target; (1, 0) was used as its direction
};

/// Mean over pursuers of (u_0 . u_i + 1), where u_i points from pursuer i to the
/// target and pursuer 0 is the one nearest the target (ties to the lower index).
/// Lies in [0, 2]; lower means the target is approached from spread-out directions.
FormationScore formation_score(const WorldState& world);

/// Terminal split on capture, otherwise -w_q * q - w_d * d_i for each pursuer.
/// q is taken on `after`; it is 0 with a single pursuer or when disabled.
std::vector<double> per_agent_rewards(const WorldState& before, const WorldState& after, const RewardConfig& cfg);

}  // namespace pursuit
