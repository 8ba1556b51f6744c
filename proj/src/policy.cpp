#include "pursuit/policy.hpp"

namespace pursuit {

MatrixR ObservationTracker::build(const WorldState& world, std::vector<std::optional<RelativeState>>* next) const {
  const std::size_t n = world.agents.size();
  const auto dim = static_cast<Eigen::Index>(observation_size(static_cast<int>(n), neighbor_cap_));
  MatrixR out(dim, static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const std::optional<RelativeState> prev = i < prev_.size() ? prev_[i] : std::nullopt;
    const Observation obs = build_observation(world, i, neighbor_cap_, prev);
    out.col(static_cast<Eigen::Index>(i)) = normalize_observation(obs, scale_).cast<Real>();
    if (next) (*next)[i] = obs.target;
  }
  return out;
}

MatrixR ObservationTracker::features(const WorldState& world) {
  std::vector<std::optional<RelativeState>> next(world.agents.size());
  MatrixR out = build(world, &next);
  prev_ = std::move(next);
  return out;
}

MatrixR ObservationTracker::peek(const WorldState& world) const { return build(world, nullptr); }

PolicyKind policy_from_string(std::string_view s) {
  if (s == "pure_pursuit") return PolicyKind::PurePursuit;
  if (s == "janosov") return PolicyKind::Janosov;
  if (s == "angelani") return PolicyKind::Angelani;
  if (s == "td3") return PolicyKind::Td3;
  throw ConfigError("unknown policy: " + std::string(s));
}

std::string_view to_string(PolicyKind k) {
  switch (k) {
    case PolicyKind::PurePursuit: return "pure_pursuit";
    case PolicyKind::Janosov: return "janosov";
    case PolicyKind::Angelani: return "angelani";
    case PolicyKind::Td3: return "td3";
  }
  return "unknown";
}

std::vector<Action> BaselinePolicy::act(const WorldState& world) {
  std::vector<Action> actions(world.agents.size());
  for (std::size_t i = 0; i < world.agents.size(); ++i) {
    const Vec2 v = velocity_(world, i);
    actions[i].omega = heading_to_omega(ctrl_, world.agents[i].heading, v.x(), v.y());
    actions[i].speed = speed_;
  }
  return actions;
}

Td3Policy::Td3Policy(std::shared_ptr<const Network> actor, SimConfig cfg, int neighbor_cap,
                     std::optional<ObservationScale> scale)
    : actor_(std::move(actor)), cfg_(cfg), tracker_(neighbor_cap, scale.value_or(ObservationScale::from(cfg))) {
  if (!actor_) throw ConfigError("td3 policy: missing actor network");
  const auto expected = static_cast<int>(observation_size(cfg.n_pursuers, neighbor_cap));
  if (actor_->input_size() != expected) {
    throw ConfigError("td3 policy: actor expects " + std::to_string(actor_->input_size()) +
                      " features but the world produces " + std::to_string(expected));
  }
  if (actor_->output_size() != action_dim_for(cfg.variable_speed)) {
    throw ConfigError("td3 policy: actor output size does not match the speed mode");
  }
}

void Td3Policy::reset(const WorldState& /*world*/) { tracker_.reset(); }

std::vector<Action> Td3Policy::act(const WorldState& world) {
  const MatrixR a = actor_->forward(tracker_.features(world));
  std::vector<Action> actions(world.agents.size());
  for (std::size_t i = 0; i < actions.size(); ++i) actions[i] = decode_action(a.col(static_cast<Eigen::Index>(i)), cfg_);
  return actions;
}

PolicyFactory make_baseline_factory(PolicyKind kind, const SimConfig& cfg, const BaselineSettings& settings) {
  HeadingController ctrl{settings.gain, cfg.omega_max};
  BaselinePolicy::Velocity velocity;
  switch (kind) {
    case PolicyKind::PurePursuit:
      velocity = [cfg](const WorldState& w, std::size_t i) { return pure_pursuit_action(w, i, cfg); };
      break;
    case PolicyKind::Janosov:
      velocity = [cfg, p = settings.janosov](const WorldState& w, std::size_t i) { return janosov_action(w, i, p, cfg); };
      break;
    case PolicyKind::Angelani:
      velocity = [cfg, p = settings.angelani](const WorldState& w, std::size_t i) {
        return angelani_action(w, i, p, cfg);
      };
      break;
    case PolicyKind::Td3:
      throw ConfigError("td3 is not a baseline policy");
  }
  return [velocity, ctrl, speed = cfg.pursuer_speed] {
    return std::make_unique<BaselinePolicy>(velocity, ctrl, speed);
  };
}

PolicyFactory make_td3_factory(std::shared_ptr<const Network> actor, const SimConfig& cfg, int neighbor_cap,
                               std::optional<ObservationScale> scale) {
  // Validate eagerly so configuration errors surface before any trial runs.
  Td3Policy probe(actor, cfg, neighbor_cap, scale);
  return [actor, cfg, neighbor_cap, scale] { return std::make_unique<Td3Policy>(actor, cfg, neighbor_cap, scale); };
}

}  // namespace pursuit
