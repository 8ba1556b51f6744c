#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pursuit/baselines.hpp"
#include "pursuit/observation.hpp"
#include "pursuit/td3.hpp"

namespace pursuit {

/// Builds normalized per-agent features, remembering each agent's previous
/// target relative state so range and bearing rates can be differenced.
class ObservationTracker {
 public:
  ObservationTracker(int neighbor_cap, ObservationScale scale) : neighbor_cap_(neighbor_cap), scale_(scale) {}

  void reset() { prev_.clear(); }

  /// One feature column per pursuer. Advances the rate history, so call once per step.
  MatrixR features(const WorldState& world);

  /// Same as features() without touching the history.
  MatrixR peek(const WorldState& world) const;

  int neighbor_cap() const { return neighbor_cap_; }
  const ObservationScale& scale() const { return scale_; }

 private:
  MatrixR build(const WorldState& world, std::vector<std::optional<RelativeState>>* next) const;

  int neighbor_cap_;
  ObservationScale scale_;
  std::vector<std::optional<RelativeState>> prev_;
};

/// Decentralized pursuit policy: every pursuer acts on its own state.
class PursuitPolicy {
 public:
  virtual ~PursuitPolicy() = default;
  /// Called with the initial world of each episode.
  virtual void reset(const WorldState& /*world*/) {}
  virtual std::vector<Action> act(const WorldState& world) = 0;
};

enum class PolicyKind { PurePursuit, Janosov, Angelani, Td3 };

PolicyKind policy_from_string(std::string_view s);
std::string_view to_string(PolicyKind k);

/// Omnidirectional baseline steered through the heading P controller.
class BaselinePolicy : public PursuitPolicy {
 public:
  using Velocity = std::function<Vec2(const WorldState&, std::size_t)>;
  BaselinePolicy(Velocity velocity, HeadingController ctrl, double speed)
      : velocity_(std::move(velocity)), ctrl_(ctrl), speed_(speed) {}

  std::vector<Action> act(const WorldState& world) override;

 private:
  Velocity velocity_;
  HeadingController ctrl_;
  double speed_;
};

/// Deterministic learned policy shared by all pursuers.
class Td3Policy : public PursuitPolicy {
 public:
  /// `scale` defaults to the normalization of `cfg`; pass the training scale
  /// when evaluating in a different arena.
  Td3Policy(std::shared_ptr<const Network> actor, SimConfig cfg, int neighbor_cap,
            std::optional<ObservationScale> scale = std::nullopt);

  void reset(const WorldState& world) override;
  std::vector<Action> act(const WorldState& world) override;

 private:
  std::shared_ptr<const Network> actor_;
  SimConfig cfg_;
  ObservationTracker tracker_;
};

struct BaselineSettings {
  double gain = 1.0;
  JanosovParams janosov;
  AngelaniParams angelani;
};

using PolicyFactory = std::function<std::unique_ptr<PursuitPolicy>()>;

/// Factory for a baseline policy under `cfg`.
PolicyFactory make_baseline_factory(PolicyKind kind, const SimConfig& cfg, const BaselineSettings& settings);

/// Factory for a learned policy from an actor network.
PolicyFactory make_td3_factory(std::shared_ptr<const Network> actor, const SimConfig& cfg, int neighbor_cap,
                               std::optional<ObservationScale> scale = std::nullopt);

}  // namespace pursuit
