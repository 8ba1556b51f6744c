#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "pursuit/dense_network.hpp"
#include "pursuit/sim_core.hpp"

namespace pursuit {

using Real = double;
using Network = DenseNetwork<Real>;
using MatrixR = Network::Matrix;
using VectorR = Network::Vector;

struct Td3Config {
  std::vector<int> hidden = {256, 256};
  double gamma = 0.99;
  double tau = 0.005;
  int policy_delay = 2;
  double explore_noise = 0.1;  ///< std-dev in normalized action units
  double target_noise = 0.2;
  double target_noise_clip = 0.5;
  int batch_size = 256;
  std::size_t buffer_capacity = 1'000'000;
  double actor_lr = 3e-4;
  double critic_lr = 3e-4;
  int warmup_steps = 5000;  ///< env steps of uniform random actions before learning starts
  int updates_per_step = 1;

  void validate() const;
};

/// Fixed-capacity ring of transitions shared by all pursuers. Columns are transitions.
class ReplayBuffer {
 public:
  struct Batch {
    MatrixR obs;       // obs_dim x B
    MatrixR action;    // action_dim x B
    VectorR reward;    // B
    MatrixR next_obs;  // obs_dim x B
    VectorR done;      // B, 1 for terminal
  };

  ReplayBuffer(int obs_dim, int action_dim, std::size_t capacity);

  void push(const Eigen::Ref<const VectorR>& obs, const Eigen::Ref<const VectorR>& action, Real reward,
            const Eigen::Ref<const VectorR>& next_obs, bool done);

  /// Uniform sample with replacement over stored transitions.
  Batch sample(std::size_t batch_size, Rng& rng) const;

  /// Transitions at the given slots, in order.
  Batch gather(const std::vector<std::size_t>& slots) const;

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  std::size_t cursor() const { return cursor_; }
  int obs_dim() const { return static_cast<int>(obs_.rows()); }
  int action_dim() const { return static_cast<int>(action_.rows()); }

 private:
  MatrixR obs_, action_, next_obs_;
  VectorR reward_, done_;
  std::size_t capacity_;
  std::size_t size_ = 0;
  std::size_t cursor_ = 0;
};

/// Linear capture-radius schedule from `start` to `final` over `horizon` env steps.
struct CurriculumState {
  double start = 100.0;
  double final = 30.0;
  long horizon = 0;
  double current = 100.0;
};

/// Capture radius at `env_steps`; constant at `final` once the horizon has passed.
double curriculum_step(CurriculumState& c, long env_steps);

struct UpdateDiagnostics {
  double critic1_loss = 0.0;
  double critic2_loss = 0.0;
  double mean_q = 0.0;
  std::optional<double> actor_loss;  ///< set on delayed actor steps
};

/// y = r + gamma * (1 - done) * min(q1, q2), elementwise.
VectorR clipped_double_q_targets(const VectorR& reward, const VectorR& done, const VectorR& q1_next,
                                 const VectorR& q2_next, double gamma);

/// Actor and twin critics with their target copies.
class Td3Agent {
 public:
  Td3Agent(int obs_dim, int action_dim, const Td3Config& cfg, Rng& init_rng);

  /// Deterministic policy output in [-1, 1]^A for one feature column per agent.
  MatrixR act(const MatrixR& features) const { return actor_.forward(features); }

  /// Policy output plus N(0, explore_noise) clipped back to [-1, 1].
  MatrixR act_explore(const MatrixR& features, Rng& rng) const;

  /// Target-policy smoothing + clipped double-Q target for a batch.
  VectorR critic_targets(const ReplayBuffer::Batch& batch, Rng& rng) const;

  /// One Adam step on both critics toward `targets`; returns losses before the step.
  std::pair<double, double> critic_step(const ReplayBuffer::Batch& batch, const VectorR& targets);

  /// Mean squared error of critic (1 or 2) against `targets`.
  double critic_loss(int which, const ReplayBuffer::Batch& batch, const VectorR& targets) const;

  /// Gradient of critic_loss(which, ...) with respect to that critic's parameters.
  Network::Params critic_gradients(int which, const ReplayBuffer::Batch& batch, const VectorR& targets,
                                   double* loss = nullptr) const;

  /// -mean Q1(s, pi(s)) over the batch.
  double actor_loss(const ReplayBuffer::Batch& batch) const;
  /// Gradient of actor_loss with respect to the actor parameters (critic held fixed).
  Network::Params actor_gradients(const ReplayBuffer::Batch& batch, double* loss = nullptr) const;
  /// One Adam step on the actor ascending critic 1; returns -mean Q before the step.
  double actor_step(const ReplayBuffer::Batch& batch);

  /// theta' <- tau theta + (1 - tau) theta' for all three target networks.
  void soft_update_targets(double tau);

  /// Full TD3 update: critics every call, actor and targets every `policy_delay` calls.
  UpdateDiagnostics update(const ReplayBuffer& buffer, Rng& rng);

  const Network& actor() const { return actor_; }
  const Network& critic1() const { return critic1_; }
  const Network& critic2() const { return critic2_; }
  const Network& actor_target() const { return actor_target_; }
  const Network& critic1_target() const { return critic1_target_; }
  const Network& critic2_target() const { return critic2_target_; }
  Network& actor() { return actor_; }
  Network& critic1() { return critic1_; }
  Network& critic2() { return critic2_; }
  Network& critic1_target() { return critic1_target_; }
  Network& critic2_target() { return critic2_target_; }
  Network& actor_target() { return actor_target_; }
  const Td3Config& config() const { return cfg_; }
  long update_count() const { return updates_; }
  int obs_dim() const { return actor_.input_size(); }
  int action_dim() const { return actor_.output_size(); }

 private:
  static MatrixR stack(const MatrixR& obs, const MatrixR& action);

  Td3Config cfg_;
  Network actor_, critic1_, critic2_;
  Network actor_target_, critic1_target_, critic2_target_;
  Adam<Real> actor_opt_, critic1_opt_, critic2_opt_;
  long updates_ = 0;
};

/// Maps a normalized action column to unicycle commands. Fixed-speed policies
/// have one output (turn rate); variable-speed policies add a speed head mapped
/// affinely from [-1, 1] to [0, v_p].
Action decode_action(const Eigen::Ref<const VectorR>& normalized, const SimConfig& cfg);

/// Number of policy outputs for the given speed mode.
inline int action_dim_for(bool variable_speed) { return variable_speed ? 2 : 1; }

// Checkpoint: little-endian binary.
//   magic "PEVTD3CK", u32 version,
//   i32 n_pursuers, i32 neighbor_cap, u8 variable_speed,
//   u32 network_count, then per network:
//     u8 output_activation, u32 layer_count + 1, i32 sizes[...],
//     per layer: f64 weight (row-major, out x in), f64 bias[out]
struct PolicyCheckpoint {
  int n_pursuers = 0;
  int neighbor_cap = 0;
  bool variable_speed = false;
  std::vector<Network> networks;  ///< actor first, then critic1, critic2 (and targets when saved)
};

void write_checkpoint(std::ostream& out, const PolicyCheckpoint& ckpt);
PolicyCheckpoint read_checkpoint(std::istream& in);
void save_checkpoint(const std::string& path, const PolicyCheckpoint& ckpt);
PolicyCheckpoint load_checkpoint(const std::string& path);

}  // namespace pursuit
