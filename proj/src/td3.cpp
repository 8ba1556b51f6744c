#include "pursuit/td3.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace pursuit {

void Td3Config::validate() const {
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("td3 gamma must be in (0, 1)");
  if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("td3 tau must be in (0, 1]");
  if (policy_delay < 1) throw ConfigError("td3 policy_delay must be >= 1");
  if (batch_size < 1) throw ConfigError("td3 batch_size must be >= 1");
  if (buffer_capacity < 1) throw ConfigError("td3 buffer_capacity must be >= 1");
  if (explore_noise < 0.0 || target_noise < 0.0 || target_noise_clip < 0.0) {
    throw ConfigError("td3 noise scales must be >= 0");
  }
  for (int h : hidden) {
    if (h <= 0) throw ConfigError("td3 hidden sizes must be positive");
  }
}

ReplayBuffer::ReplayBuffer(int obs_dim, int action_dim, std::size_t capacity)
    : obs_(obs_dim, static_cast<Eigen::Index>(capacity)),
      action_(action_dim, static_cast<Eigen::Index>(capacity)),
      next_obs_(obs_dim, static_cast<Eigen::Index>(capacity)),
      reward_(static_cast<Eigen::Index>(capacity)),
      done_(static_cast<Eigen::Index>(capacity)),
      capacity_(capacity) {
  if (capacity == 0) throw DomainError("ReplayBuffer: zero capacity");
}

void ReplayBuffer::push(const Eigen::Ref<const VectorR>& obs, const Eigen::Ref<const VectorR>& action, Real reward,
                        const Eigen::Ref<const VectorR>& next_obs, bool done) {
  if (obs.size() != obs_.rows() || next_obs.size() != obs_.rows() || action.size() != action_.rows()) {
    throw DomainError("ReplayBuffer::push: transition shape mismatch");
  }
  const auto c = static_cast<Eigen::Index>(cursor_);
  obs_.col(c) = obs;
  action_.col(c) = action;
  next_obs_.col(c) = next_obs;
  reward_(c) = reward;
  done_(c) = done ? Real(1) : Real(0);
  cursor_ = (cursor_ + 1) % capacity_;
  size_ = std::min(size_ + 1, capacity_);
}

ReplayBuffer::Batch ReplayBuffer::gather(const std::vector<std::size_t>& slots) const {
  const auto b = static_cast<Eigen::Index>(slots.size());
  Batch out{MatrixR(obs_.rows(), b), MatrixR(action_.rows(), b), VectorR(b), MatrixR(obs_.rows(), b), VectorR(b)};
  for (Eigen::Index k = 0; k < b; ++k) {
    const auto s = static_cast<Eigen::Index>(slots[static_cast<std::size_t>(k)]);
    if (slots[static_cast<std::size_t>(k)] >= size_) throw DomainError("ReplayBuffer::gather: slot not filled");
    out.obs.col(k) = obs_.col(s);
    out.action.col(k) = action_.col(s);
    out.reward(k) = reward_(s);
    out.next_obs.col(k) = next_obs_.col(s);
    out.done(k) = done_(s);
  }
  return out;
}

ReplayBuffer::Batch ReplayBuffer::sample(std::size_t batch_size, Rng& rng) const {
  if (size_ == 0) throw StateError("ReplayBuffer::sample: buffer is empty");
  std::uniform_int_distribution<std::size_t> pick(0, size_ - 1);
  std::vector<std::size_t> slots(batch_size);
  for (auto& s : slots) s = pick(rng);
  return gather(slots);
}

double curriculum_step(CurriculumState& c, long env_steps) {
  if (env_steps < 0) throw DomainError("curriculum_step: negative step count");
  double value;
  if (c.horizon <= 0 || env_steps >= c.horizon) {
    value = c.final;
  } else {
    const double frac = static_cast<double>(env_steps) / static_cast<double>(c.horizon);
    value = c.start + frac * (c.final - c.start);
  }
  // Never loosen the radius once it has tightened.
  c.current = std::min(c.current, value);
  c.current = std::clamp(c.current, std::min(c.start, c.final), std::max(c.start, c.final));
  return c.current;
}

VectorR clipped_double_q_targets(const VectorR& reward, const VectorR& done, const VectorR& q1_next,
                                 const VectorR& q2_next, double gamma) {
  const VectorR not_done = VectorR::Ones(done.size()) - done;
  return reward + static_cast<Real>(gamma) * not_done.cwiseProduct(q1_next.cwiseMin(q2_next));
}

namespace {

std::vector<int> layer_sizes(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> s;
  s.push_back(in);
  s.insert(s.end(), hidden.begin(), hidden.end());
  s.push_back(out);
  return s;
}

MatrixR gaussian(Eigen::Index rows, Eigen::Index cols, double sigma, Rng& rng) {
  std::normal_distribution<double> n(0.0, sigma);
  MatrixR m(rows, cols);
  for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = static_cast<Real>(sigma > 0.0 ? n(rng) : 0.0);
  return m;
}

}  // namespace

Td3Agent::Td3Agent(int obs_dim, int action_dim, const Td3Config& cfg, Rng& init_rng)
    : cfg_(cfg),
      actor_(layer_sizes(obs_dim, cfg.hidden, action_dim), OutputActivation::Tanh),
      critic1_(layer_sizes(obs_dim + action_dim, cfg.hidden, 1), OutputActivation::Linear),
      critic2_(layer_sizes(obs_dim + action_dim, cfg.hidden, 1), OutputActivation::Linear) {
  cfg_.validate();
  actor_.init_uniform_fan_in(init_rng);
  critic1_.init_uniform_fan_in(init_rng);
  critic2_.init_uniform_fan_in(init_rng);
  actor_target_ = actor_;
  critic1_target_ = critic1_;
  critic2_target_ = critic2_;
  actor_opt_ = Adam<Real>(actor_, static_cast<Real>(cfg.actor_lr));
  critic1_opt_ = Adam<Real>(critic1_, static_cast<Real>(cfg.critic_lr));
  critic2_opt_ = Adam<Real>(critic2_, static_cast<Real>(cfg.critic_lr));
}

MatrixR Td3Agent::stack(const MatrixR& obs, const MatrixR& action) {
  MatrixR x(obs.rows() + action.rows(), obs.cols());
  x.topRows(obs.rows()) = obs;
  x.bottomRows(action.rows()) = action;
  return x;
}

MatrixR Td3Agent::act_explore(const MatrixR& features, Rng& rng) const {
  MatrixR a = act(features);
  a += gaussian(a.rows(), a.cols(), cfg_.explore_noise, rng);
  return a.cwiseMax(Real(-1)).cwiseMin(Real(1));
}

VectorR Td3Agent::critic_targets(const ReplayBuffer::Batch& batch, Rng& rng) const {
  MatrixR next_action = actor_target_.forward(batch.next_obs);
  const auto clip = static_cast<Real>(cfg_.target_noise_clip);
  MatrixR noise = gaussian(next_action.rows(), next_action.cols(), cfg_.target_noise, rng).cwiseMax(-clip).cwiseMin(clip);
  next_action = (next_action + noise).cwiseMax(Real(-1)).cwiseMin(Real(1));
  const MatrixR x = stack(batch.next_obs, next_action);
  const VectorR q1 = critic1_target_.forward(x).row(0).transpose();
  const VectorR q2 = critic2_target_.forward(x).row(0).transpose();
  return clipped_double_q_targets(batch.reward, batch.done, q1, q2, cfg_.gamma);
}

double Td3Agent::critic_loss(int which, const ReplayBuffer::Batch& batch, const VectorR& targets) const {
  const Network& critic = which == 1 ? critic1_ : critic2_;
  const VectorR q = critic.forward(stack(batch.obs, batch.action)).row(0).transpose();
  return static_cast<double>((q - targets).squaredNorm()) / static_cast<double>(targets.size());
}

Network::Params Td3Agent::critic_gradients(int which, const ReplayBuffer::Batch& batch, const VectorR& targets,
                                           double* loss) const {
  const Network& critic = which == 1 ? critic1_ : critic2_;
  const auto b = static_cast<Real>(targets.size());
  Network::Cache cache;
  const MatrixR err = critic.forward(stack(batch.obs, batch.action), cache) - targets.transpose();
  if (loss) *loss = static_cast<double>(err.squaredNorm() / b);
  Network::Params grads;
  critic.backward(cache, (Real(2) / b) * err, grads);
  return grads;
}

std::pair<double, double> Td3Agent::critic_step(const ReplayBuffer::Batch& batch, const VectorR& targets) {
  double l1 = 0.0, l2 = 0.0;
  const Network::Params g1 = critic_gradients(1, batch, targets, &l1);
  const Network::Params g2 = critic_gradients(2, batch, targets, &l2);
  critic1_opt_.step(critic1_, g1);
  critic2_opt_.step(critic2_, g2);
  return {l1, l2};
}

double Td3Agent::actor_loss(const ReplayBuffer::Batch& batch) const {
  const MatrixR q = critic1_.forward(stack(batch.obs, actor_.forward(batch.obs)));
  return -static_cast<double>(q.sum() / static_cast<Real>(batch.obs.cols()));
}

Network::Params Td3Agent::actor_gradients(const ReplayBuffer::Batch& batch, double* loss) const {
  Network::Cache actor_cache, critic_cache;
  const MatrixR action = actor_.forward(batch.obs, actor_cache);
  const MatrixR q = critic1_.forward(stack(batch.obs, action), critic_cache);
  const auto b = static_cast<Real>(batch.obs.cols());
  if (loss) *loss = -static_cast<double>(q.sum() / b);

  // d(-mean Q)/dQ = -1/B; push it through critic 1 to the action inputs only.
  Network::Params critic_grads;
  const MatrixR d_input = critic1_.backward(critic_cache, MatrixR::Constant(1, q.cols(), Real(-1) / b), critic_grads);
  Network::Params actor_grads;
  actor_.backward(actor_cache, d_input.bottomRows(action.rows()), actor_grads);
  return actor_grads;
}

double Td3Agent::actor_step(const ReplayBuffer::Batch& batch) {
  double loss = 0.0;
  const Network::Params grads = actor_gradients(batch, &loss);
  actor_opt_.step(actor_, grads);
  return loss;
}

void Td3Agent::soft_update_targets(double tau) {
  const auto t = static_cast<Real>(tau);
  actor_target_.soft_update_from(actor_, t);
  critic1_target_.soft_update_from(critic1_, t);
  critic2_target_.soft_update_from(critic2_, t);
}

UpdateDiagnostics Td3Agent::update(const ReplayBuffer& buffer, Rng& rng) {
  if (buffer.size() == 0) throw StateError("td3 update: replay buffer is empty");
  const auto batch = buffer.sample(static_cast<std::size_t>(cfg_.batch_size), rng);
  const VectorR targets = critic_targets(batch, rng);

  UpdateDiagnostics diag;
  std::tie(diag.critic1_loss, diag.critic2_loss) = critic_step(batch, targets);
  diag.mean_q = static_cast<double>(targets.mean());
  ++updates_;
  if (updates_ % cfg_.policy_delay == 0) {
    diag.actor_loss = actor_step(batch);
    soft_update_targets(cfg_.tau);
  }
  return diag;
}

Action decode_action(const Eigen::Ref<const VectorR>& a, const SimConfig& cfg) {
  Action out;
  out.omega = std::clamp(static_cast<double>(a(0)), -1.0, 1.0) * cfg.omega_max;
  if (cfg.variable_speed && a.size() > 1) {
    out.speed = (std::clamp(static_cast<double>(a(1)), -1.0, 1.0) + 1.0) * 0.5 * cfg.pursuer_speed;
  } else {
    out.speed = cfg.pursuer_speed;
  }
  return out;
}

// --- checkpoint io -------------------------------------------------------

namespace {

constexpr std::array<char, 8> kMagic{'P', 'E', 'V', 'T', 'D', '3', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  std::array<char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.write(bytes.data(), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  std::array<char, sizeof(T)> bytes;
  if (!in.read(bytes.data(), sizeof(T))) throw ConfigError("checkpoint: truncated file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

}  // namespace

void write_checkpoint(std::ostream& out, const PolicyCheckpoint& ckpt) {
  out.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(out, kVersion);
  put<std::int32_t>(out, ckpt.n_pursuers);
  put<std::int32_t>(out, ckpt.neighbor_cap);
  put<std::uint8_t>(out, ckpt.variable_speed ? 1 : 0);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(ckpt.networks.size()));
  for (const auto& net : ckpt.networks) {
    put<std::uint8_t>(out, static_cast<std::uint8_t>(net.output_activation()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(net.sizes().size()));
    for (int s : net.sizes()) put<std::int32_t>(out, s);
    for (const auto& layer : net.layers()) {
      for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
        for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) put<double>(out, static_cast<double>(layer.weight(r, c)));
      }
      for (Eigen::Index r = 0; r < layer.bias.size(); ++r) put<double>(out, static_cast<double>(layer.bias(r)));
    }
  }
  if (!out) throw ConfigError("checkpoint: write failed");
}

PolicyCheckpoint read_checkpoint(std::istream& in) {
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) throw ConfigError("checkpoint: bad magic");
  if (get<std::uint32_t>(in) != kVersion) throw ConfigError("checkpoint: unsupported version");
  PolicyCheckpoint ckpt;
  ckpt.n_pursuers = get<std::int32_t>(in);
  ckpt.neighbor_cap = get<std::int32_t>(in);
  ckpt.variable_speed = get<std::uint8_t>(in) != 0;
  const auto count = get<std::uint32_t>(in);
  if (count > 64) throw ConfigError("checkpoint: implausible network count");
  for (std::uint32_t k = 0; k < count; ++k) {
    const auto act = get<std::uint8_t>(in);
    if (act > 1) throw ConfigError("checkpoint: unknown activation");
    const auto n_sizes = get<std::uint32_t>(in);
    if (n_sizes < 2 || n_sizes > 64) throw ConfigError("checkpoint: implausible layer count");
    std::vector<int> sizes(n_sizes);
    for (auto& s : sizes) {
      s = get<std::int32_t>(in);
      if (s <= 0 || s > (1 << 20)) throw ConfigError("checkpoint: implausible layer size");
    }
    Network net(sizes, static_cast<OutputActivation>(act));
    for (auto& layer : net.layers()) {
      for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
        for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) layer.weight(r, c) = static_cast<Real>(get<double>(in));
      }
      for (Eigen::Index r = 0; r < layer.bias.size(); ++r) layer.bias(r) = static_cast<Real>(get<double>(in));
    }
    ckpt.networks.push_back(std::move(net));
  }
  return ckpt;
}

void save_checkpoint(const std::string& path, const PolicyCheckpoint& ckpt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open checkpoint for writing: " + path);
  write_checkpoint(out, ckpt);
}

PolicyCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open checkpoint: " + path);
  return read_checkpoint(in);
}

}  // namespace pursuit
