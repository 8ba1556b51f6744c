#include "pursuit/trainer.hpp"

#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace pursuit {

int TrainConfig::resolved_neighbor_cap() const {
  const int full = sim.n_pursuers - 1;
  return neighbor_cap < 0 ? full : std::min(neighbor_cap, full);
}

void TrainConfig::validate() const {
  sim.validate();
  reward.validate();
  td3.validate();
  if (total_steps < 0) throw ConfigError("total_steps must be >= 0");
  if (eval_interval <= 0) throw ConfigError("eval_interval must be > 0");
  if (eval_trials < 1) throw ConfigError("eval_trials must be >= 1");
  if (curriculum_fraction < 0.0 || curriculum_fraction > 1.0) throw ConfigError("curriculum_fraction must be in [0, 1]");
  if (use_curriculum && curriculum_start < sim.capture_radius) {
    throw ConfigError("curriculum_start must be >= capture_radius");
  }
  for (double l : evader_speed_levels) {
    if (l < 0.0) throw ConfigError("evader speed levels must be >= 0");
  }
}

TrialStats evaluate_actor(const Network& actor, const TrainConfig& cfg, int trials) {
  auto snapshot = std::make_shared<const Network>(actor);
  const PolicyFactory factory = make_td3_factory(snapshot, cfg.sim, cfg.resolved_neighbor_cap());
  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(trials));
  for (std::size_t k = 0; k < seeds.size(); ++k) seeds[k] = cfg.eval_seed + k;
  TrialStats stats;
  for (const auto& r : run_trials(factory, cfg.eval_evader, cfg.sim, seeds, cfg.eval_workers)) stats.add(r);
  return stats;
}

namespace {

struct RunningMean {
  double sum = 0.0;
  long count = 0;
  void add(double v) {
    sum += v;
    ++count;
  }
  double take() {
    const double m = count > 0 ? sum / static_cast<double>(count) : 0.0;
    sum = 0.0;
    count = 0;
    return m;
  }
};

}  // namespace

TrainResult train(const TrainConfig& cfg, const std::function<void(const CurvePoint&)>& on_eval) {
  cfg.validate();
  const int neighbor_cap = cfg.resolved_neighbor_cap();
  const int obs_dim = static_cast<int>(observation_size(cfg.sim.n_pursuers, neighbor_cap));
  const int action_dim = action_dim_for(cfg.sim.variable_speed);

  Rng rng(cfg.seed);
  TrainResult result;
  result.agent = std::make_shared<Td3Agent>(obs_dim, action_dim, cfg.td3, rng);
  Td3Agent& agent = *result.agent;
  ReplayBuffer buffer(obs_dim, action_dim, cfg.td3.buffer_capacity);

  CurriculumState curriculum;
  curriculum.start = cfg.use_curriculum ? cfg.curriculum_start : cfg.sim.capture_radius;
  curriculum.final = cfg.sim.capture_radius;
  curriculum.current = curriculum.start;
  curriculum.horizon = static_cast<long>(std::llround(cfg.curriculum_fraction * static_cast<double>(cfg.total_steps)));

  SimConfig episode_cfg = cfg.sim;
  const PathLibrary paths(cfg.sim.arena_radius);
  ObservationTracker tracker(neighbor_cap, ObservationScale::from(cfg.sim));
  std::uniform_real_distribution<double> uniform_action(-1.0, 1.0);

  auto start_episode = [&]() {
    if (!cfg.evader_speed_levels.empty()) {
      std::uniform_int_distribution<std::size_t> pick(0, cfg.evader_speed_levels.size() - 1);
      episode_cfg.evader_speed = cfg.evader_speed_levels[pick(rng)] * cfg.sim.pursuer_speed;
    }
    WorldState w = reset_world(episode_cfg, rng);
    tracker.reset();
    return w;
  };

  WorldState world = start_episode();
  MatrixR obs = tracker.features(world);

  RunningMean critic_loss, actor_loss, mean_q;
  auto evaluate = [&](long step) {
    const TrialStats stats = evaluate_actor(agent.actor(), cfg, cfg.eval_trials);
    CurvePoint p;
    p.step = step;
    p.success_rate = stats.success_rate();
    p.avg_steps = stats.avg_steps();
    p.mean_q = mean_q.take();
    p.critic_loss = critic_loss.take();
    p.actor_loss = actor_loss.take();
    p.capture_radius = curriculum.current;
    p.episodes = result.episodes;
    result.curve.push_back(p);
    if (on_eval) on_eval(p);
  };

  for (long step = 0; step < cfg.total_steps; ++step) {
    episode_cfg.capture_radius = curriculum_step(curriculum, step);

    MatrixR action;
    if (step < cfg.td3.warmup_steps) {
      action.resize(action_dim, obs.cols());
      for (Eigen::Index k = 0; k < action.size(); ++k) action.data()[k] = static_cast<Real>(uniform_action(rng));
    } else {
      action = agent.act_explore(obs, rng);
    }
    std::vector<Action> commands(world.agents.size());
    for (std::size_t i = 0; i < commands.size(); ++i) {
      commands[i] = decode_action(action.col(static_cast<Eigen::Index>(i)), episode_cfg);
    }

    const EvaderMove move = plan_evader_move(world, paths, Vec2::Zero(), cfg.train_evader.sign);
    WorldState before = world;
    before.evader.behavior = move.behavior;
    WorldState next = step_world(before, commands, move.direction, episode_cfg);
    const std::vector<double> rewards = per_agent_rewards(before, next, cfg.reward);
    const MatrixR next_obs = tracker.features(next);
    // Timeouts are not terminal for bootstrapping; only capture ends the task.
    const bool terminal = next.outcome == Outcome::Captured;
    for (Eigen::Index i = 0; i < obs.cols(); ++i) {
      buffer.push(obs.col(i), action.col(i), static_cast<Real>(rewards[static_cast<std::size_t>(i)]), next_obs.col(i),
                  terminal);
    }

    if (next.finished()) {
      ++result.episodes;
      world = start_episode();
      obs = tracker.features(world);
    } else {
      world = std::move(next);
      obs = next_obs;
    }

    if (step >= cfg.td3.warmup_steps && buffer.size() >= static_cast<std::size_t>(cfg.td3.batch_size)) {
      for (int u = 0; u < cfg.td3.updates_per_step; ++u) {
        const UpdateDiagnostics d = agent.update(buffer, rng);
        const double closs = 0.5 * (d.critic1_loss + d.critic2_loss);
        if (!std::isfinite(closs) || (d.actor_loss && !std::isfinite(*d.actor_loss))) {
          std::ostringstream msg;
          msg << "training diverged at step " << step << ": critic losses " << d.critic1_loss << ", "
              << d.critic2_loss << (d.actor_loss ? ", actor loss " + std::to_string(*d.actor_loss) : "");
          throw std::runtime_error(msg.str());
        }
        critic_loss.add(closs);
        mean_q.add(d.mean_q);
        if (d.actor_loss) actor_loss.add(*d.actor_loss);
      }
    }

    if ((step + 1) % cfg.eval_interval == 0) evaluate(step + 1);
  }
  if (cfg.total_steps == 0 || cfg.total_steps % cfg.eval_interval != 0) evaluate(cfg.total_steps);
  result.buffer_size = buffer.size();
  return result;
}

void write_curve_csv(std::ostream& out, const std::vector<CurvePoint>& curve) {
  out << "step,success_rate,avg_steps,mean_q,critic_loss,actor_loss,capture_radius,episodes\n";
  out.precision(10);
  for (const auto& p : curve) {
    out << p.step << ',' << p.success_rate << ',';
    if (p.avg_steps) out << *p.avg_steps;
    out << ',' << p.mean_q << ',' << p.critic_loss << ',' << p.actor_loss << ',' << p.capture_radius << ','
        << p.episodes << '\n';
  }
}

PolicyCheckpoint make_checkpoint(const Td3Agent& agent, const TrainConfig& cfg) {
  PolicyCheckpoint c;
  c.n_pursuers = cfg.sim.n_pursuers;
  c.neighbor_cap = cfg.resolved_neighbor_cap();
  c.variable_speed = cfg.sim.variable_speed;
  c.networks = {agent.actor(),          agent.critic1(),        agent.critic2(),
                agent.actor_target(),   agent.critic1_target(), agent.critic2_target()};
  return c;
}

}  // namespace pursuit
