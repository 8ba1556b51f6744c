#include "pursuit/live_session.hpp"

#include <cmath>
#include <fstream>

namespace pursuit {

nlohmann::json EpisodeLog::to_json() const {
  nlohmann::json dirs = nlohmann::json::array();
  for (const auto& d : directions) dirs.push_back({d.x(), d.y()});
  return {{"v", kProtocolVersion}, {"seed", seed}, {"dirs", std::move(dirs)}};
}

EpisodeLog EpisodeLog::from_json(const nlohmann::json& j) {
  EpisodeLog log;
  try {
    log.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& d : j.at("dirs")) log.directions.emplace_back(d.at(0).get<double>(), d.at(1).get<double>());
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("episode log: ") + e.what());
  }
  return log;
}

SimConfig live_sim_config(const SimConfig& base, const LiveConfig& live) {
  SimConfig cfg = base;
  cfg.evader_speed = live.human_speed_ratio * base.pursuer_speed;
  return cfg;
}

LiveSession::LiveSession(SimConfig cfg, PolicyFactory policy, LiveConfig live, std::uint64_t seed)
    : cfg_(cfg),
      factory_(std::move(policy)),
      policy_(factory_()),
      live_(std::move(live)),
      paths_(cfg.arena_radius),
      next_seed_(seed),
      reset_delay_ticks_(std::max(0, static_cast<int>(std::lround(live_.reset_delay_s * live_.tick_hz)))) {
  start_episode(next_seed_++);
}

void LiveSession::start_episode(std::uint64_t seed) {
  Rng rng(seed);
  world_ = reset_world(cfg_, rng, ExternalBehavior{});
  policy_->reset(world_);
  log_ = EpisodeLog{seed, {}};
  ticks_since_end_ = 0;
}

void LiveSession::archive_episode() {
  finished_.push_back(log_);
  if (!live_.command_log.empty()) {
    std::ofstream out(live_.command_log, std::ios::app);
    if (out) out << log_.to_json().dump() << '\n';
  }
}

nlohmann::json LiveSession::error(const std::string& message) {
  return {{"v", kProtocolVersion}, {"type", "error"}, {"message", message}};
}

nlohmann::json LiveSession::handle_message(const std::string& text) {
  nlohmann::json msg;
  try {
    msg = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception&) {
    return error("malformed JSON");
  }
  if (!msg.is_object() || !msg.contains("type") || !msg["type"].is_string()) return error("missing message type");
  if (msg.contains("v") && (!msg["v"].is_number_integer() || msg["v"].get<int>() != kProtocolVersion)) {
    return error("unsupported protocol version");
  }
  const std::string type = msg["type"].get<std::string>();

  if (type == "move") {
    const auto& dir = msg.value("dir", nlohmann::json());
    const auto& seq = msg.value("seq", nlohmann::json());
    if (!dir.is_array() || dir.size() != 2 || !dir[0].is_number() || !dir[1].is_number() || !seq.is_number_integer()) {
      return error("move needs dir:[x,y] and integer seq");
    }
    const Vec2 raw(dir[0].get<double>(), dir[1].get<double>());
    if (!std::isfinite(raw.x()) || !std::isfinite(raw.y())) return error("direction must be finite");
    const auto s = seq.get<std::int64_t>();
    nlohmann::json ack{{"v", kProtocolVersion}, {"type", "ack"}, {"seq", s}};
    if (s <= latest_seq_) {
      ack["stale"] = true;
      return ack;
    }
    const ExternalStep step = external_evader_step(raw, 1.0);
    latest_dir_ = step.direction;
    latest_seq_ = s;
    ack["stale"] = false;
    ack["normalized"] = step.normalized;
    ack["dir"] = {latest_dir_.x(), latest_dir_.y()};
    return ack;
  }
  if (type == "pause") {
    mode_ = Mode::Paused;
    return {{"v", kProtocolVersion}, {"type", "ack"}, {"cmd", "pause"}};
  }
  if (type == "resume") {
    mode_ = Mode::Live;
    return {{"v", kProtocolVersion}, {"type", "ack"}, {"cmd", "resume"}};
  }
  if (type == "reset") {
    std::uint64_t seed = next_seed_++;
    if (msg.contains("seed")) {
      if (!msg["seed"].is_number_unsigned() && !msg["seed"].is_number_integer()) return error("seed must be an integer");
      seed = msg["seed"].get<std::uint64_t>();
    }
    start_episode(seed);
    return {{"v", kProtocolVersion}, {"type", "ack"}, {"cmd", "reset"}, {"seed", seed}};
  }
  return error("unknown message type: " + type);
}

std::optional<Frame> LiveSession::tick() {
  if (mode_ != Mode::Live) return std::nullopt;
  if (world_.finished()) {
    if (++ticks_since_end_ >= reset_delay_ticks_) start_episode(next_seed_++);
    return make_frame(world_, cfg_.capture_radius);
  }
  const std::vector<Action> actions = policy_->act(world_);
  const EvaderMove move = plan_evader_move(world_, paths_, latest_dir_);
  world_.evader.behavior = move.behavior;
  world_ = step_world(std::move(world_), actions, move.direction, cfg_);
  log_.directions.push_back(move.direction);
  if (world_.finished()) archive_episode();
  return make_frame(world_, cfg_.capture_radius);
}

std::vector<Frame> replay_episode(const SimConfig& cfg, PursuitPolicy& policy, const EpisodeLog& log) {
  Rng rng(log.seed);
  WorldState world = reset_world(cfg, rng, ExternalBehavior{});
  const PathLibrary paths(cfg.arena_radius);
  policy.reset(world);
  std::vector<Frame> frames;
  for (const Vec2& dir : log.directions) {
    if (world.finished()) break;
    const std::vector<Action> actions = policy.act(world);
    const EvaderMove move = plan_evader_move(world, paths, dir);
    world.evader.behavior = move.behavior;
    world = step_world(std::move(world), actions, move.direction, cfg);
    frames.push_back(make_frame(world, cfg.capture_radius));
  }
  return frames;
}

}  // namespace pursuit
