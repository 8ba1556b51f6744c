#include "pursuit/config.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace pursuit {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ConfigError("bad value for " + key + ": '" + text + "'");
  }
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError("bad boolean for " + key + ": '" + text + "'");
}

template <typename T>
std::vector<T> parse_list(const std::string& key, const std::string& text) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    out.push_back(parse_number<T>(key, item));
  }
  return out;
}

template <typename T>
std::string format(const T& v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

template <typename T>
std::string format_list(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + format(v[i]);
  return out;
}

std::string format_bool(bool b) { return b ? "true" : "false"; }

template <typename T, typename Access>
ConfigKey number_key(std::string name, std::string help, Access access) {
  return {name, std::move(help),
          [access, name](RunConfig& c, const std::string& v) { access(c) = parse_number<T>(name, v); },
          [access](const RunConfig& c) { return format(access(const_cast<RunConfig&>(c))); }};
}

template <typename Access>
ConfigKey bool_key(std::string name, std::string help, Access access) {
  return {name, std::move(help),
          [access, name](RunConfig& c, const std::string& v) { access(c) = parse_bool(name, v); },
          [access](const RunConfig& c) { return format_bool(access(const_cast<RunConfig&>(c))); }};
}

template <typename Access>
ConfigKey string_key(std::string name, std::string help, Access access) {
  return {name, std::move(help), [access](RunConfig& c, const std::string& v) { access(c) = trim(v); },
          [access](const RunConfig& c) { return access(const_cast<RunConfig&>(c)); }};
}

std::vector<ConfigKey> build_keys() {
  std::vector<ConfigKey> k;
  // world
  k.push_back(number_key<int>("n_pursuers", "number of pursuers", [](RunConfig& c) -> int& { return c.sim().n_pursuers; }));
  k.push_back(number_key<double>("arena_radius", "arena radius (px)", [](RunConfig& c) -> double& { return c.sim().arena_radius; }));
  k.push_back(number_key<double>("capture_radius", "capture radius used for testing (px)",
                                 [](RunConfig& c) -> double& { return c.sim().capture_radius; }));
  k.push_back(number_key<int>("timeout_steps", "episode length limit (steps)",
                              [](RunConfig& c) -> int& { return c.sim().timeout_steps; }));
  k.push_back(number_key<double>("pursuer_speed", "pursuer linear speed (px/step)",
                                 [](RunConfig& c) -> double& { return c.sim().pursuer_speed; }));
  k.push_back(number_key<double>("evader_speed", "evader speed (px/step)",
                                 [](RunConfig& c) -> double& { return c.sim().evader_speed; }));
  k.push_back({"evader_speed_ratio", "evader speed as a multiple of pursuer_speed; overrides evader_speed",
               [](RunConfig& c, const std::string& v) {
                 c.evader_speed_ratio = trim(v).empty() ? std::nullopt
                                                        : std::optional<double>(parse_number<double>("evader_speed_ratio", v));
               },
               [](const RunConfig& c) { return c.evader_speed_ratio ? format(*c.evader_speed_ratio) : std::string(); }});
  k.push_back(number_key<double>("omega_max", "turn-rate limit (rad/step)", [](RunConfig& c) -> double& { return c.sim().omega_max; }));
  k.push_back(bool_key("variable_speed", "policy also controls linear speed",
                       [](RunConfig& c) -> bool& { return c.sim().variable_speed; }));
  k.push_back(number_key<double>("pursuer_spawn_radius", "pursuer spawn disk radius (px)",
                                 [](RunConfig& c) -> double& { return c.sim().pursuer_spawn_radius; }));
  k.push_back(number_key<double>("evader_spawn_inner_radius", "inner radius of the evader spawn annulus (px)",
                                 [](RunConfig& c) -> double& { return c.sim().evader_spawn_inner_radius; }));
  k.push_back(number_key<std::uint64_t>("seed", "rng seed for training / single runs",
                                        [](RunConfig& c) -> std::uint64_t& { return c.train.seed; }));
  // reward
  k.push_back(number_key<double>("r_captor", "terminal reward of the capturing pursuer",
                                 [](RunConfig& c) -> double& { return c.train.reward.r_captor; }));
  k.push_back(number_key<double>("r_helper", "terminal reward of the other pursuers",
                                 [](RunConfig& c) -> double& { return c.train.reward.r_helper; }));
  k.push_back(number_key<double>("w_q", "formation-score weight", [](RunConfig& c) -> double& { return c.train.reward.w_formation; }));
  k.push_back(number_key<double>("w_d", "distance weight (per px)", [](RunConfig& c) -> double& { return c.train.reward.w_distance; }));
  k.push_back(bool_key("use_formation_score", "include the formation score in the step reward",
                       [](RunConfig& c) -> bool& { return c.train.reward.use_formation_score; }));
  // td3
  k.push_back({"hidden", "hidden layer sizes, comma separated",
               [](RunConfig& c, const std::string& v) { c.train.td3.hidden = parse_list<int>("hidden", v); },
               [](const RunConfig& c) { return format_list(c.train.td3.hidden); }});
  k.push_back(number_key<double>("gamma", "discount factor", [](RunConfig& c) -> double& { return c.train.td3.gamma; }));
  k.push_back(number_key<double>("tau", "target soft-update rate", [](RunConfig& c) -> double& { return c.train.td3.tau; }));
  k.push_back(number_key<int>("policy_delay", "critic updates per actor update",
                              [](RunConfig& c) -> int& { return c.train.td3.policy_delay; }));
  k.push_back(number_key<double>("explore_noise", "exploration noise std (normalized action units)",
                                 [](RunConfig& c) -> double& { return c.train.td3.explore_noise; }));
  k.push_back(number_key<double>("target_noise", "target smoothing noise std",
                                 [](RunConfig& c) -> double& { return c.train.td3.target_noise; }));
  k.push_back(number_key<double>("target_noise_clip", "target smoothing noise clip",
                                 [](RunConfig& c) -> double& { return c.train.td3.target_noise_clip; }));
  k.push_back(number_key<int>("batch_size", "minibatch size", [](RunConfig& c) -> int& { return c.train.td3.batch_size; }));
  k.push_back(number_key<std::size_t>("buffer_capacity", "replay capacity (transitions)",
                                      [](RunConfig& c) -> std::size_t& { return c.train.td3.buffer_capacity; }));
  k.push_back(number_key<double>("actor_lr", "actor learning rate", [](RunConfig& c) -> double& { return c.train.td3.actor_lr; }));
  k.push_back(number_key<double>("critic_lr", "critic learning rate", [](RunConfig& c) -> double& { return c.train.td3.critic_lr; }));
  k.push_back(number_key<int>("warmup_steps", "env steps of uniform random actions before learning",
                              [](RunConfig& c) -> int& { return c.train.td3.warmup_steps; }));
  k.push_back(number_key<int>("updates_per_step", "gradient updates per env step",
                              [](RunConfig& c) -> int& { return c.train.td3.updates_per_step; }));
  // training loop
  k.push_back(number_key<long>("total_steps", "training env steps", [](RunConfig& c) -> long& { return c.train.total_steps; }));
  k.push_back(bool_key("use_curriculum", "shrink the capture radius during training",
                       [](RunConfig& c) -> bool& { return c.train.use_curriculum; }));
  k.push_back(number_key<double>("curriculum_start", "initial training capture radius (px)",
                                 [](RunConfig& c) -> double& { return c.train.curriculum_start; }));
  k.push_back(number_key<double>("curriculum_fraction", "share of training spent shrinking the radius",
                                 [](RunConfig& c) -> double& { return c.train.curriculum_fraction; }));
  k.push_back({"train_speed_levels", "if set, per-episode evader speed ratios sampled during training",
               [](RunConfig& c, const std::string& v) { c.train.evader_speed_levels = parse_list<double>("train_speed_levels", v); },
               [](const RunConfig& c) { return format_list(c.train.evader_speed_levels); }});
  k.push_back(number_key<long>("eval_interval", "env steps between evaluations",
                               [](RunConfig& c) -> long& { return c.train.eval_interval; }));
  k.push_back(number_key<int>("eval_trials", "trials per evaluation", [](RunConfig& c) -> int& { return c.train.eval_trials; }));
  k.push_back(number_key<std::uint64_t>("eval_seed", "first seed of the evaluation trials",
                                        [](RunConfig& c) -> std::uint64_t& { return c.train.eval_seed; }));
  k.push_back(number_key<int>("neighbor_cap", "observed neighbors (-1: all)", [](RunConfig& c) -> int& { return c.train.neighbor_cap; }));
  // policies
  k.push_back({"policy", "janosov | angelani | pure_pursuit | td3",
               [](RunConfig& c, const std::string& v) { c.policy = policy_from_string(trim(v)); },
               [](const RunConfig& c) { return std::string(to_string(c.policy)); }});
  k.push_back(string_key("checkpoint", "td3 checkpoint path ('{n}' expands to the pursuer count)",
                         [](RunConfig& c) -> std::string& { return c.checkpoint; }));
  k.push_back(number_key<double>("gain", "heading P-controller gain K", [](RunConfig& c) -> double& { return c.baseline.gain; }));
  k.push_back(number_key<double>("janosov_prediction", "target extrapolation horizon (steps)",
                                 [](RunConfig& c) -> double& { return c.baseline.janosov.prediction_horizon; }));
  k.push_back(number_key<double>("janosov_repulsion_radius", "inter-pursuer repulsion radius (px)",
                                 [](RunConfig& c) -> double& { return c.baseline.janosov.repulsion_radius; }));
  k.push_back(number_key<double>("janosov_repulsion_strength", "inter-pursuer repulsion strength",
                                 [](RunConfig& c) -> double& { return c.baseline.janosov.repulsion_strength; }));
  k.push_back(number_key<double>("janosov_wall_margin", "wall softening band (px)",
                                 [](RunConfig& c) -> double& { return c.baseline.janosov.wall_margin; }));
  k.push_back(number_key<double>("janosov_wall_strength", "wall softening strength",
                                 [](RunConfig& c) -> double& { return c.baseline.janosov.wall_strength; }));
  k.push_back(number_key<double>("angelani_alignment_radius", "alignment radius (px)",
                                 [](RunConfig& c) -> double& { return c.baseline.angelani.alignment_radius; }));
  k.push_back(number_key<double>("angelani_alignment_weight", "alignment weight",
                                 [](RunConfig& c) -> double& { return c.baseline.angelani.alignment_weight; }));
  k.push_back(number_key<double>("angelani_repulsion_radius", "repulsion radius (px)",
                                 [](RunConfig& c) -> double& { return c.baseline.angelani.repulsion_radius; }));
  k.push_back(number_key<double>("angelani_repulsion_strength", "repulsion strength",
                                 [](RunConfig& c) -> double& { return c.baseline.angelani.repulsion_strength; }));
  // benchmark
  k.push_back({"evader", "repulsive | repulsive_printed | fixed | fixed:A|B|C",
               [](RunConfig& c, const std::string& v) { c.evader = EvaderSetup::parse(trim(v)); },
               [](const RunConfig& c) { return c.evader.to_string(); }});
  k.push_back(number_key<int>("trials", "trials per evaluation / sweep value", [](RunConfig& c) -> int& { return c.trials; }));
  k.push_back(number_key<std::uint64_t>("base_seed", "seed of trial k at value j is base_seed + j*1e6 + k",
                                        [](RunConfig& c) -> std::uint64_t& { return c.base_seed; }));
  k.push_back(number_key<int>("workers", "trial worker threads", [](RunConfig& c) -> int& { return c.workers; }));
  k.push_back({"sweep_axis", "evader_speed_ratio | n_pursuers | arena_scale | neighbor_cap",
               [](RunConfig& c, const std::string& v) { c.sweep_axis = sweep_axis_from_string(trim(v)); },
               [](const RunConfig& c) { return std::string(to_string(c.sweep_axis)); }});
  k.push_back({"sweep_values", "comma separated sweep values",
               [](RunConfig& c, const std::string& v) { c.sweep_values = parse_list<double>("sweep_values", v); },
               [](const RunConfig& c) { return format_list(c.sweep_values); }});
  k.push_back({"gain_grid", "gains tried by tune-gain",
               [](RunConfig& c, const std::string& v) { c.gain_grid = parse_list<double>("gain_grid", v); },
               [](const RunConfig& c) { return format_list(c.gain_grid); }});
  k.push_back(string_key("out_csv", "CSV output path", [](RunConfig& c) -> std::string& { return c.out_csv; }));
  k.push_back(string_key("out_json", "JSON output path", [](RunConfig& c) -> std::string& { return c.out_json; }));
  k.push_back(string_key("curve_csv", "learning-curve CSV path", [](RunConfig& c) -> std::string& { return c.curve_csv; }));
  k.push_back(string_key("replay_out", "trajectory JSON-lines path", [](RunConfig& c) -> std::string& { return c.replay_out; }));
  // live
  k.push_back(number_key<double>("tick_hz", "live simulation rate", [](RunConfig& c) -> double& { return c.live.tick_hz; }));
  k.push_back(number_key<int>("port", "live server port (0: ephemeral)", [](RunConfig& c) -> int& { return c.live.port; }));
  k.push_back(string_key("bind_address", "live server bind address", [](RunConfig& c) -> std::string& { return c.live.bind_address; }));
  k.push_back(number_key<double>("reset_delay_s", "pause before a finished live episode restarts",
                                 [](RunConfig& c) -> double& { return c.live.reset_delay_s; }));
  k.push_back(number_key<double>("human_speed_ratio", "human evader speed relative to pursuer speed",
                                 [](RunConfig& c) -> double& { return c.live.human_speed_ratio; }));
  k.push_back(string_key("command_log", "live command log path", [](RunConfig& c) -> std::string& { return c.live.command_log; }));
  return k;
}

}  // namespace

void RunConfig::finalize() {
  if (evader_speed_ratio) sim().evader_speed = *evader_speed_ratio * sim().pursuer_speed;
}

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = build_keys();
  return keys;
}

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  for (const auto& k : config_keys()) {
    if (k.name == key) {
      k.set(cfg, value);
      return;
    }
  }
  throw ConfigError("unknown configuration key: " + key);
}

void load_config(std::istream& in, RunConfig& cfg, const std::string& source) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(source + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    try {
      set_config_value(cfg, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError(source + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

void load_config_file(const std::string& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  load_config(in, cfg, path);
}

void write_config(std::ostream& out, const RunConfig& cfg) {
  for (const auto& k : config_keys()) out << "# " << k.help << '\n' << k.name << " = " << k.get(cfg) << '\n';
}

std::string checkpoint_path_for(const std::string& pattern, int n_pursuers) {
  std::string out = pattern;
  const std::string token = "{n}";
  for (auto pos = out.find(token); pos != std::string::npos; pos = out.find(token, pos)) {
    out.replace(pos, token.size(), std::to_string(n_pursuers));
  }
  return out;
}

PolicyProvider make_policy_provider(const RunConfig& cfg) {
  if (cfg.policy != PolicyKind::Td3) {
    return [kind = cfg.policy, settings = cfg.baseline](const SweepPoint& p) {
      return make_baseline_factory(kind, p.sim, settings);
    };
  }
  if (cfg.checkpoint.empty()) throw ConfigError("policy td3 requires a checkpoint");
  auto cache = std::make_shared<std::map<std::string, std::shared_ptr<const Network>>>();
  return [pattern = cfg.checkpoint, cache](const SweepPoint& p) {
    // The checkpoint is chosen by the network input size the observation needs.
    const int trained_n = p.neighbor_cap + 1;
    std::string path = checkpoint_path_for(pattern, trained_n);
    auto it = cache->find(path);
    if (it == cache->end()) {
      PolicyCheckpoint ckpt = load_checkpoint(path);
      if (ckpt.networks.empty()) throw ConfigError("checkpoint has no networks: " + path);
      it = cache->emplace(path, std::make_shared<const Network>(std::move(ckpt.networks.front()))).first;
    }
    return make_td3_factory(it->second, p.sim, p.neighbor_cap, p.train_scale);
  };
}

}  // namespace pursuit
