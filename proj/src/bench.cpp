#include "pursuit/bench.hpp"

#include <algorithm>
#include <atomic>
#include <istream>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "pursuit/rewards.hpp"

namespace pursuit {

EvaderSetup EvaderSetup::parse(std::string_view s) {
  EvaderSetup e;
  if (s == "repulsive") return e;
  if (s == "repulsive_printed") {
    e.sign = RepulsionSign::AsPrinted;
    return e;
  }
  if (s == "fixed") {
    e.mode = Mode::FixedPaths;
    return e;
  }
  if (s.starts_with("fixed:")) {
    e.mode = Mode::FixedPath;
    e.path = path_from_string(s.substr(6));
    return e;
  }
  throw ConfigError("unknown evader setup: " + std::string(s));
}

std::string EvaderSetup::to_string() const {
  switch (mode) {
    case Mode::Repulsive: return sign == RepulsionSign::Repel ? "repulsive" : "repulsive_printed";
    case Mode::FixedPaths: return "fixed";
    case Mode::FixedPath: return std::string("fixed:") + path_letter(path);
  }
  return "unknown";
}

std::optional<PathId> EvaderSetup::path_for_trial(std::size_t k) const {
  switch (mode) {
    case Mode::Repulsive: return std::nullopt;
    case Mode::FixedPaths: return static_cast<PathId>(k % 3);
    case Mode::FixedPath: return path;
  }
  return std::nullopt;
}

TrialReport run_trial(PursuitPolicy& policy, const EvaderSetup& evader, const SimConfig& cfg, std::uint64_t seed,
                      std::size_t trial_index, std::vector<Frame>* frames) {
  Rng rng(seed);
  WorldState world = reset_world(cfg, rng);
  const PathLibrary paths(cfg.arena_radius);

  TrialReport report;
  report.seed = seed;
  report.path = evader.path_for_trial(trial_index);
  if (report.path) start_on_path(world, paths, *report.path, rng);

  policy.reset(world);
  report.q_trace.reserve(static_cast<std::size_t>(cfg.timeout_steps));
  report.min_dist_trace.reserve(static_cast<std::size_t>(cfg.timeout_steps));
  while (!world.finished()) {
    const std::vector<Action> actions = policy.act(world);
    const EvaderMove move = plan_evader_move(world, paths, Vec2::Zero(), evader.sign);
    world.evader.behavior = move.behavior;
    world = step_world(std::move(world), actions, move.direction, cfg);

    double min_d = std::numeric_limits<double>::infinity();
    for (const auto& a : world.agents) min_d = std::min(min_d, (a.position - world.evader.position).norm());
    report.min_dist_trace.push_back(min_d);
    report.q_trace.push_back(world.agents.size() >= 2 ? formation_score(world).q : 0.0);
    if (frames) frames->push_back(make_frame(world, cfg.capture_radius));
  }
  report.captured = world.outcome == Outcome::Captured;
  report.captor = world.captor;
  report.steps = world.t;
  return report;
}

void TrialStats::add(const TrialReport& r) {
  ++trials;
  if (r.captured) {
    ++captures;
    capture_steps += r.steps;
    capture_steps_sq += static_cast<long>(r.steps) * r.steps;
  }
}

double TrialStats::success_stderr() const {
  if (trials == 0) return 0.0;
  const double p = success_rate();
  return std::sqrt(p * (1.0 - p) / trials);
}

std::optional<double> TrialStats::avg_steps() const {
  if (captures == 0) return std::nullopt;
  return static_cast<double>(capture_steps) / captures;
}

std::optional<double> TrialStats::steps_stderr() const {
  if (captures < 2) return std::nullopt;
  const double mean = static_cast<double>(capture_steps) / captures;
  const double var = (static_cast<double>(capture_steps_sq) - captures * mean * mean) / (captures - 1);
  return std::sqrt(std::max(var, 0.0) / captures);
}

std::vector<TrialReport> run_trials(const PolicyFactory& factory, const EvaderSetup& evader, const SimConfig& cfg,
                                    const std::vector<std::uint64_t>& seeds, int workers) {
  std::vector<TrialReport> reports(seeds.size());
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  auto worker = [&] {
    try {
      auto policy = factory();
      for (std::size_t k = next++; k < seeds.size(); k = next++) {
        reports[k] = run_trial(*policy, evader, cfg, seeds[k], k);
      }
    } catch (...) {
      const std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
      next = seeds.size();
    }
  };
  const auto n_threads = static_cast<std::size_t>(std::max(1, workers));
  if (n_threads == 1 || seeds.size() < 2) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < std::min(n_threads, seeds.size()); ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
  return reports;
}

SweepAxis sweep_axis_from_string(std::string_view s) {
  if (s == "evader_speed_ratio") return SweepAxis::EvaderSpeedRatio;
  if (s == "n_pursuers") return SweepAxis::NPursuers;
  if (s == "arena_scale") return SweepAxis::ArenaScale;
  if (s == "neighbor_cap") return SweepAxis::NeighborCap;
  throw ConfigError("unknown sweep axis: " + std::string(s));
}

std::string_view to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::EvaderSpeedRatio: return "evader_speed_ratio";
    case SweepAxis::NPursuers: return "n_pursuers";
    case SweepAxis::ArenaScale: return "arena_scale";
    case SweepAxis::NeighborCap: return "neighbor_cap";
  }
  return "unknown";
}

void SweepSpec::validate() const {
  if (trials_per_value < 1) throw ConfigError("sweep: trials_per_value must be >= 1");
  if (values.empty()) throw ConfigError("sweep: no values");
  base.validate();
}

SweepPoint sweep_point(const SweepSpec& spec, std::size_t j) {
  SweepPoint p;
  p.value = spec.values.at(j);
  p.sim = spec.base;
  p.neighbor_cap = spec.neighbor_cap;
  p.train_scale = ObservationScale::from(spec.base);
  switch (spec.axis) {
    case SweepAxis::EvaderSpeedRatio:
      p.sim.evader_speed = p.value * spec.base.pursuer_speed;
      break;
    case SweepAxis::NPursuers:
      p.sim.n_pursuers = static_cast<int>(std::lround(p.value));
      break;
    case SweepAxis::ArenaScale:
      // The pursuer spawn disk stays put; the arena and evader annulus scale.
      p.sim.arena_radius = spec.base.arena_radius * p.value;
      p.sim.evader_spawn_inner_radius = spec.base.evader_spawn_inner_radius * p.value;
      break;
    case SweepAxis::NeighborCap:
      p.neighbor_cap = static_cast<int>(std::lround(p.value));
      break;
  }
  if (p.neighbor_cap < 0) p.neighbor_cap = p.sim.n_pursuers - 1;
  p.neighbor_cap = std::min(p.neighbor_cap, p.sim.n_pursuers - 1);
  p.sim.validate();
  return p;
}

SweepResult run_sweep(const SweepSpec& spec, const PolicyProvider& policy, const std::string& policy_name) {
  spec.validate();
  SweepResult result;
  result.axis = spec.axis;
  result.policy = policy_name;
  result.evader = spec.evader.to_string();
  for (std::size_t j = 0; j < spec.values.size(); ++j) {
    const SweepPoint point = sweep_point(spec, j);
    const PolicyFactory factory = policy(point);
    std::vector<std::uint64_t> seeds(static_cast<std::size_t>(spec.trials_per_value));
    for (std::size_t k = 0; k < seeds.size(); ++k) seeds[k] = sweep_seed(spec.base_seed, j, k);
    const auto reports = run_trials(factory, spec.evader, point.sim, seeds, spec.workers);

    SweepRow row;
    row.value = point.value;
    for (const auto& r : reports) {
      row.all.add(r);
      if (!r.path) continue;
      auto it = std::find_if(row.per_path.begin(), row.per_path.end(), [&](const auto& e) { return e.first == *r.path; });
      if (it == row.per_path.end()) {
        row.per_path.emplace_back(*r.path, TrialStats{});
        it = std::prev(row.per_path.end());
      }
      it->second.add(r);
    }
    std::sort(row.per_path.begin(), row.per_path.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    result.rows.push_back(std::move(row));
  }
  return result;
}

namespace {

std::string opt_str(const std::optional<double>& v) {
  if (!v) return "";
  std::ostringstream os;
  os.precision(10);
  os << *v;
  return os.str();
}

nlohmann::json opt_json(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

nlohmann::json stats_json(const TrialStats& s) {
  return {{"trials", s.trials},
          {"captures", s.captures},
          {"success_rate", s.success_rate()},
          {"success_stderr", s.success_stderr()},
          {"avg_steps", opt_json(s.avg_steps())},
          {"steps_stderr", opt_json(s.steps_stderr())}};
}

}  // namespace

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
  std::vector<PathId> paths;
  for (const auto& row : result.rows) {
    for (const auto& [p, s] : row.per_path) {
      if (std::find(paths.begin(), paths.end(), p) == paths.end()) paths.push_back(p);
    }
  }
  std::sort(paths.begin(), paths.end());

  out << "value,trials,captures,success_rate,success_stderr,avg_steps,steps_stderr";
  for (PathId p : paths) {
    const char c = path_letter(p);
    out << ",path_" << c << "_trials,path_" << c << "_success_rate,path_" << c << "_avg_steps";
  }
  out << '\n';
  out.precision(10);
  for (const auto& row : result.rows) {
    const TrialStats& s = row.all;
    out << row.value << ',' << s.trials << ',' << s.captures << ',' << s.success_rate() << ',' << s.success_stderr()
        << ',' << opt_str(s.avg_steps()) << ',' << opt_str(s.steps_stderr());
    for (PathId p : paths) {
      auto it = std::find_if(row.per_path.begin(), row.per_path.end(), [&](const auto& e) { return e.first == p; });
      if (it == row.per_path.end()) {
        out << ",,,";
      } else {
        out << ',' << it->second.trials << ',' << it->second.success_rate() << ',' << opt_str(it->second.avg_steps());
      }
    }
    out << '\n';
  }
}

nlohmann::json sweep_to_json(const SweepResult& result) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : result.rows) {
    nlohmann::json r = stats_json(row.all);
    r["value"] = row.value;
    if (!row.per_path.empty()) {
      nlohmann::json per = nlohmann::json::object();
      for (const auto& [p, s] : row.per_path) per[std::string(1, path_letter(p))] = stats_json(s);
      r["per_path"] = std::move(per);
    }
    rows.push_back(std::move(r));
  }
  return {{"axis", std::string(to_string(result.axis))},
          {"policy", result.policy},
          {"evader", result.evader},
          {"rows", std::move(rows)}};
}

void replay_export(std::ostream& out, const std::vector<Frame>& frames) {
  for (const auto& f : frames) out << frame_to_json(f).dump() << '\n';
}

std::vector<Frame> replay_import(std::istream& in) {
  std::vector<Frame> frames;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    frames.push_back(frame_from_json(nlohmann::json::parse(line)));
  }
  return frames;
}

}  // namespace pursuit
