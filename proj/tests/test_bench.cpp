#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "oracles.hpp"
#include "pursuit/bench.hpp"
#include "pursuit/rewards.hpp"

using namespace pursuit;

namespace {

PolicyFactory pure(const SimConfig& cfg) { return make_baseline_factory(PolicyKind::PurePursuit, cfg, {}); }

TrialReport fake(bool captured, int steps) {
  TrialReport r;
  r.captured = captured;
  r.steps = steps;
  return r;
}

}  // namespace

TEST_CASE("pure pursuit catches a stationary evader") {
  SimConfig cfg;
  cfg.n_pursuers = 1;
  cfg.evader_speed = 0.0;
  auto policy = pure(cfg)();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const TrialReport r = run_trial(*policy, {}, cfg, seed);
    CHECK(r.captured);
    CHECK(r.captor == std::optional<std::size_t>(0));
    CHECK(r.steps <= cfg.timeout_steps);
  }
}

TEST_CASE("a lone pursuer rarely catches a twice-as-fast repulsive evader") {
  SimConfig cfg;
  cfg.n_pursuers = 1;
  cfg.evader_speed = 20.0;
  std::vector<std::uint64_t> seeds(50);
  std::iota(seeds.begin(), seeds.end(), 0);
  TrialStats s;
  for (const auto& r : run_trials(make_baseline_factory(PolicyKind::Janosov, cfg, {}), {}, cfg, seeds)) s.add(r);
  CHECK(s.success_rate() <= 0.1);
}

TEST_CASE("trial reports are deterministic and traces are consistent") {
  SimConfig cfg;
  cfg.n_pursuers = 3;
  auto policy = make_baseline_factory(PolicyKind::Janosov, cfg, {})();
  const TrialReport a = run_trial(*policy, {}, cfg, 17);
  const TrialReport b = run_trial(*policy, {}, cfg, 17);
  CHECK(a == b);
  CHECK(a.q_trace.size() == static_cast<std::size_t>(a.steps));
  for (double q : a.q_trace) {
    CHECK(q >= 0.0);
    CHECK(q <= 2.0);
  }
  if (a.captured) CHECK(a.min_dist_trace.back() <= cfg.capture_radius);
}

TEST_CASE("worker count does not change results") {
  SimConfig cfg;
  cfg.n_pursuers = 4;
  std::vector<std::uint64_t> seeds(24);
  std::iota(seeds.begin(), seeds.end(), 100);
  const auto factory = make_baseline_factory(PolicyKind::Janosov, cfg, {});
  CHECK(run_trials(factory, EvaderSetup::parse("fixed"), cfg, seeds, 1) ==
        run_trials(factory, EvaderSetup::parse("fixed"), cfg, seeds, 4));
}

TEST_CASE("worker exceptions reach the caller") {
  SimConfig cfg;
  std::vector<std::uint64_t> seeds(8, 1);
  const PolicyFactory broken = [] () -> std::unique_ptr<PursuitPolicy> { throw ConfigError("no policy"); };
  CHECK_THROWS_AS(run_trials(broken, {}, cfg, seeds, 3), ConfigError);
}

TEST_CASE("statistics use successful trials only for timing") {
  TrialStats s;
  s.add(fake(true, 10));
  s.add(fake(false, 500));
  s.add(fake(true, 30));
  s.add(fake(false, 500));
  CHECK(s.success_rate() == 0.5);
  CHECK(*s.avg_steps() == 20.0);
  CHECK(*s.steps_stderr() == doctest::Approx(10.0));
  CHECK(s.success_stderr() == doctest::Approx(0.25));

  TrialStats none;
  none.add(fake(false, 500));
  CHECK_FALSE(none.avg_steps());

  // Order of trials does not matter.
  TrialStats rev;
  rev.add(fake(false, 500));
  rev.add(fake(true, 30));
  rev.add(fake(false, 500));
  rev.add(fake(true, 10));
  CHECK(rev.success_rate() == s.success_rate());
  CHECK(*rev.avg_steps() == *s.avg_steps());
}

TEST_CASE("evader setups") {
  CHECK(EvaderSetup::parse("repulsive").to_string() == "repulsive");
  CHECK(EvaderSetup::parse("repulsive_printed").sign == RepulsionSign::AsPrinted);
  CHECK(EvaderSetup::parse("fixed").path_for_trial(4) == PathId::B);
  CHECK(EvaderSetup::parse("fixed:C").path_for_trial(0) == PathId::C);
  CHECK_FALSE(EvaderSetup::parse("repulsive").path_for_trial(0));
  CHECK_THROWS_AS(EvaderSetup::parse("spiral"), ConfigError);
}

TEST_CASE("sweep seeds and points") {
  CHECK(sweep_seed(5, 2, 7) == 2'000'012u);
  SweepSpec spec;
  spec.axis = SweepAxis::ArenaScale;
  spec.values = {1.5};
  const SweepPoint p = sweep_point(spec, 0);
  CHECK(p.sim.arena_radius == 645.0);
  CHECK(p.sim.evader_spawn_inner_radius == 450.0);
  CHECK(p.sim.pursuer_spawn_radius == spec.base.pursuer_spawn_radius);
  CHECK(p.train_scale.distance == 860.0);

  spec.axis = SweepAxis::NeighborCap;
  spec.base.n_pursuers = 8;
  spec.values = {4};
  CHECK(sweep_point(spec, 0).neighbor_cap == 4);
  spec.trials_per_value = 0;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  CHECK(sweep_axis_from_string("n_pursuers") == SweepAxis::NPursuers);
}

TEST_CASE("speed sweep: rows, determinism and csv") {
  SweepSpec spec;
  spec.values = {0.8, 1.2, 2.0};
  spec.trials_per_value = 12;
  spec.base.n_pursuers = 4;
  spec.base_seed = 3;
  spec.evader = EvaderSetup::parse("fixed");
  const PolicyProvider provider = [](const SweepPoint& p) {
    return make_baseline_factory(PolicyKind::Janosov, p.sim, {});
  };
  const SweepResult a = run_sweep(spec, provider, "janosov");
  const SweepResult b = run_sweep(spec, provider, "janosov");
  REQUIRE(a.rows.size() == 3);
  std::ostringstream ca, cb;
  write_sweep_csv(ca, a);
  write_sweep_csv(cb, b);
  CHECK(ca.str() == cb.str());
  CHECK(sweep_to_json(a) == sweep_to_json(b));

  std::istringstream lines(ca.str());
  std::string header;
  std::getline(lines, header);
  CHECK(header.starts_with("value,trials,captures,success_rate,success_stderr,avg_steps,steps_stderr,path_A_trials"));
  int rows = 0;
  for (std::string line; std::getline(lines, line);) ++rows;
  CHECK(rows == 3);
  for (const auto& row : a.rows) {
    CHECK(row.all.trials == 12);
    CHECK(row.per_path.size() == 3);
  }
  const auto j = sweep_to_json(a);
  CHECK(j["rows"].size() == 3);
  CHECK(j["axis"] == "evader_speed_ratio");
}

TEST_CASE("zero captures leave avg_steps empty in the csv") {
  SweepSpec spec;
  spec.values = {2.0};
  spec.trials_per_value = 3;
  spec.base.n_pursuers = 1;
  const SweepResult r = run_sweep(
      spec, [](const SweepPoint& p) { return make_baseline_factory(PolicyKind::Angelani, p.sim, {}); }, "angelani");
  REQUIRE(r.rows[0].all.captures == 0);
  std::ostringstream out;
  write_sweep_csv(out, r);
  CHECK(out.str().find("\n2,3,0,0,0,,\n") != std::string::npos);
}

TEST_CASE("replay export round trip and recomputed formation score") {
  SimConfig cfg;
  cfg.n_pursuers = 3;
  auto policy = make_baseline_factory(PolicyKind::Janosov, cfg, {})();
  std::vector<Frame> frames;
  const TrialReport r = run_trial(*policy, {}, cfg, 5, 0, &frames);
  REQUIRE(frames.size() == static_cast<std::size_t>(r.steps));
  std::stringstream ss;
  replay_export(ss, frames);
  CHECK(replay_import(ss) == frames);

  for (const Frame& f : frames) {
    WorldState w;
    for (const auto& p : f.agents) {
      AgentState a;
      a.position = {p.x, p.y};
      w.agents.push_back(a);
    }
    w.evader.position = {f.evader_x, f.evader_y};
    CHECK(f.q == doctest::Approx(oracle::formation_score(w)).epsilon(1e-12));
  }
  CHECK(frames.back().outcome == (r.captured ? "captured" : "timeout"));
}

TEST_CASE("immediate capture exports a single frame") {
  SimConfig cfg;
  cfg.n_pursuers = 2;
  cfg.capture_radius = 1000;
  auto policy = pure(cfg)();
  std::vector<Frame> frames;
  run_trial(*policy, {}, cfg, 1, 0, &frames);
  std::stringstream ss;
  replay_export(ss, frames);
  CHECK(replay_import(ss).size() == 1);
}

TEST_CASE("frame json schema") {
  SimConfig cfg;
  cfg.n_pursuers = 2;
  Rng rng(8);
  const WorldState w = reset_world(cfg, rng);
  const auto j = frame_to_json(make_frame(w, 30));
  CHECK(j["v"] == 1);
  CHECK(j["type"] == "frame");
  CHECK(j["t"] == 0);
  CHECK(j["agents"].size() == 2);
  CHECK(j["agents"][0].contains("psi"));
  CHECK(j["evader"].contains("x"));
  CHECK(j["d_cap"] == 30.0);
  CHECK(j["outcome"] == "running");
  auto bad = j;
  bad["v"] = 2;
  CHECK_THROWS_AS(frame_from_json(bad), DomainError);
  CHECK_THROWS_AS(frame_from_json(nlohmann::json::object()), DomainError);
}
