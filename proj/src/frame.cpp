#include "pursuit/frame.hpp"

#include "pursuit/rewards.hpp"

namespace pursuit {

Frame make_frame(const WorldState& world, double capture_radius) {
  Frame f;
  f.t = world.t;
  f.agents.reserve(world.agents.size());
  for (const auto& a : world.agents) f.agents.push_back({a.position.x(), a.position.y(), a.heading});
  f.evader_x = world.evader.position.x();
  f.evader_y = world.evader.position.y();
  f.capture_radius = capture_radius;
  f.q = world.agents.size() >= 2 ? formation_score(world).q : 0.0;
  f.outcome = std::string(to_string(world.outcome));
  return f;
}

nlohmann::json frame_to_json(const Frame& f) {
  nlohmann::json agents = nlohmann::json::array();
  for (const auto& a : f.agents) agents.push_back({{"x", a.x}, {"y", a.y}, {"psi", a.psi}});
  return {{"v", kProtocolVersion},
          {"type", "frame"},
          {"t", f.t},
          {"agents", std::move(agents)},
          {"evader", {{"x", f.evader_x}, {"y", f.evader_y}}},
          {"d_cap", f.capture_radius},
          {"q", f.q},
          {"outcome", f.outcome}};
}

Frame frame_from_json(const nlohmann::json& j) {
  try {
    if (j.at("v").get<int>() != kProtocolVersion) throw DomainError("frame: unsupported protocol version");
    if (j.at("type").get<std::string>() != "frame") throw DomainError("frame: not a frame message");
    Frame f;
    f.t = j.at("t").get<int>();
    for (const auto& a : j.at("agents")) {
      f.agents.push_back({a.at("x").get<double>(), a.at("y").get<double>(), a.at("psi").get<double>()});
    }
    f.evader_x = j.at("evader").at("x").get<double>();
    f.evader_y = j.at("evader").at("y").get<double>();
    f.capture_radius = j.at("d_cap").get<double>();
    f.q = j.at("q").get<double>();
    f.outcome = j.at("outcome").get<std::string>();
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("frame: malformed message: ") + e.what());
  }
}

}  // namespace pursuit
