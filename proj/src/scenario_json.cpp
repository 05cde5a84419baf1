#include "anonlab/scenario_json.hpp"

namespace anonlab {

using nlohmann::json;

namespace {

json rats(const std::vector<Rat>& xs) {
  json out = json::array();
  for (const Rat& x : xs) out.push_back(format_rat(x));
  return out;
}

json states(const std::vector<State>& xs) {
  json out = json::array();
  for (const State& s : xs) out.push_back(s.id);
  return out;
}

std::vector<Rat> read_rats(const json& j) {
  std::vector<Rat> out;
  for (const auto& e : j) out.push_back(parse_rat(e.get<std::string>()));
  return out;
}

std::vector<State> read_states(const json& j) {
  std::vector<State> out;
  for (const auto& e : j) out.push_back(State{e.get<std::string>()});
  return out;
}

json pattern_json(const Pattern& p) { return json{{"starts", rats(p.starts)}, {"values", states(p.values)}}; }

Pattern read_pattern(const json& j) { return Pattern{read_rats(j.at("starts")), read_states(j.at("values"))}; }

}  // namespace

json to_json(const Scenario& f) {
  if (auto st = f.as_step()) {
    return json{{"kind", "step"}, {"breakpoints", rats(st->breakpoints)}, {"values", states(st->values)}};
  }
  if (auto pr = f.as_periodic()) {
    return json{{"kind", "periodic"},
                {"period", format_rat(pr->period)},
                {"starts", rats(pr->kernel.starts)},
                {"values", states(pr->kernel.values)}};
  }
  const auto& lg = *f.as_log();
  return json{{"kind", "logperiodic"},
              {"fixedPoint", format_rat(lg.fixed_point)},
              {"ratio", format_rat(lg.ratio)},
              {"minus", pattern_json(lg.minus)},
              {"valueAtP", lg.at_fixed.id},
              {"plus", pattern_json(lg.plus)}};
}

Scenario scenario_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "step") return Scenario::step(read_rats(j.at("breakpoints")), read_states(j.at("values")));
  if (kind == "periodic") {
    return Scenario::periodic(parse_rat(j.at("period").get<std::string>()), read_rats(j.at("starts")),
                              read_states(j.at("values")));
  }
  if (kind == "logperiodic") {
    return Scenario::log_periodic(parse_rat(j.at("fixedPoint").get<std::string>()),
                                  parse_rat(j.at("ratio").get<std::string>()), read_pattern(j.at("minus")),
                                  State{j.at("valueAtP").get<std::string>()}, read_pattern(j.at("plus")));
  }
  throw ParseError("unknown scenario kind '" + kind + "'");
}

json to_json(const AffineWarp& t) { return json{{"a", format_rat(t.slope())}, {"c", format_rat(t.offset())}}; }

AffineWarp warp_from_json(const json& j) {
  return AffineWarp(parse_rat(j.at("a").get<std::string>()), parse_rat(j.at("c").get<std::string>()));
}

}  // namespace anonlab
