#include "interlock/propgen.hpp"

#include <set>
#include <string>

namespace interlock {

namespace {

Property make(int cls, std::string name, std::string text) {
  Property p;
  p.cls = cls;
  p.name = std::move(name);
  p.formula = parse_formula(text);
  p.text = std::move(text);
  return p;
}

std::string g(std::uint64_t bound) { return "G[" + std::to_string(bound) + "] "; }

}  // namespace

bool is_safety(int cls) { return cls >= 1 && cls <= 3; }
bool is_availability(int cls) { return cls == 4 || cls == 5; }

std::vector<Property> gen_safety(const InterlockingModel& model, std::uint64_t bound) {
  std::vector<Property> out;
  const auto& graph = model.graph;
  for (const auto& track : graph.tracks) {
    out.push_back(make(no_collision, "no collision on " + track,
                       g(bound) + "trains(" + track + ") <= 1"));
  }
  for (const auto& point : graph.point_ids()) {
    const auto& node = graph.nodes.at(point);
    std::set<std::string> tracks;
    for (const auto& e : node.edges) tracks.insert(graph.edges.at(e).track);
    for (const auto& track : tracks) {
      out.push_back(make(point_held_under_train, point + " held while " + track + " occupied",
                         g(bound) + "(trains(" + track + ") == 1) => (point(" + point +
                             ") == next(point(" + point + ")))"));
    }
  }
  for (const auto& point : graph.point_ids()) {
    const auto& node = graph.nodes.at(point);
    const auto& toe = graph.edges.at(node.toe_edge).track;
    const std::pair<const std::string*, const char*> legs[] = {{&node.normal_edge, "left"},
                                                               {&node.reverse_edge, "right"}};
    for (const auto& [edge, position] : legs) {
      const auto& leg = graph.edges.at(*edge).track;
      if (leg == toe) continue;
      for (const auto& [from, to] : {std::pair{leg, toe}, std::pair{toe, leg}}) {
        const std::string pos = position;
        out.push_back(make(point_set_for_move,
                           point + " " + pos + " for " + from + " to " + to,
                           g(bound) + "(trains(" + from + ") == 1 & trains(" + to +
                               ") == 0 & next(trains(" + from + ")) == 0 & next(trains(" +
                               to + ")) == 1) => (point(" + point + ") == " + pos +
                               " & next(point(" + point + ")) == " + pos + ")"));
      }
    }
  }
  return out;
}

std::vector<Property> gen_availability(const InterlockingModel& model,
                                       std::uint64_t bound, std::uint64_t window) {
  std::vector<Property> out;
  const auto gf = "GF[" + std::to_string(bound) + "," + std::to_string(window) + "] ";
  for (const auto& [route, rule] : model.data.route_requests) {
    out.push_back(make(route_available, route + " eventually set",
                       gf + "route(" + route + ") == set"));
  }
  for (const auto& sub : model.data.names(ComponentKind::subroute)) {
    out.push_back(make(component_released, sub + " eventually free",
                       gf + "sub(" + sub + ") == free"));
  }
  for (const auto& uir : model.data.names(ComponentKind::uir)) {
    out.push_back(make(component_released, uir + " eventually free",
                       gf + "uir(" + uir + ") == free"));
  }
  return out;
}

std::vector<Property> gen_properties(const InterlockingModel& model, std::uint64_t bound,
                                     std::uint64_t window) {
  auto out = gen_safety(model, bound);
  auto more = gen_availability(model, bound, window);
  out.insert(out.end(), std::make_move_iterator(more.begin()),
             std::make_move_iterator(more.end()));
  return out;
}

}  // namespace interlock
