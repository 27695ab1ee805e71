#include "interlock/layout.hpp"

#include <algorithm>
#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <queue>
#include <sstream>

#include "interlock/error.hpp"

namespace interlock {

SchemaError::SchemaError(std::string element, std::string reason)
    : Error("<" + element + ">: " + reason), element_(std::move(element)) {}

std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::point: return "point";
    case NodeKind::signal: return "signal";
    case NodeKind::joint: return "joint";
    case NodeKind::boundary: return "boundary";
  }
  return "?";
}

std::string_view to_string(Direction direction) {
  return direction == Direction::up ? "up" : "down";
}

std::string StationGraph::resolve_node(std::string_view name) const {
  if (auto it = signals.find(std::string(name)); it != signals.end()) {
    return it->second;
  }
  if (nodes.contains(std::string(name))) return std::string(name);
  return {};
}

std::vector<std::string> StationGraph::point_ids() const {
  std::vector<std::string> out;
  for (const auto& [id, node] : nodes) {
    if (node.kind == NodeKind::point) out.push_back(id);
  }
  return out;
}

namespace {

namespace pt = boost::property_tree;

std::string required(const pt::ptree& element, const std::string& tag,
                     const std::string& attribute) {
  auto value = element.get_optional<std::string>("<xmlattr>." + attribute);
  if (!value || value->empty()) {
    throw SchemaError(tag, "missing attribute '" + attribute + "'");
  }
  return *value;
}

void check_topology(const StationGraph& g) {
  for (const auto& [id, node] : g.nodes) {
    const auto degree = node.edges.size();
    switch (node.kind) {
      case NodeKind::point: {
        if (degree != 3) {
          throw TopologyError("point " + id + " has " + std::to_string(degree) +
                              " incident edges, expected 3");
        }
        std::set<std::string> roles{node.toe_edge, node.normal_edge,
                                    node.reverse_edge};
        std::set<std::string> incident(node.edges.begin(), node.edges.end());
        if (roles.size() != 3 || roles != incident) {
          throw TopologyError("point " + id +
                              ": toe/normal/reverse must be its three edges");
        }
        break;
      }
      case NodeKind::signal:
      case NodeKind::joint:
        if (degree == 0 || degree > 2) {
          throw TopologyError(std::string(to_string(node.kind)) + " " + id +
                              " has " + std::to_string(degree) + " edges");
        }
        break;
      case NodeKind::boundary:
        if (degree != 1) {
          throw TopologyError("node " + id + " is not declared and has " +
                              std::to_string(degree) +
                              " edges; boundaries need exactly 1");
        }
        break;
    }
  }
  for (const auto& track : g.tracks) {
    const bool owned = std::any_of(g.edges.begin(), g.edges.end(),
                                   [&](const auto& e) { return e.second.track == track; });
    if (!owned) throw TopologyError("track " + track + " owns no edge");
  }
  if (g.nodes.empty()) return;
  std::set<std::string> seen{g.nodes.begin()->first};
  std::queue<std::string> frontier;
  frontier.push(g.nodes.begin()->first);
  while (!frontier.empty()) {
    const auto id = frontier.front();
    frontier.pop();
    for (const auto& e : g.nodes.at(id).edges) {
      const auto& next = g.edges.at(e).other(id);
      if (seen.insert(next).second) frontier.push(next);
    }
  }
  if (seen.size() != g.nodes.size()) {
    throw TopologyError("station graph is not connected");
  }
}

}  // namespace

ParsedLayout parse_layout_ex(std::string_view xml, LayoutOptions options) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(xml)};
    pt::read_xml(in, tree, pt::xml_parser::trim_whitespace);
  } catch (const pt::xml_parser_error& e) {
    throw XmlError("malformed XML at line " + std::to_string(e.line()) + ": " +
                   e.message());
  }
  auto station = tree.get_child_optional("station");
  if (!station) throw SchemaError("station", "missing root element");

  ParsedLayout out;
  StationGraph& g = out.graph;
  g.name = station->get<std::string>("<xmlattr>.name", "");

  struct PointDecl {
    std::string id, toe, normal, reverse;
  };
  struct SignalDecl {
    std::string id, node;
    Direction dir;
  };
  std::vector<PointDecl> points;
  std::vector<SignalDecl> signal_decls;
  std::vector<std::pair<std::string, std::string>> joints;
  std::vector<std::string> entries;

  for (const auto& [tag, child] : *station) {
    if (tag == "<xmlattr>" || tag == "<xmlcomment>") continue;
    if (tag == "track") {
      auto id = required(child, tag, "id");
      if (!g.tracks.insert(id).second) {
        throw SchemaError(tag, "duplicate track id '" + id + "'");
      }
    } else if (tag == "edge") {
      Edge e{required(child, tag, "id"), required(child, tag, "from"),
             required(child, tag, "to"), required(child, tag, "track")};
      if (e.from == e.to) {
        throw TopologyError("edge " + e.id + " has identical endpoints");
      }
      if (!g.edges.emplace(e.id, e).second) {
        throw SchemaError(tag, "duplicate edge id '" + e.id + "'");
      }
    } else if (tag == "point") {
      points.push_back({required(child, tag, "id"), required(child, tag, "toe"),
                        required(child, tag, "normal"),
                        required(child, tag, "reverse")});
    } else if (tag == "signal") {
      const auto dir = required(child, tag, "dir");
      if (dir != "up" && dir != "down") {
        throw SchemaError(tag, "dir must be 'up' or 'down'");
      }
      signal_decls.push_back({required(child, tag, "id"),
                              required(child, tag, "node"),
                              dir == "up" ? Direction::up : Direction::down});
    } else if (tag == "joint") {
      joints.emplace_back(required(child, tag, "id"), required(child, tag, "node"));
    } else if (tag == "entry") {
      entries.push_back(required(child, tag, "signal"));
    } else if (options.lenient) {
      out.warnings.push_back("ignored unknown element <" + tag + ">");
    } else {
      throw SchemaError(tag, "unknown element");
    }
  }

  for (const auto& [id, e] : g.edges) {
    if (!g.tracks.contains(e.track)) {
      throw SchemaError("edge", "edge " + id + " references undeclared track '" +
                                    e.track + "'");
    }
    for (const auto& end : {e.from, e.to}) {
      auto& node = g.nodes[end];
      node.id = end;
      node.edges.push_back(id);
    }
  }
  for (auto& [id, node] : g.nodes) std::sort(node.edges.begin(), node.edges.end());

  auto node_for = [&](const std::string& id, const char* what) -> Node& {
    auto it = g.nodes.find(id);
    if (it == g.nodes.end()) {
      throw TopologyError(std::string(what) + " '" + id +
                          "' is not an endpoint of any edge");
    }
    if (it->second.kind != NodeKind::boundary) {
      throw TopologyError("node '" + id + "' declared twice");
    }
    return it->second;
  };

  for (const auto& p : points) {
    for (const auto& e : {p.toe, p.normal, p.reverse}) {
      if (!g.edges.contains(e)) {
        throw TopologyError("point " + p.id + " references unknown edge '" + e + "'");
      }
    }
    Node& node = node_for(p.id, "point");
    node.kind = NodeKind::point;
    node.toe_edge = p.toe;
    node.normal_edge = p.normal;
    node.reverse_edge = p.reverse;
  }
  for (const auto& s : signal_decls) {
    Node& node = node_for(s.node, "signal node");
    node.kind = NodeKind::signal;
    node.direction = s.dir;
    node.signal_name = s.id;
    if (!g.signals.emplace(s.id, s.node).second) {
      throw SchemaError("signal", "duplicate signal id '" + s.id + "'");
    }
  }
  for (const auto& [id, node_id] : joints) {
    Node& node = node_for(node_id, "joint node");
    node.kind = NodeKind::joint;
    (void)id;
  }
  for (const auto& signal : entries) {
    auto it = g.signals.find(signal);
    if (it == g.signals.end()) {
      throw SchemaError("entry", "unknown signal '" + signal + "'");
    }
    g.entry_signals.insert(it->second);
  }

  check_topology(g);
  return out;
}

StationGraph parse_layout(std::string_view xml, LayoutOptions options) {
  return parse_layout_ex(xml, options).graph;
}

std::vector<std::string> edges_of_track(const StationGraph& graph,
                                        std::string_view track) {
  if (!graph.tracks.contains(std::string(track))) {
    throw UnknownTrack(std::string(track));
  }
  std::vector<std::string> out;
  for (const auto& [id, e] : graph.edges) {
    if (e.track == track) out.push_back(id);
  }
  return out;
}

}  // namespace interlock
