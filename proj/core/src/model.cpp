#include "interlock/model.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <sstream>

#include "interlock/error.hpp"

namespace interlock {

RouteDecls parse_route_decls(std::string_view text) {
  RouteDecls out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream words(line);
    std::string route;
    if (!(words >> route)) continue;
    if (infer_kind(route) != ComponentKind::route) {
      throw SyntaxError(line_no, 1, "route name", route);
    }
    RouteDecl decl;
    std::string field;
    while (words >> field) {
      const auto eq = field.find('=');
      const auto col = line.find(field) + 1;
      if (eq == std::string::npos) throw SyntaxError(line_no, col, "key=value", field);
      const auto key = field.substr(0, eq);
      const auto value = field.substr(eq + 1);
      if (value.empty()) throw SyntaxError(line_no, col, "value after '='", field);
      if (key == "entry") {
        decl.entry = value;
      } else if (key == "exit") {
        decl.exit = value;
      } else {
        throw SyntaxError(line_no, col, "'entry' or 'exit'", key);
      }
    }
    if (decl.entry.empty() || decl.exit.empty()) {
      throw SyntaxError(line_no, line.size() + 1, "both entry= and exit=");
    }
    if (!out.emplace(route, decl).second) throw DuplicateRule(route);
  }
  return out;
}

namespace {

template <class Names>
std::int32_t find_index(const Names& names, std::string_view name) {
  auto it = std::lower_bound(names.begin(), names.end(), name);
  if (it == names.end() || *it != name) return -1;
  return static_cast<std::int32_t>(it - names.begin());
}

// Walks from the entry node to the exit node. At a facing point the walk
// takes the leg chosen by `leg_at`; at a trailing point it continues onto
// the toe only when it arrived on an allowed leg. Returns the edge list or
// the reason the walk failed.
struct Walk {
  std::vector<std::string> path;
  std::string failure;
};

using LegChooser =
    std::function<std::vector<std::string>(const Node& point, std::string* why)>;

Walk walk(const StationGraph& g, const std::string& entry, const std::string& exit,
          const LegChooser& legs_at) {
  Walk result;
  std::vector<std::string> path;
  std::set<std::string> used;
  std::function<bool(const std::string&, const std::string&)> go =
      [&](const std::string& node_id, const std::string& via) -> bool {
    if (node_id == exit && !path.empty()) return true;
    const Node& node = g.nodes.at(node_id);
    std::vector<std::string> next;
    if (node.kind == NodeKind::point && !via.empty()) {
      std::string why;
      auto allowed = legs_at(node, &why);
      if (via == node.toe_edge) {
        next = allowed;
      } else if (std::find(allowed.begin(), allowed.end(), via) != allowed.end()) {
        next = {node.toe_edge};
      } else if (why.empty()) {
        why = "trails point " + node.id + " from a leg it is not set for";
      }
      if (next.empty() && result.failure.empty()) result.failure = why;
    } else if (node.kind == NodeKind::boundary && !via.empty()) {
      return false;
    } else {
      for (const auto& e : node.edges) {
        if (e != via) next.push_back(e);
      }
    }
    for (const auto& e : next) {
      if (used.contains(e)) continue;
      used.insert(e);
      path.push_back(e);
      if (go(g.edges.at(e).other(node_id), e)) return true;
      path.pop_back();
      used.erase(e);
    }
    return false;
  };
  if (go(entry, "")) {
    result.path = path;
    result.failure.clear();
  } else if (result.failure.empty()) {
    result.failure = "exit " + exit + " is unreachable from " + entry;
  }
  return result;
}

compiled::Cond compile(const InterlockingModel& m, const Condition& c) {
  using compiled::CondOp;
  auto need = [&](std::int32_t i) {
    if (i < 0) throw LinkError("condition names unknown component " + c.subject.name);
    return static_cast<std::uint32_t>(i);
  };
  const auto& name = c.subject.name;
  switch (c.test) {
    case Test::route_unset: return {CondOp::route_unset, need(m.route_index(name))};
    case Test::route_set: return {CondOp::route_set, need(m.route_index(name))};
    case Test::point_free_normal:
      return {CondOp::point_free_normal, need(m.point_index(name))};
    case Test::point_free_reverse:
      return {CondOp::point_free_reverse, need(m.point_index(name))};
    case Test::track_clear: return {CondOp::track_clear, need(m.track_index(name))};
    case Test::track_occupied:
      return {CondOp::track_occupied, need(m.track_index(name))};
    case Test::comp_free:
    case Test::comp_locked: {
      const bool free = c.test == Test::comp_free;
      if (c.subject.kind == ComponentKind::uir) {
        return {free ? CondOp::uir_free : CondOp::uir_locked, need(m.uir_index(name))};
      }
      return {free ? CondOp::sub_free : CondOp::sub_locked, need(m.subroute_index(name))};
    }
  }
  throw LinkError("unsupported condition");
}

std::vector<compiled::Cond> compile(const InterlockingModel& m,
                                    const std::vector<Condition>& conds) {
  std::vector<compiled::Cond> out;
  out.reserve(conds.size());
  for (const auto& c : conds) out.push_back(compile(m, c));
  return out;
}

void compile_model(InterlockingModel& m) {
  const auto& g = m.graph;
  for (const auto& [id, node] : g.nodes) m.nodes.push_back(id);
  for (const auto& [id, edge] : g.edges) m.edges.push_back(id);
  m.tracks.assign(g.tracks.begin(), g.tracks.end());
  m.points = g.point_ids();
  m.routes = m.data.names(ComponentKind::route);
  m.subroutes = m.data.names(ComponentKind::subroute);
  m.uirs = m.data.names(ComponentKind::uir);

  for (const auto& id : m.nodes) {
    const Node& node = g.nodes.at(id);
    compiled::NodeInfo info;
    info.kind = node.kind;
    for (const auto& e : node.edges) info.edges.push_back(m.edge_index(e));
    info.point = m.point_index(id);
    m.node_info.push_back(info);
  }
  for (const auto& id : m.edges) {
    const Edge& e = g.edges.at(id);
    m.edge_info.push_back({static_cast<std::uint32_t>(m.node_index(e.from)),
                           static_cast<std::uint32_t>(m.node_index(e.to)),
                           static_cast<std::uint32_t>(m.track_index(e.track))});
  }
  for (const auto& id : m.points) {
    const Node& node = g.nodes.at(id);
    compiled::Point p;
    p.name = id;
    p.node = m.node_index(id);
    p.toe = m.edge_index(node.toe_edge);
    p.normal = m.edge_index(node.normal_edge);
    p.reverse = m.edge_index(node.reverse_edge);
    for (auto pos : {PointPosition::normal, PointPosition::reverse}) {
      auto it = m.data.point_commands.find({id, pos});
      if (it == m.data.point_commands.end()) continue;
      const auto slot = static_cast<std::size_t>(pos);
      p.has_rule[slot] = true;
      p.rule[slot] = compile(m, it->second.conditions);
    }
    m.point_info.push_back(std::move(p));
  }

  std::map<std::uint32_t, std::uint32_t> entry_of_node;
  for (const auto& node_id : g.entry_signals) {
    const Node& node = g.nodes.at(node_id);
    compiled::Entry entry;
    entry.node = m.node_index(node_id);
    entry.name = node.signal_name.empty() ? node_id : node.signal_name;
    entry.direction = node.direction.value_or(Direction::up);
    entry_of_node[entry.node] = static_cast<std::uint32_t>(m.entries.size());
    m.entries.push_back(entry);
  }

  for (std::uint32_t r = 0; r < m.routes.size(); ++r) {
    compiled::Route info;
    info.name = m.routes[r];
    if (auto it = m.data.route_requests.find(info.name); it != m.data.route_requests.end()) {
      info.has_request = true;
      info.conds = compile(m, it->second.conditions);
      for (const auto& a : it->second.actions) {
        using compiled::ActOp;
        const auto& name = a.subject.name;
        switch (a.act) {
          case Act::set_route:
            info.acts.push_back({ActOp::set_route, static_cast<std::uint32_t>(m.route_index(name))});
            break;
          case Act::command_normal:
          case Act::command_reverse: {
            const auto p = m.point_index(name);
            if (p < 0) throw LinkError("route " + info.name + " commands unknown point " + name);
            info.acts.push_back({a.act == Act::command_normal ? ActOp::point_normal
                                                              : ActOp::point_reverse,
                                 static_cast<std::uint32_t>(p)});
            break;
          }
          case Act::lock:
            if (a.subject.kind == ComponentKind::uir) {
              info.acts.push_back({ActOp::lock_uir, static_cast<std::uint32_t>(m.uir_index(name))});
            } else {
              info.acts.push_back({ActOp::lock_sub, static_cast<std::uint32_t>(m.subroute_index(name))});
            }
            break;
        }
      }
    }
    if (auto it = m.geometry.find(info.name); it != m.geometry.end()) {
      const auto& geo = it->second;
      info.has_geometry = true;
      info.entry_node = m.node_index(geo.entry_signal);
      info.exit_node = m.node_index(geo.exit);
      auto e = entry_of_node.find(info.entry_node);
      if (e == entry_of_node.end()) {
        throw LinkError("route " + info.name + " starts at " + geo.entry_signal +
                        ", which is not an entry signal");
      }
      info.entry = e->second;
      if (info.has_request) m.entries[info.entry].routes.push_back(r);
      for (const auto& edge : geo.path) info.path.push_back(m.edge_index(edge));
      for (auto edge : info.path) {
        const auto t = m.edge_info[edge].track;
        if (info.path_tracks.empty() || info.path_tracks.back() != t) info.path_tracks.push_back(t);
      }
      info.next_track.assign(m.edges.size(), -1);
      for (std::size_t i = 0; i < info.path.size(); ++i) {
        const auto t = m.edge_info[info.path[i]].track;
        for (std::size_t j = i + 1; j < info.path.size(); ++j) {
          const auto u = m.edge_info[info.path[j]].track;
          if (u != t) {
            info.next_track[info.path[i]] = static_cast<std::int32_t>(u);
            break;
          }
        }
      }
    }
    m.route_info.push_back(std::move(info));
  }

  for (const auto& [target, rule] : m.data.releases) {
    compiled::Release rel;
    rel.uir = rule.target.kind == ComponentKind::uir;
    const auto idx = rel.uir ? m.uir_index(target) : m.subroute_index(target);
    if (idx < 0) throw LinkError("release of unknown component " + target);
    rel.target = static_cast<std::uint32_t>(idx);
    rel.conds = compile(m, rule.conditions);
    m.releases.push_back(std::move(rel));
  }

  for (const auto& [a, b] : m.conflicts) {
    m.conflict_index.emplace_back(m.route_index(a), m.route_index(b));
  }
}

}  // namespace

std::int32_t InterlockingModel::route_index(std::string_view name) const {
  return find_index(routes, name);
}
std::int32_t InterlockingModel::point_index(std::string_view name) const {
  return find_index(points, name);
}
std::int32_t InterlockingModel::track_index(std::string_view name) const {
  return find_index(tracks, name);
}
std::int32_t InterlockingModel::subroute_index(std::string_view name) const {
  return find_index(subroutes, name);
}
std::int32_t InterlockingModel::uir_index(std::string_view name) const {
  return find_index(uirs, name);
}
std::int32_t InterlockingModel::edge_index(std::string_view name) const {
  return find_index(edges, name);
}
std::int32_t InterlockingModel::node_index(std::string_view name) const {
  return find_index(nodes, name);
}

std::set<RoutePair> route_conflicts(const InterlockingModel& model) {
  std::map<std::string, std::set<std::string>> tracks;
  for (const auto& [route, geo] : model.geometry) {
    auto& set = tracks[route];
    for (const auto& e : geo.path) set.insert(model.graph.edges.at(e).track);
  }
  std::set<RoutePair> out;
  for (auto a = tracks.begin(); a != tracks.end(); ++a) {
    for (auto b = std::next(a); b != tracks.end(); ++b) {
      const bool shared = std::any_of(a->second.begin(), a->second.end(),
                                      [&](const auto& t) { return b->second.contains(t); });
      if (shared) out.emplace(a->first, b->first);
    }
  }
  return out;
}

InterlockingModel link(const ApplicationData& data, const StationGraph& graph,
                       const RouteDecls& route_decls, LinkMode mode) {
  InterlockingModel m;
  m.data = data;
  m.graph = graph;

  for (const auto& c : data.components) {
    const bool known =
        (c.kind == ComponentKind::point && graph.nodes.contains(c.name) &&
         graph.nodes.at(c.name).kind == NodeKind::point) ||
        (c.kind == ComponentKind::track && graph.tracks.contains(c.name)) ||
        (c.kind != ComponentKind::point && c.kind != ComponentKind::track);
    if (!known) {
      throw LinkError(std::string(to_string(c.kind)) + " " + c.name +
                      " is not in the station layout");
    }
  }
  for (const auto& [route, rule] : data.route_requests) {
    if (!route_decls.contains(route)) throw UnknownRoute(route);
  }

  for (const auto& [route, decl] : route_decls) {
    auto rule = data.route_requests.find(route);
    if (rule == data.route_requests.end()) throw UnknownRoute(route);
    RouteGeometry geo;
    geo.route = route;
    geo.entry_signal = graph.resolve_node(decl.entry);
    geo.exit = graph.resolve_node(decl.exit);
    if (geo.entry_signal.empty()) {
      throw LinkError("route " + route + ": unknown entry '" + decl.entry + "'");
    }
    if (geo.exit.empty()) {
      throw LinkError("route " + route + ": unknown exit '" + decl.exit + "'");
    }
    if (graph.nodes.at(geo.entry_signal).kind != NodeKind::signal) {
      throw LinkError("route " + route + ": entry " + decl.entry + " is not a signal");
    }
    for (const auto& a : rule->second.actions) {
      if (a.act == Act::command_normal || a.act == Act::command_reverse) {
        geo.required_points[a.subject.name] = a.act == Act::command_normal
                                                  ? PointPosition::normal
                                                  : PointPosition::reverse;
      } else if (a.act == Act::lock) {
        (a.subject.kind == ComponentKind::uir ? geo.locked_uirs : geo.locked_subroutes)
            .push_back(a.subject.name);
      }
    }

    const LegChooser commanded = [&](const Node& point, std::string* why) {
      auto it = geo.required_points.find(point.id);
      if (it == geo.required_points.end()) {
        *why = "passes point " + point.id + ", which the route does not command";
        return std::vector<std::string>{};
      }
      return std::vector<std::string>{it->second == PointPosition::normal ? point.normal_edge
                                                                          : point.reverse_edge};
    };
    auto found = walk(graph, geo.entry_signal, geo.exit, commanded);
    if (found.path.empty()) {
      if (mode == LinkMode::strict) throw NoPath(route, found.failure);
      const LegChooser any = [](const Node& point, std::string*) {
        return std::vector<std::string>{point.normal_edge, point.reverse_edge};
      };
      auto fallback = walk(graph, geo.entry_signal, geo.exit, any);
      if (fallback.path.empty()) throw NoPath(route, fallback.failure);
      m.warnings.push_back("route " + route + ": " + found.failure +
                           "; using the topological path");
      found = fallback;
    }
    geo.path = found.path;
    m.geometry.emplace(route, std::move(geo));
  }

  m.conflicts = route_conflicts(m);
  compile_model(m);
  return m;
}

}  // namespace interlock
