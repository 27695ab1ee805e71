#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "interlock/appdata.hpp"
#include "interlock/layout.hpp"

namespace interlock {

/// One line of a `.routes` file: `R_x entry=SIGNAL exit=NODE`.
struct RouteDecl {
  std::string entry;
  std::string exit;

  bool operator==(const RouteDecl&) const = default;
};

using RouteDecls = std::map<std::string, RouteDecl>;

RouteDecls parse_route_decls(std::string_view text);

struct RouteGeometry {
  std::string route;
  std::string entry_signal;  // node id
  std::vector<std::string> path;
  std::string exit;
  std::map<std::string, PointPosition> required_points;
  std::vector<std::string> locked_subroutes;
  std::vector<std::string> locked_uirs;

  bool operator==(const RouteGeometry&) const = default;
};

using RoutePair = std::pair<std::string, std::string>;

enum class LinkMode {
  /// Point commands that do not connect entry to exit raise NoPath.
  strict,
  /// Such routes fall back to the topological path and a warning is kept.
  tolerant,
};

/// Dense integer encoding of the linked model used by the simulator.
namespace compiled {

enum class CondOp : std::uint8_t {
  route_unset,
  route_set,
  point_free_normal,
  point_free_reverse,
  sub_free,
  sub_locked,
  uir_free,
  uir_locked,
  track_clear,
  track_occupied,
};

struct Cond {
  CondOp op;
  std::uint32_t index;
};

enum class ActOp : std::uint8_t { set_route, point_normal, point_reverse, lock_sub, lock_uir };

struct Act {
  ActOp op;
  std::uint32_t index;
};

struct Release {
  bool uir = false;
  std::uint32_t target = 0;
  std::vector<Cond> conds;
};

struct Route {
  std::string name;
  bool has_request = false;
  std::vector<Cond> conds;
  std::vector<Act> acts;
  bool has_geometry = false;
  std::uint32_t entry = 0;       // index into Model::entries
  std::uint32_t entry_node = 0;
  std::uint32_t exit_node = 0;
  std::vector<std::uint32_t> path;         // edge indices
  std::vector<std::uint32_t> path_tracks;  // consecutive distinct tracks
  /// For every edge: the next distinct track along the path after that
  /// edge's track, or -1 when the edge is off the path or on the last track.
  std::vector<std::int32_t> next_track;
};

struct Point {
  std::string name;
  std::uint32_t node = 0;
  std::uint32_t toe = 0;
  std::uint32_t normal = 0;
  std::uint32_t reverse = 0;
  bool has_rule[2] = {false, false};
  std::vector<Cond> rule[2];
};

struct NodeInfo {
  NodeKind kind = NodeKind::boundary;
  std::vector<std::uint32_t> edges;
  std::int32_t point = -1;
};

struct EdgeInfo {
  std::uint32_t a = 0;
  std::uint32_t b = 0;
  std::uint32_t track = 0;

  std::uint32_t other(std::uint32_t node) const { return node == a ? b : a; }
};

struct Entry {
  std::uint32_t node = 0;
  std::string name;  // signal id
  Direction direction = Direction::up;
  std::vector<std::uint32_t> routes;
};

}  // namespace compiled

/// Application data linked to the station graph. Immutable once built and
/// shared read-only between simulation workers.
class InterlockingModel {
 public:
  ApplicationData data;
  StationGraph graph;
  std::map<std::string, RouteGeometry> geometry;
  std::set<RoutePair> conflicts;
  std::vector<std::string> warnings;

  // Component vocabularies; positions are the indices used in SimState.
  std::vector<std::string> points;
  std::vector<std::string> routes;
  std::vector<std::string> subroutes;
  std::vector<std::string> uirs;
  std::vector<std::string> tracks;
  std::vector<std::string> edges;
  std::vector<std::string> nodes;

  std::vector<compiled::Point> point_info;
  std::vector<compiled::Route> route_info;
  std::vector<compiled::Release> releases;
  std::vector<compiled::NodeInfo> node_info;
  std::vector<compiled::EdgeInfo> edge_info;
  std::vector<compiled::Entry> entries;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> conflict_index;

  std::int32_t route_index(std::string_view name) const;
  std::int32_t point_index(std::string_view name) const;
  std::int32_t track_index(std::string_view name) const;
  std::int32_t subroute_index(std::string_view name) const;
  std::int32_t uir_index(std::string_view name) const;
  std::int32_t edge_index(std::string_view name) const;
  std::int32_t node_index(std::string_view name) const;
};

/// Links data and layout: derives each declared route's path by walking
/// the graph under the route's point commands, then the conflict relation.
/// Throws LinkError, UnknownRoute or NoPath.
InterlockingModel link(const ApplicationData& data, const StationGraph& graph,
                       const RouteDecls& route_decls,
                       LinkMode mode = LinkMode::strict);

/// Unordered pairs (stored lexicographically ordered) of routes whose paths
/// share at least one track segment.
std::set<RoutePair> route_conflicts(const InterlockingModel& model);

}  // namespace interlock
