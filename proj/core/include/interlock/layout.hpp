#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace interlock {

enum class NodeKind { point, signal, joint, boundary };
enum class Direction { up, down };

std::string_view to_string(NodeKind kind);
std::string_view to_string(Direction direction);

struct Node {
  std::string id;
  NodeKind kind = NodeKind::boundary;
  /// Signals only.
  std::optional<Direction> direction;
  std::string signal_name;
  /// Points only.
  std::string toe_edge;
  std::string normal_edge;
  std::string reverse_edge;
  /// Incident edge ids, sorted.
  std::vector<std::string> edges;

  bool operator==(const Node&) const = default;
};

struct Edge {
  std::string id;
  std::string from;
  std::string to;
  std::string track;

  bool operator==(const Edge&) const = default;

  /// The endpoint opposite to `node`.
  const std::string& other(const std::string& node) const {
    return node == from ? to : from;
  }
};

/// Station topology: nodes are points, signals, joints and boundaries;
/// edges are portions of track segments between them.
struct StationGraph {
  std::string name;
  std::map<std::string, Node> nodes;
  std::map<std::string, Edge> edges;
  std::set<std::string> tracks;
  /// Node ids of the signals where trains enter the station.
  std::set<std::string> entry_signals;
  /// Signal id to node id.
  std::map<std::string, std::string> signals;

  bool operator==(const StationGraph&) const = default;

  /// Resolves a signal id or a node id to a node id; empty when unknown.
  std::string resolve_node(std::string_view name) const;
  std::vector<std::string> point_ids() const;
};

struct LayoutOptions {
  /// Unknown elements produce warnings instead of a SchemaError.
  bool lenient = false;
};

struct ParsedLayout {
  StationGraph graph;
  std::vector<std::string> warnings;
};

/// Parses the railML-subset station description.
///
/// Root `<station name>` with children `<track id>`, `<edge id from to
/// track>`, `<point id toe normal reverse>`, `<signal id node dir>`,
/// `<joint id node>` and `<entry signal>`. Nodes are the endpoints named by
/// edges; an endpoint that is neither point, signal nor joint is a boundary.
ParsedLayout parse_layout_ex(std::string_view xml, LayoutOptions options = {});

StationGraph parse_layout(std::string_view xml, LayoutOptions options = {});

/// Edges belonging to `track`, sorted by id. Throws UnknownTrack.
std::vector<std::string> edges_of_track(const StationGraph& graph,
                                        std::string_view track);

}  // namespace interlock
