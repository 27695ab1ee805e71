#pragma once

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace interlock {

struct StationGraph;

enum class ComponentKind { route, point, subroute, uir, track, signal };

std::string_view to_string(ComponentKind kind);

/// A named interlocking component. The kind follows the naming convention
/// of the application data: R_ routes, P_ points, U_IR(..) immobilisation
/// zones, other U_ names subroutes, T_ tracks, anything else a signal.
struct ComponentId {
  ComponentKind kind = ComponentKind::signal;
  std::string name;

  auto operator<=>(const ComponentId&) const = default;
};

/// Builds a ComponentId from a name, inferring the kind from its prefix.
ComponentId component(std::string_view name);
ComponentKind infer_kind(std::string_view name);

enum class PointPosition { normal, reverse };

std::string_view to_string(PointPosition position);

/// Condition tags: xs s cfn cfr f l c o.
enum class Test {
  route_unset,
  route_set,
  point_free_normal,
  point_free_reverse,
  comp_free,
  comp_locked,
  track_clear,
  track_occupied,
};

/// Action tags: s cn cr l.
enum class Act { set_route, command_normal, command_reverse, lock };

std::string_view tag(Test test);
std::string_view tag(Act act);
bool applicable(Test test, ComponentKind kind);
bool applicable(Act act, ComponentKind kind);

struct Condition {
  ComponentId subject;
  Test test = Test::comp_free;

  bool operator==(const Condition&) const = default;
};

struct Action {
  ComponentId subject;
  Act act = Act::lock;

  bool operator==(const Action&) const = default;
};

struct RouteRequestRule {
  ComponentId route;
  std::vector<Condition> conditions;
  std::vector<Action> actions;

  bool operator==(const RouteRequestRule&) const = default;
};

struct PointCommandRule {
  ComponentId point;
  PointPosition position = PointPosition::normal;
  std::vector<Condition> conditions;

  bool operator==(const PointCommandRule&) const = default;
};

struct ReleaseRule {
  ComponentId target;
  std::vector<Condition> conditions;

  bool operator==(const ReleaseRule&) const = default;
};

using PointKey = std::pair<std::string, PointPosition>;

/// Parsed application data: the interlocking's rules, keyed by name.
struct ApplicationData {
  std::map<std::string, RouteRequestRule> route_requests;
  std::map<PointKey, PointCommandRule> point_commands;
  std::map<std::string, ReleaseRule> releases;
  std::set<ComponentId> components;

  bool operator==(const ApplicationData&) const = default;

  /// Names of all components of one kind, sorted.
  std::vector<std::string> names(ComponentKind kind) const;

  /// Recomputes `components` from every rule.
  void refresh_components();
};

/// Parses an SSI-dialect document.
///
/// Accepts route requests `*Q_R(x) if ... then ...`, point rules
/// `*P_xN ...` / `*P_xR ...`, release lines `U_x f if ...` and grouped
/// zone releases `*sub_free_x ...`. Commas between list items are optional,
/// `//` starts a comment. Throws SyntaxError, DuplicateRule or KindMismatch.
ApplicationData parse_appdata(std::string_view text);

/// Canonical text form; parse_appdata(print_appdata(d)) == d.
std::string print_appdata(const ApplicationData& data);

enum class IssueKind {
  unknown_component,
  missing_point_command,
  missing_route_request,
};

std::string_view to_string(IssueKind kind);

struct Issue {
  IssueKind kind;
  std::string component;
  std::string detail;

  bool operator==(const Issue&) const = default;
};

/// Cross-checks application data against a station graph. Issues are
/// reported, never thrown.
std::vector<Issue> validate_appdata(const ApplicationData& data,
                                    const StationGraph& graph);

}  // namespace interlock
