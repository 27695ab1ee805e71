#include "interlock/mutate.hpp"

#include <charconv>

#include "interlock/error.hpp"

namespace interlock {

std::string_view to_string(MutationType type) {
  constexpr std::string_view names[] = {"a", "b", "c", "d", "e", "f"};
  return names[static_cast<int>(type)];
}

MutationType parse_mutation_type(std::string_view text) {
  if (text.size() == 1 && text[0] >= 'a' && text[0] <= 'f') {
    return static_cast<MutationType>(text[0] - 'a');
  }
  throw ConfigError("mutation type must be one of a, b, c, d, e, f (got '" +
                    std::string(text) + "')");
}

std::vector<MutationType> parse_mutation_types(std::string_view list) {
  std::vector<MutationType> out;
  while (!list.empty()) {
    const auto comma = list.find(',');
    auto item = list.substr(0, comma);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (!item.empty()) out.push_back(parse_mutation_type(item));
    if (comma == std::string_view::npos) break;
    list.remove_prefix(comma + 1);
  }
  return out;
}

std::string to_string(const RuleLocator& locator) {
  return locator.rule + ":" + std::to_string(locator.index);
}

RuleLocator parse_locator(std::string_view text) {
  const auto colon = text.rfind(':');
  if (colon == std::string_view::npos || colon == 0) {
    throw ConfigError("target must look like <rule>:<index>, got '" + std::string(text) + "'");
  }
  RuleLocator out;
  out.rule = std::string(text.substr(0, colon));
  const auto digits = text.substr(colon + 1);
  auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), out.index);
  if (ec != std::errc() || end != digits.data() + digits.size()) {
    throw ConfigError("target index must be a non-negative integer, got '" +
                      std::string(digits) + "'");
  }
  return out;
}

Condition parse_condition(std::string_view text) {
  auto skip = [&] {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  };
  auto word = [&] {
    skip();
    auto end = text.find_first_of(" \t");
    auto w = text.substr(0, end);
    text.remove_prefix(w.size());
    return w;
  };
  const auto name = word();
  const auto t = word();
  skip();
  if (name.empty() || t.empty() || !text.empty()) {
    throw ConfigError("condition must look like '<component> <tag>'");
  }
  Condition out{component(name), Test::comp_free};
  for (auto test : {Test::route_unset, Test::route_set, Test::point_free_normal,
                    Test::point_free_reverse, Test::comp_free, Test::comp_locked,
                    Test::track_clear, Test::track_occupied}) {
    if (tag(test) == t && applicable(test, out.subject.kind)) {
      out.test = test;
      return out;
    }
  }
  throw ConfigError("'" + std::string(t) + "' is not a condition on " + out.subject.name);
}

namespace {

bool is_point_command(const Action& a) {
  return a.act == Act::command_normal || a.act == Act::command_reverse;
}
bool is_subroute_lock(const Action& a) {
  return a.act == Act::lock && a.subject.kind == ComponentKind::subroute;
}

// Position in `actions` of the index-th action selected by `pick`.
template <class Pick>
std::optional<std::size_t> nth(const std::vector<Action>& actions, std::size_t index, Pick pick) {
  std::size_t seen = 0;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    if (!pick(actions[i])) continue;
    if (seen++ == index) return i;
  }
  return std::nullopt;
}

template <class Pick>
std::size_t count(const std::vector<Action>& actions, Pick pick) {
  std::size_t n = 0;
  for (const auto& a : actions) n += pick(a) ? 1 : 0;
  return n;
}

RouteRequestRule& route_rule(ApplicationData& data, const MutationSpec& spec) {
  auto it = data.route_requests.find(spec.target.rule);
  if (it == data.route_requests.end()) {
    throw IncompatibleTarget("type " + std::string(to_string(spec.type)) +
                             " needs a route request, '" + spec.target.rule + "' is none");
  }
  return it->second;
}

ReleaseRule& release_rule(ApplicationData& data, const MutationSpec& spec,
                          std::optional<ComponentKind> kind) {
  auto it = data.releases.find(spec.target.rule);
  if (it == data.releases.end() || (kind && it->second.target.kind != *kind)) {
    const std::string what = !kind ? "release rule"
                              : *kind == ComponentKind::uir ? "zone release rule"
                                                           : "subroute release rule";
    throw IncompatibleTarget("type " + std::string(to_string(spec.type)) + " needs a " + what +
                             ", '" + spec.target.rule + "' is none");
  }
  return it->second;
}

void remove_condition(std::vector<Condition>& conds, const MutationSpec& spec) {
  if (conds.size() <= 1) {
    throw NothingToRemove(spec.target.rule + " would be left without conditions");
  }
  if (spec.target.index >= conds.size()) {
    throw IncompatibleTarget(spec.target.rule + " has no condition " +
                             std::to_string(spec.target.index));
  }
  conds.erase(conds.begin() + static_cast<std::ptrdiff_t>(spec.target.index));
}

}  // namespace

ApplicationData apply_mutation(const ApplicationData& data, const MutationSpec& spec) {
  ApplicationData out = data;
  switch (spec.type) {
    case MutationType::a:
      remove_condition(route_rule(out, spec).conditions, spec);
      break;
    case MutationType::b: {
      auto& actions = route_rule(out, spec).actions;
      if (count(actions, is_point_command) == 0) {
        throw NothingToRemove(spec.target.rule + " commands no point");
      }
      auto at = nth(actions, spec.target.index, is_point_command);
      if (!at) {
        throw IncompatibleTarget(spec.target.rule + " has no point command " +
                                 std::to_string(spec.target.index));
      }
      auto& act = actions[*at].act;
      act = act == Act::command_normal ? Act::command_reverse : Act::command_normal;
      break;
    }
    case MutationType::c: {
      auto& actions = route_rule(out, spec).actions;
      if (count(actions, is_subroute_lock) == 0) {
        throw NothingToRemove(spec.target.rule + " locks no subroute");
      }
      auto at = nth(actions, spec.target.index, is_subroute_lock);
      if (!at) {
        throw IncompatibleTarget(spec.target.rule + " has no subroute lock " +
                                 std::to_string(spec.target.index));
      }
      actions.erase(actions.begin() + static_cast<std::ptrdiff_t>(*at));
      break;
    }
    case MutationType::d:
      remove_condition(release_rule(out, spec, ComponentKind::subroute).conditions, spec);
      break;
    case MutationType::e:
      remove_condition(release_rule(out, spec, ComponentKind::uir).conditions, spec);
      break;
    case MutationType::f: {
      auto& rule = release_rule(out, spec, std::nullopt);
      const Condition extra = spec.payload.value_or(Condition{rule.target, Test::comp_free});
      if (!applicable(extra.test, extra.subject.kind)) {
        throw IncompatibleTarget("payload '" + extra.subject.name + " " +
                                 std::string(tag(extra.test)) + "' is not a valid condition");
      }
      rule.conditions.push_back(extra);
      break;
    }
  }
  out.refresh_components();
  return out;
}

std::vector<MutationSpec> enumerate_mutations(const ApplicationData& data, MutationType type) {
  std::vector<MutationSpec> out;
  auto add = [&](const std::string& rule, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out.push_back({type, {rule, i}, std::nullopt});
  };
  switch (type) {
    case MutationType::a:
      for (const auto& [name, rule] : data.route_requests) {
        if (rule.conditions.size() > 1) add(name, rule.conditions.size());
      }
      break;
    case MutationType::b:
      for (const auto& [name, rule] : data.route_requests) {
        add(name, count(rule.actions, is_point_command));
      }
      break;
    case MutationType::c:
      for (const auto& [name, rule] : data.route_requests) {
        add(name, count(rule.actions, is_subroute_lock));
      }
      break;
    case MutationType::d:
    case MutationType::e: {
      const auto kind = type == MutationType::d ? ComponentKind::subroute : ComponentKind::uir;
      for (const auto& [name, rule] : data.releases) {
        if (rule.target.kind == kind && rule.conditions.size() > 1) {
          add(name, rule.conditions.size());
        }
      }
      break;
    }
    case MutationType::f:
      for (const auto& [name, rule] : data.releases) add(name, 1);
      break;
  }
  return out;
}

std::string describe(const MutationSpec& spec, const ApplicationData& data) {
  std::string text = std::string(to_string(spec.type)) + " " + to_string(spec.target);
  auto quote = [](const ComponentId& c, std::string_view t) {
    return "\"" + c.name + " " + std::string(t) + "\"";
  };
  const auto idx = spec.target.index;
  if (auto r = data.route_requests.find(spec.target.rule); r != data.route_requests.end()) {
    const auto& rule = r->second;
    if (spec.type == MutationType::a && idx < rule.conditions.size()) {
      return text + " drops " + quote(rule.conditions[idx].subject, tag(rule.conditions[idx].test));
    }
    if (spec.type == MutationType::b) {
      if (auto at = nth(rule.actions, idx, is_point_command)) {
        return text + " flips " + quote(rule.actions[*at].subject, tag(rule.actions[*at].act));
      }
    }
    if (spec.type == MutationType::c) {
      if (auto at = nth(rule.actions, idx, is_subroute_lock)) {
        return text + " drops " + quote(rule.actions[*at].subject, tag(rule.actions[*at].act));
      }
    }
  }
  if (auto r = data.releases.find(spec.target.rule); r != data.releases.end()) {
    const auto& rule = r->second;
    if ((spec.type == MutationType::d || spec.type == MutationType::e) &&
        idx < rule.conditions.size()) {
      return text + " drops " + quote(rule.conditions[idx].subject, tag(rule.conditions[idx].test));
    }
    if (spec.type == MutationType::f) {
      const auto extra = spec.payload.value_or(Condition{rule.target, Test::comp_free});
      return text + " adds " + quote(extra.subject, tag(extra.test));
    }
  }
  return text;
}

}  // namespace interlock
