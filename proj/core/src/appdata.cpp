#include "interlock/appdata.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "interlock/error.hpp"
#include "interlock/layout.hpp"

namespace interlock {

SyntaxError::SyntaxError(std::size_t line, std::size_t column,
                         std::string expected, std::string found)
    : Error("syntax error at " + std::to_string(line) + ":" +
            std::to_string(column) + ": expected " + expected +
            (found.empty() ? std::string{} : ", found '" + found + "'")),
      line_(line),
      column_(column),
      expected_(std::move(expected)) {}

DuplicateRule::DuplicateRule(std::string name)
    : Error("duplicate rule for '" + name + "'"), name_(std::move(name)) {}

KindMismatch::KindMismatch(std::string name, std::string tag)
    : Error("tag '" + tag + "' does not apply to '" + name + "'"),
      name_(std::move(name)),
      tag_(std::move(tag)) {}

std::string_view to_string(ComponentKind kind) {
  switch (kind) {
    case ComponentKind::route: return "route";
    case ComponentKind::point: return "point";
    case ComponentKind::subroute: return "subroute";
    case ComponentKind::uir: return "uir";
    case ComponentKind::track: return "track";
    case ComponentKind::signal: return "signal";
  }
  return "?";
}

std::string_view to_string(PointPosition position) {
  return position == PointPosition::normal ? "normal" : "reverse";
}

ComponentKind infer_kind(std::string_view name) {
  if (name.starts_with("R_")) return ComponentKind::route;
  if (name.starts_with("P_")) return ComponentKind::point;
  if (name.starts_with("U_IR(")) return ComponentKind::uir;
  if (name.starts_with("U_")) return ComponentKind::subroute;
  if (name.starts_with("T_")) return ComponentKind::track;
  return ComponentKind::signal;
}

ComponentId component(std::string_view name) {
  return ComponentId{infer_kind(name), std::string(name)};
}

std::string_view tag(Test test) {
  switch (test) {
    case Test::route_unset: return "xs";
    case Test::route_set: return "s";
    case Test::point_free_normal: return "cfn";
    case Test::point_free_reverse: return "cfr";
    case Test::comp_free: return "f";
    case Test::comp_locked: return "l";
    case Test::track_clear: return "c";
    case Test::track_occupied: return "o";
  }
  return "?";
}

std::string_view tag(Act act) {
  switch (act) {
    case Act::set_route: return "s";
    case Act::command_normal: return "cn";
    case Act::command_reverse: return "cr";
    case Act::lock: return "l";
  }
  return "?";
}

bool applicable(Test test, ComponentKind kind) {
  switch (test) {
    case Test::route_unset:
    case Test::route_set: return kind == ComponentKind::route;
    case Test::point_free_normal:
    case Test::point_free_reverse: return kind == ComponentKind::point;
    case Test::comp_free:
    case Test::comp_locked:
      return kind == ComponentKind::subroute || kind == ComponentKind::uir;
    case Test::track_clear:
    case Test::track_occupied: return kind == ComponentKind::track;
  }
  return false;
}

bool applicable(Act act, ComponentKind kind) {
  switch (act) {
    case Act::set_route: return kind == ComponentKind::route;
    case Act::command_normal:
    case Act::command_reverse: return kind == ComponentKind::point;
    case Act::lock:
      return kind == ComponentKind::subroute || kind == ComponentKind::uir;
  }
  return false;
}

std::vector<std::string> ApplicationData::names(ComponentKind kind) const {
  std::vector<std::string> out;
  for (const auto& c : components) {
    if (c.kind == kind) out.push_back(c.name);
  }
  return out;
}

void ApplicationData::refresh_components() {
  components.clear();
  auto add_conditions = [this](const std::vector<Condition>& conditions) {
    for (const auto& c : conditions) components.insert(c.subject);
  };
  for (const auto& [name, rule] : route_requests) {
    components.insert(rule.route);
    add_conditions(rule.conditions);
    for (const auto& a : rule.actions) components.insert(a.subject);
  }
  for (const auto& [key, rule] : point_commands) {
    components.insert(rule.point);
    add_conditions(rule.conditions);
  }
  for (const auto& [name, rule] : releases) {
    components.insert(rule.target);
    add_conditions(rule.conditions);
  }
}

namespace {

enum class Tok { star, ident, comma, end };

struct Token {
  Tok kind = Tok::end;
  std::string text;
  std::size_t line = 0;
  std::size_t column = 0;
};

bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t line = 1;
  std::size_t col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    Token tok;
    tok.line = line;
    tok.column = col;
    if (c == '*') {
      tok.kind = Tok::star;
      tok.text = "*";
      advance(1);
    } else if (c == ',') {
      tok.kind = Tok::comma;
      tok.text = ",";
      advance(1);
    } else if (ident_char(c)) {
      std::size_t j = i;
      while (j < text.size() && ident_char(text[j])) ++j;
      // NAME(ARG) with no inner whitespace is a single name, e.g. U_IR(09C).
      if (j < text.size() && text[j] == '(') {
        std::size_t k = j + 1;
        while (k < text.size() && ident_char(text[k])) ++k;
        if (k > j + 1 && k < text.size() && text[k] == ')') j = k + 1;
      }
      tok.kind = Tok::ident;
      tok.text = std::string(text.substr(i, j - i));
      advance(j - i);
    } else {
      throw SyntaxError(line, col, "identifier, '*' or ','",
                        std::string(1, c));
    }
    tokens.push_back(std::move(tok));
  }
  Token end;
  end.kind = Tok::end;
  end.line = line;
  end.column = col;
  tokens.push_back(end);
  return tokens;
}

std::optional<Test> test_from_tag(std::string_view t) {
  if (t == "xs") return Test::route_unset;
  if (t == "s") return Test::route_set;
  if (t == "cfn") return Test::point_free_normal;
  if (t == "cfr") return Test::point_free_reverse;
  if (t == "f") return Test::comp_free;
  if (t == "l") return Test::comp_locked;
  if (t == "c") return Test::track_clear;
  if (t == "o") return Test::track_occupied;
  return std::nullopt;
}

std::optional<Act> act_from_tag(std::string_view t) {
  if (t == "s") return Act::set_route;
  if (t == "cn") return Act::command_normal;
  if (t == "cr") return Act::command_reverse;
  if (t == "l") return Act::lock;
  return std::nullopt;
}

bool keyword(std::string_view t) { return t == "if" || t == "then"; }

class Parser {
 public:
  explicit Parser(std::string_view text) : tokens_(tokenize(text)) {}

  ApplicationData run() {
    while (peek().kind != Tok::end) {
      if (peek().kind == Tok::star) {
        star_block();
      } else if (peek().kind == Tok::ident && !keyword(peek().text)) {
        release_line();
      } else {
        fail("start of a block");
      }
    }
    data_.refresh_components();
    return std::move(data_);
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
  }
  const Token& take() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }

  [[noreturn]] void fail(const std::string& expected) const {
    const Token& t = peek();
    throw SyntaxError(t.line, t.column, expected,
                      t.kind == Tok::end ? "end of input" : t.text);
  }

  const Token& expect_ident(const std::string& what) {
    if (peek().kind != Tok::ident || keyword(peek().text)) fail(what);
    return take();
  }

  void expect_keyword(std::string_view word) {
    if (peek().kind != Tok::ident || peek().text != word) {
      fail("'" + std::string(word) + "'");
    }
    take();
  }

  void star_block() {
    take();  // '*'
    const Token& head = expect_ident("block name after '*'");
    const std::string& name = head.text;
    if (name.starts_with("Q_R(") && name.back() == ')') {
      route_request(head, name.substr(4, name.size() - 5));
    } else if (name.starts_with("sub_free_") && name.size() > 9) {
      sub_free_block(head, name.substr(9));
    } else if (name.starts_with("P_") && name.size() > 3 &&
               (name.back() == 'N' || name.back() == 'R')) {
      point_rule(head, name);
    } else {
      throw SyntaxError(head.line, head.column,
                        "a supported block (*Q_R(..), *P_..N/R, *sub_free_..)",
                        "unsupported construct *" + name);
    }
  }

  void route_request(const Token& head, const std::string& id) {
    RouteRequestRule rule;
    rule.route = ComponentId{ComponentKind::route, "R_" + id};
    expect_keyword("if");
    rule.conditions = conditions();
    const Token then_tok = peek();
    expect_keyword("then");
    rule.actions = actions();
    const auto sets = std::count_if(
        rule.actions.begin(), rule.actions.end(),
        [](const Action& a) { return a.act == Act::set_route; });
    const bool sets_self = std::any_of(
        rule.actions.begin(), rule.actions.end(), [&](const Action& a) {
          return a.act == Act::set_route && a.subject == rule.route;
        });
    if (sets != 1 || !sets_self) {
      throw SyntaxError(then_tok.line, then_tok.column,
                        "exactly one '" + rule.route.name + " s' action");
    }
    const std::string key = rule.route.name;
    if (!data_.route_requests.emplace(key, std::move(rule)).second) {
      (void)head;
      throw DuplicateRule(key);
    }
  }

  void point_rule(const Token& head, const std::string& name) {
    PointCommandRule rule;
    rule.point = ComponentId{ComponentKind::point, name.substr(0, name.size() - 1)};
    rule.position =
        name.back() == 'N' ? PointPosition::normal : PointPosition::reverse;
    rule.conditions = conditions();
    PointKey key{rule.point.name, rule.position};
    if (!data_.point_commands.emplace(key, std::move(rule)).second) {
      (void)head;
      throw DuplicateRule(name);
    }
  }

  void sub_free_block(const Token& head, const std::string& id) {
    ReleaseRule rule;
    rule.target = ComponentId{ComponentKind::uir, "U_IR(" + id + ")"};
    rule.conditions = list<Condition>(
        [this] { return at_free_item(); },
        [this] {
          const Token& name = expect_ident("subroute name");
          if (peek().kind != Tok::ident || peek().text != "f") fail("'f'");
          take();
          Condition c{component(name.text), Test::comp_free};
          if (!applicable(c.test, c.subject.kind)) {
            throw KindMismatch(c.subject.name, "f");
          }
          return c;
        },
        "subroute followed by 'f'");
    add_release(head, std::move(rule));
  }

  void release_line() {
    const Token& head = take();
    ReleaseRule rule;
    rule.target = component(head.text);
    if (rule.target.kind != ComponentKind::subroute &&
        rule.target.kind != ComponentKind::uir) {
      throw KindMismatch(head.text, "f");
    }
    if (peek().kind != Tok::ident || peek().text != "f") fail("'f'");
    take();
    expect_keyword("if");
    rule.conditions = conditions();
    add_release(head, std::move(rule));
  }

  void add_release(const Token& head, ReleaseRule rule) {
    (void)head;
    const std::string key = rule.target.name;
    if (!data_.releases.emplace(key, std::move(rule)).second) {
      throw DuplicateRule(key);
    }
  }

  // An item is `name tag`; `name f if` starts a release line instead.
  bool at_condition() const {
    return peek().kind == Tok::ident && !keyword(peek().text) &&
           peek(1).kind == Tok::ident && test_from_tag(peek(1).text) &&
           !(peek(2).kind == Tok::ident && peek(2).text == "if");
  }
  bool at_action() const {
    return peek().kind == Tok::ident && !keyword(peek().text) &&
           peek(1).kind == Tok::ident && act_from_tag(peek(1).text) &&
           !(peek(2).kind == Tok::ident && peek(2).text == "if");
  }
  bool at_free_item() const {
    return peek().kind == Tok::ident && !keyword(peek().text) &&
           peek(1).kind == Tok::ident && peek(1).text == "f" &&
           !(peek(2).kind == Tok::ident && peek(2).text == "if");
  }

  template <typename T, typename AtItem, typename Item>
  std::vector<T> list(AtItem at_item, Item item, const std::string& what) {
    std::vector<T> out;
    if (!at_item()) fail(what);
    out.push_back(item());
    for (;;) {
      if (peek().kind == Tok::comma) {
        take();
        if (!at_item()) fail(what);
        out.push_back(item());
      } else if (at_item()) {
        out.push_back(item());
      } else {
        break;
      }
    }
    return out;
  }

  std::vector<Condition> conditions() {
    return list<Condition>(
        [this] { return at_condition(); },
        [this] {
          const Token& name = take();
          const Token& t = take();
          Condition c{component(name.text), *test_from_tag(t.text)};
          if (!applicable(c.test, c.subject.kind)) {
            throw KindMismatch(c.subject.name, t.text);
          }
          return c;
        },
        "condition (name followed by xs, s, cfn, cfr, f, l, c or o)");
  }

  std::vector<Action> actions() {
    return list<Action>(
        [this] { return at_action(); },
        [this] {
          const Token& name = take();
          const Token& t = take();
          Action a{component(name.text), *act_from_tag(t.text)};
          if (!applicable(a.act, a.subject.kind)) {
            throw KindMismatch(a.subject.name, t.text);
          }
          return a;
        },
        "action (name followed by s, cn, cr or l)");
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  ApplicationData data_;
};

template <typename Items, typename Fn>
void join(std::ostringstream& out, const Items& items, Fn fn) {
  bool first = true;
  for (const auto& item : items) {
    if (!first) out << ", ";
    first = false;
    fn(item);
  }
}

}  // namespace

ApplicationData parse_appdata(std::string_view text) {
  return Parser(text).run();
}

std::string print_appdata(const ApplicationData& data) {
  std::ostringstream out;
  auto cond = [&](const Condition& c) {
    out << c.subject.name << ' ' << tag(c.test);
  };
  for (const auto& [name, rule] : data.route_requests) {
    out << "*Q_R(" << name.substr(2) << ")\n    if   ";
    join(out, rule.conditions, cond);
    out << "\n    then ";
    join(out, rule.actions,
         [&](const Action& a) { out << a.subject.name << ' ' << tag(a.act); });
    out << "\n";
  }
  for (const auto& [key, rule] : data.point_commands) {
    out << '*' << key.first << (key.second == PointPosition::normal ? 'N' : 'R')
        << ' ';
    join(out, rule.conditions, cond);
    out << "\n";
  }
  for (const auto& [name, rule] : data.releases) {
    out << name << " f if ";
    join(out, rule.conditions, cond);
    out << "\n";
  }
  return out.str();
}

std::string_view to_string(IssueKind kind) {
  switch (kind) {
    case IssueKind::unknown_component: return "UnknownComponent";
    case IssueKind::missing_point_command: return "MissingPointCommand";
    case IssueKind::missing_route_request: return "MissingRouteRequest";
  }
  return "?";
}

std::vector<Issue> validate_appdata(const ApplicationData& data,
                                    const StationGraph& graph) {
  std::vector<Issue> issues;
  for (const auto& c : data.components) {
    bool known = true;
    switch (c.kind) {
      case ComponentKind::point: {
        auto it = graph.nodes.find(c.name);
        known = it != graph.nodes.end() && it->second.kind == NodeKind::point;
        break;
      }
      case ComponentKind::track:
        known = graph.tracks.contains(c.name);
        break;
      case ComponentKind::signal:
        known = graph.signals.contains(c.name);
        break;
      default:
        break;
    }
    if (!known) {
      issues.push_back({IssueKind::unknown_component, c.name,
                        std::string(to_string(c.kind)) + " not in layout"});
    }
  }
  for (const auto& point : graph.point_ids()) {
    for (auto pos : {PointPosition::normal, PointPosition::reverse}) {
      if (!data.point_commands.contains({point, pos})) {
        issues.push_back({IssueKind::missing_point_command, point,
                          std::string(to_string(pos))});
      }
    }
  }
  for (const auto& route : data.names(ComponentKind::route)) {
    if (!data.route_requests.contains(route)) {
      issues.push_back({IssueKind::missing_route_request, route, {}});
    }
  }
  return issues;
}

}  // namespace interlock
