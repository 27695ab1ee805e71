#include "interlock/bltl.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <functional>
#include <sstream>

#include "interlock/error.hpp"

namespace interlock {

namespace {

bool is_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

struct NamedConstant {
  std::string_view word;
  ValueType type;
  std::int32_t value;
};

constexpr NamedConstant kConstants[] = {
    {"normal", ValueType::position, 0},  {"left", ValueType::position, 0},
    {"reverse", ValueType::position, 1}, {"right", ValueType::position, 1},
    {"unset", ValueType::route_state, 0}, {"set", ValueType::route_state, 1},
    {"free", ValueType::lock_state, 0},  {"locked", ValueType::lock_state, 1},
};

struct StateFunction {
  std::string_view word;
  Op op;
  ValueType type;
};

constexpr StateFunction kFunctions[] = {
    {"trains", Op::trains, ValueType::count},
    {"point", Op::point, ValueType::position},
    {"route", Op::route, ValueType::route_state},
    {"sub", Op::sub, ValueType::lock_state},
    {"uir", Op::uir, ValueType::lock_state},
};

class Parser {
 public:
  explicit Parser(std::string_view text) : src_(text) {}

  Formula run() {
    skip();
    const auto start = pos_;
    const auto word = ident();
    skip();
    if ((word == "G" || word == "GF") && peek() == '[') {
      ++pos_;
      f_.temporal = word == "G" ? Temporal::globally : Temporal::globally_finally;
      f_.bound = bound();
      if (f_.temporal == Temporal::globally_finally) {
        expect(",");
        f_.window = bound();
      }
      expect("]");
    } else if (!word.empty() && peek() == '[') {
      throw UnknownOperator(std::string(word));
    } else {
      pos_ = start;
    }
    f_.root = expr();
    skip();
    if (pos_ != src_.size()) fail("end of formula");
    return std::move(f_);
  }

 private:
  [[noreturn]] void fail(const std::string& expected) {
    std::string found;
    if (pos_ < src_.size()) {
      found = std::string(src_.substr(pos_, std::min<std::size_t>(12, src_.size() - pos_)));
    } else {
      found = "end of input";
    }
    throw SyntaxError(1, pos_ + 1, expected, found);
  }

  void skip() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }
  char peek() const { return pos_ < src_.size() ? src_[pos_] : '\0'; }

  bool match(std::string_view token) {
    skip();
    if (src_.substr(pos_, token.size()) != token) return false;
    pos_ += token.size();
    return true;
  }
  void expect(std::string_view token) {
    if (!match(token)) fail("'" + std::string(token) + "'");
  }

  std::string_view ident() {
    skip();
    const auto start = pos_;
    if (pos_ < src_.size() && is_ident_start(src_[pos_])) {
      while (pos_ < src_.size() && is_ident_char(src_[pos_])) ++pos_;
    }
    return src_.substr(start, pos_ - start);
  }

  std::uint64_t bound() {
    skip();
    std::uint64_t v = 0;
    auto [end, ec] = std::from_chars(src_.data() + pos_, src_.data() + src_.size(), v);
    if (ec != std::errc() || v == 0) fail("positive integer bound");
    pos_ = static_cast<std::size_t>(end - src_.data());
    return v;
  }

  std::int32_t add(FormulaNode node) {
    f_.nodes.push_back(std::move(node));
    return static_cast<std::int32_t>(f_.nodes.size() - 1);
  }

  std::int32_t binary(Op op, std::int32_t a, std::int32_t b) {
    FormulaNode n;
    n.op = op;
    n.a = a;
    n.b = b;
    return add(std::move(n));
  }

  std::int32_t expr() {
    const auto lhs = disjunction();
    if (match("=>") || match("->") || match("⇒")) return binary(Op::implies, lhs, expr());
    return lhs;
  }

  std::int32_t disjunction() {
    auto lhs = conjunction();
    while (match("||") || match("|") || match("∨")) {
      lhs = binary(Op::disj, lhs, conjunction());
    }
    return lhs;
  }

  std::int32_t conjunction() {
    auto lhs = unary();
    while (match("&&") || match("&") || match("∧")) {
      lhs = binary(Op::conj, lhs, unary());
    }
    return lhs;
  }

  std::int32_t unary() {
    skip();
    if (src_.substr(pos_, 2) != "!=" && (match("!") || match("¬"))) {
      return binary(Op::negate, unary(), -1);
    }
    return primary();
  }

  std::int32_t primary() {
    skip();
    if (match("(")) {
      const auto inner = expr();
      expect(")");
      return inner;
    }
    const auto start = pos_;
    const auto word = ident();
    if (word == "true" || word == "false") {
      FormulaNode n;
      n.op = Op::truth;
      n.value = word == "true" ? 1 : 0;
      return add(std::move(n));
    }
    if ((word == "G" || word == "GF") && (skip(), peek() == '[')) {
      pos_ = start;
      fail("state expression (temporal operators are only allowed at the top level)");
    }
    pos_ = start;
    const auto col = pos_;
    const auto lhs = term(false);
    const auto cmp = comparison();
    const auto rhs = term(false);
    const auto& l = f_.nodes[static_cast<std::size_t>(lhs)];
    const auto& r = f_.nodes[static_cast<std::size_t>(rhs)];
    if (l.type != r.type) {
      pos_ = col;
      fail("operands of the same type");
    }
    if (cmp != Cmp::eq && cmp != Cmp::ne && l.type != ValueType::count) {
      pos_ = col;
      fail("numeric operands for an ordering comparison");
    }
    FormulaNode n;
    n.op = Op::compare;
    n.cmp = cmp;
    n.a = lhs;
    n.b = rhs;
    return add(std::move(n));
  }

  Cmp comparison() {
    if (match("==")) return Cmp::eq;
    if (match("!=") || match("≠")) return Cmp::ne;
    if (match("<=") || match("≤")) return Cmp::le;
    if (match(">=") || match("≥")) return Cmp::ge;
    skip();
    if (src_.substr(pos_, 2) != "=>" && match("=")) return Cmp::eq;
    if (match("<")) return Cmp::lt;
    if (match(">")) return Cmp::gt;
    fail("comparison operator");
  }

  std::int32_t term(bool inside_next) {
    skip();
    FormulaNode n;
    if (std::isdigit(static_cast<unsigned char>(peek()))) {
      std::int32_t v = 0;
      auto [end, ec] = std::from_chars(src_.data() + pos_, src_.data() + src_.size(), v);
      if (ec != std::errc()) fail("integer");
      pos_ = static_cast<std::size_t>(end - src_.data());
      n.op = Op::constant;
      n.type = ValueType::count;
      n.value = v;
      return add(std::move(n));
    }
    const auto start = pos_;
    const auto word = ident();
    if (word.empty()) fail("term");
    for (const auto& c : kConstants) {
      if (word == c.word) {
        n.op = Op::constant;
        n.type = c.type;
        n.value = c.value;
        return add(std::move(n));
      }
    }
    if (word == "next") {
      if (inside_next) {
        pos_ = start;
        fail("term (next may not be nested)");
      }
      expect("(");
      const auto inner = term(true);
      expect(")");
      n.op = Op::next;
      n.type = f_.nodes[static_cast<std::size_t>(inner)].type;
      n.a = inner;
      f_.uses_next = true;
      return add(std::move(n));
    }
    for (const auto& fn : kFunctions) {
      if (word == fn.word) {
        expect("(");
        n.op = fn.op;
        n.type = fn.type;
        n.name = component_name();
        expect(")");
        return add(std::move(n));
      }
    }
    skip();
    if (peek() == '(' || peek() == '[') throw UnknownOperator(std::string(word));
    pos_ = start;
    fail("term");
  }

  // Component names may themselves contain balanced parentheses: U_IR(09C).
  std::string component_name() {
    skip();
    const auto start = pos_;
    int depth = 0;
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) break;
      if (c == '(') ++depth;
      if (c == ')') {
        if (depth == 0) break;
        --depth;
      }
      ++pos_;
    }
    if (pos_ == start) fail("component name");
    return std::string(src_.substr(start, pos_ - start));
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  Formula f_;
};

bool same(const Formula& x, std::int32_t i, const Formula& y, std::int32_t j) {
  if (i < 0 || j < 0) return i == j;
  const auto& a = x.nodes[static_cast<std::size_t>(i)];
  const auto& b = y.nodes[static_cast<std::size_t>(j)];
  if (a.op != b.op || a.type != b.type || a.value != b.value || a.name != b.name) return false;
  if (a.op == Op::compare && a.cmp != b.cmp) return false;
  return same(x, a.a, y, b.a) && same(x, a.b, y, b.b);
}

std::string_view cmp_text(Cmp c) {
  switch (c) {
    case Cmp::eq: return "==";
    case Cmp::ne: return "!=";
    case Cmp::lt: return "<";
    case Cmp::le: return "<=";
    case Cmp::gt: return ">";
    case Cmp::ge: return ">=";
  }
  return "?";
}

std::string_view function_word(Op op) {
  for (const auto& fn : kFunctions) {
    if (fn.op == op) return fn.word;
  }
  return "?";
}

std::string print_node(const Formula& f, std::int32_t i) {
  const auto& n = f.nodes[static_cast<std::size_t>(i)];
  auto wrap = [&](std::int32_t c, bool always) {
    const auto op = f.nodes[static_cast<std::size_t>(c)].op;
    const bool atomic = op == Op::truth || op == Op::compare;
    return (atomic && !always) ? print_node(f, c) : "(" + print_node(f, c) + ")";
  };
  switch (n.op) {
    case Op::constant:
      switch (n.type) {
        case ValueType::count: return std::to_string(n.value);
        case ValueType::position: return n.value ? "reverse" : "normal";
        case ValueType::route_state: return n.value ? "set" : "unset";
        case ValueType::lock_state: return n.value ? "locked" : "free";
        case ValueType::boolean: return n.value ? "true" : "false";
      }
      return "?";
    case Op::trains:
    case Op::point:
    case Op::route:
    case Op::sub:
    case Op::uir:
      return std::string(function_word(n.op)) + "(" + n.name + ")";
    case Op::next: return "next(" + print_node(f, n.a) + ")";
    case Op::truth: return n.value ? "true" : "false";
    case Op::compare:
      return print_node(f, n.a) + " " + std::string(cmp_text(n.cmp)) + " " + print_node(f, n.b);
    case Op::negate: return "!" + wrap(n.a, false);
    case Op::conj: return wrap(n.a, false) + " & " + wrap(n.b, false);
    case Op::disj: return wrap(n.a, false) + " | " + wrap(n.b, false);
    case Op::implies: return wrap(n.a, true) + " => " + wrap(n.b, true);
  }
  return "?";
}

std::int32_t term_value(const Formula& f, std::int32_t i, const StateRecord& cur,
                        const StateRecord* next) {
  const auto& n = f.nodes[static_cast<std::size_t>(i)];
  const auto slot = static_cast<std::size_t>(n.slot);
  switch (n.op) {
    case Op::constant: return n.value;
    case Op::trains: return cur.tracks[slot];
    case Op::point: return cur.points[slot];
    case Op::route: return cur.routes[slot];
    case Op::sub: return cur.subroutes[slot];
    case Op::uir: return cur.uirs[slot];
    case Op::next: return term_value(f, n.a, *next, nullptr);
    default: return 0;
  }
}

bool truth_value(const Formula& f, std::int32_t i, const StateRecord& cur,
                 const StateRecord* next) {
  const auto& n = f.nodes[static_cast<std::size_t>(i)];
  switch (n.op) {
    case Op::truth: return n.value != 0;
    case Op::compare: {
      const auto a = term_value(f, n.a, cur, next);
      const auto b = term_value(f, n.b, cur, next);
      switch (n.cmp) {
        case Cmp::eq: return a == b;
        case Cmp::ne: return a != b;
        case Cmp::lt: return a < b;
        case Cmp::le: return a <= b;
        case Cmp::gt: return a > b;
        case Cmp::ge: return a >= b;
      }
      return false;
    }
    case Op::negate: return !truth_value(f, n.a, cur, next);
    case Op::conj: return truth_value(f, n.a, cur, next) && truth_value(f, n.b, cur, next);
    case Op::disj: return truth_value(f, n.a, cur, next) || truth_value(f, n.b, cur, next);
    case Op::implies: return !truth_value(f, n.a, cur, next) || truth_value(f, n.b, cur, next);
    default: return false;
  }
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

bool operator==(const Formula& x, const Formula& y) {
  return x.temporal == y.temporal && x.bound == y.bound && x.window == y.window &&
         same(x, x.root, y, y.root);
}

Formula parse_formula(std::string_view text) { return Parser(text).run(); }

std::string print_formula(const Formula& f) {
  std::string prefix;
  if (f.temporal == Temporal::globally) {
    prefix = "G[" + std::to_string(f.bound) + "] ";
  } else if (f.temporal == Temporal::globally_finally) {
    prefix = "GF[" + std::to_string(f.bound) + "," + std::to_string(f.window) + "] ";
  }
  return prefix + (f.root < 0 ? std::string("true") : print_node(f, f.root));
}

RecordSchema schema_of(const InterlockingModel& m) {
  return {m.points, m.routes, m.subroutes, m.uirs, m.tracks};
}

Formula bind(Formula f, const RecordSchema& schema) {
  auto lookup = [](const std::vector<std::string>& names, const std::string& name) {
    auto it = std::find(names.begin(), names.end(), name);
    return it == names.end() ? -1 : static_cast<std::int32_t>(it - names.begin());
  };
  for (auto& n : f.nodes) {
    switch (n.op) {
      case Op::trains:
        n.slot = lookup(schema.tracks, n.name);
        if (n.slot < 0) throw UnknownTrack(n.name);
        break;
      case Op::route:
        n.slot = lookup(schema.routes, n.name);
        if (n.slot < 0) throw UnknownRoute(n.name);
        break;
      case Op::point:
      case Op::sub:
      case Op::uir: {
        const auto& names = n.op == Op::point ? schema.points
                            : n.op == Op::sub ? schema.subroutes
                                              : schema.uirs;
        n.slot = lookup(names, n.name);
        if (n.slot < 0) {
          throw LinkError("formula names unknown " + std::string(function_word(n.op)) + " '" +
                          n.name + "'");
        }
        break;
      }
      default:
        break;
    }
  }
  return f;
}

bool evaluate_state(const Formula& f, const StateRecord& cur, const StateRecord* next) {
  return f.root < 0 || truth_value(f, f.root, cur, next);
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::pending: return "pending";
    case Verdict::holds: return "holds";
    case Verdict::violated: return "violated";
  }
  return "?";
}

Monitor::Monitor(std::shared_ptr<const Formula> formula) : formula_(std::move(formula)) {}

void Monitor::decide(Verdict v, std::size_t index) {
  outcome_ = {v, index};
  held_.reset();
}

void Monitor::value_at(std::size_t index, std::uint64_t nb, bool value) {
  const auto& f = *formula_;
  if (value) {
    open_ = false;
  } else if (nb <= f.bound && !open_) {
    open_ = true;
    open_nb_ = nb;
  }
  if (nb > f.bound && !open_) decide(Verdict::holds, index);
}

Verdict Monitor::observe(const StateRecord* prev, const StateRecord& cur) {
  if (final()) throw MonitorFinished();
  const auto& f = *formula_;
  const auto idx = count_++;
  if (f.uses_next && idx > 0 && prev == nullptr) {
    throw Error("monitor needs the previous record");
  }
  switch (f.temporal) {
    case Temporal::none:
      if (!f.uses_next) {
        decide(evaluate_state(f, cur, nullptr) ? Verdict::holds : Verdict::violated, 0);
      } else if (idx == 1) {
        decide(evaluate_state(f, *prev, &cur) ? Verdict::holds : Verdict::violated, 0);
      }
      break;
    case Temporal::globally:
      if (f.uses_next && idx > 0 && cur.nb <= f.bound && !evaluate_state(f, *prev, &cur)) {
        decide(Verdict::violated, idx - 1);
        break;
      }
      if (cur.nb > f.bound) {
        decide(Verdict::holds, idx);
      } else if (!f.uses_next && !evaluate_state(f, cur, nullptr)) {
        decide(Verdict::violated, idx);
      }
      break;
    case Temporal::globally_finally:
      if (f.uses_next && idx > 0) {
        value_at(idx - 1, prev->nb, evaluate_state(f, *prev, &cur));
        if (final()) break;
      }
      if (open_ && cur.nb > open_nb_ + f.window) {
        decide(Verdict::violated, idx);
      } else if (!open_ && cur.nb > f.bound) {
        decide(Verdict::holds, idx);
      } else if (!f.uses_next) {
        value_at(idx, cur.nb, evaluate_state(f, cur, nullptr));
      }
      break;
  }
  return outcome_.verdict;
}

Verdict Monitor::step(const StateRecord& record) {
  const StateRecord* prev = held_ ? &*held_ : nullptr;
  observe(prev, record);
  if (!final() && formula_->uses_next) held_ = record;
  return outcome_.verdict;
}

Verdict Monitor::close_stalled(const StateRecord& last) {
  if (final()) return outcome_.verdict;
  const auto& f = *formula_;
  const auto length = count_;
  if (length == 0) throw TraceTooShort();
  switch (f.temporal) {
    case Temporal::none:
      decide(evaluate_state(f, last, &last) ? Verdict::holds : Verdict::violated, 0);
      break;
    case Temporal::globally:
      if (f.uses_next && !evaluate_state(f, last, &last)) {
        decide(Verdict::violated, length - 1);
      } else {
        decide(Verdict::holds, length);
      }
      break;
    case Temporal::globally_finally:
      if (f.uses_next) {
        value_at(length - 1, last.nb, evaluate_state(f, last, &last));
        if (final()) break;
      }
      decide(open_ ? Verdict::violated : Verdict::holds, length);
      break;
  }
  return outcome_.verdict;
}

Verdict monitor_step(Monitor& monitor, const StateRecord& record) {
  return monitor.step(record);
}

Outcome evaluate_trace(const Formula& f, const std::vector<StateRecord>& trace,
                       TraceEnd end) {
  const auto length = trace.size();
  const bool stalled = end == TraceEnd::stalled;
  auto value = [&](std::size_t i) -> std::optional<bool> {
    if (!f.uses_next) return evaluate_state(f, trace[i], nullptr);
    if (i + 1 < length) return evaluate_state(f, trace[i], &trace[i + 1]);
    if (stalled) return evaluate_state(f, trace[i], &trace[i]);
    return std::nullopt;
  };

  if (f.temporal == Temporal::none) {
    if (length == 0) throw TraceTooShort();
    const auto v = value(0);
    if (!v) throw TraceTooShort();
    return {*v ? Verdict::holds : Verdict::violated, 0};
  }

  std::size_t past = length;  // first record beyond the bound
  for (std::size_t i = 0; i < length; ++i) {
    if (trace[i].nb > f.bound) {
      past = i;
      break;
    }
  }

  if (f.temporal == Temporal::globally) {
    for (std::size_t i = 0; i < past; ++i) {
      if (f.uses_next && i + 1 == past && past < length) continue;
      const auto v = value(i);
      if (!v) break;
      if (!*v) return {Verdict::violated, i};
    }
    if (past < length) return {Verdict::holds, past};
    if (stalled) return {Verdict::holds, length};
    throw TraceTooShort();
  }

  // Globally-finally: classify every obligation by how it ends.
  const std::size_t known = (f.uses_next && !stalled) ? (length ? length - 1 : 0) : length;
  std::vector<bool> val(known);
  for (std::size_t i = 0; i < known; ++i) val[i] = *value(i);

  constexpr auto none = static_cast<std::size_t>(-1);
  std::size_t violation = none;
  bool undecided = false;
  struct Obligation {
    std::size_t opened;
    std::size_t closed;  // none while open
  };
  std::vector<Obligation> obligations;
  for (std::size_t i = 0; i < known; ++i) {
    if (trace[i].nb > f.bound || val[i]) continue;
    const auto deadline = trace[i].nb + f.window;
    Obligation ob{i, none};
    bool settled = false;
    for (std::size_t j = i; j < length; ++j) {
      if (trace[j].nb > deadline) {
        violation = std::min(violation, j);
        settled = true;
        break;
      }
      if (j < known && val[j]) {
        ob.closed = j;
        settled = true;
        break;
      }
    }
    if (!settled) undecided = true;
    obligations.push_back(ob);
  }

  std::size_t holds_at = none;
  for (std::size_t j = 0; j < length && holds_at == none; ++j) {
    if (trace[j].nb <= f.bound) continue;
    const bool all_closed = std::all_of(obligations.begin(), obligations.end(), [&](const auto& ob) {
      return ob.opened >= j || (ob.closed != none && ob.closed <= j);
    });
    if (all_closed) holds_at = j;
  }

  if (violation != none && (holds_at == none || violation < holds_at)) {
    return {Verdict::violated, violation};
  }
  if (holds_at != none) return {Verdict::holds, holds_at};
  if (!stalled) throw TraceTooShort();
  return {undecided ? Verdict::violated : Verdict::holds, length};
}

MonitorSet::MonitorSet(const std::vector<std::shared_ptr<const Formula>>& formulas) {
  monitors_.reserve(formulas.size());
  for (const auto& f : formulas) monitors_.emplace_back(f);
  remaining_ = monitors_.size();
}

void MonitorSet::observe(StateRecord&& record) {
  const StateRecord* prev = prev_ ? &*prev_ : nullptr;
  for (auto& m : monitors_) {
    if (m.final()) continue;
    m.observe(prev, record);
    if (m.final()) --remaining_;
  }
  prev_ = std::move(record);
}

void MonitorSet::close_stalled() {
  if (!prev_) return;
  for (auto& m : monitors_) {
    if (m.final()) continue;
    m.close_stalled(*prev_);
    --remaining_;
  }
}

std::vector<Property> parse_property_file(std::string_view text) {
  std::vector<Property> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    const auto body = trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    Property p;
    p.text = body;
    try {
      p.formula = parse_formula(body);
    } catch (const SyntaxError& e) {
      throw SyntaxError(line_no, e.column() + line.find(body.front()), e.expected());
    }
    p.name = "line " + std::to_string(line_no);
    if (hash != std::string::npos) {
      auto comment = trim(std::string_view(line).substr(hash + 1));
      if (comment.size() >= 3 && comment[0] == '(' && std::isdigit(static_cast<unsigned char>(comment[1])) &&
          comment[2] == ')') {
        p.cls = comment[1] - '0';
        comment = trim(std::string_view(comment).substr(3));
      }
      if (!comment.empty()) p.name = comment;
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::string print_property_file(const std::vector<Property>& properties) {
  std::string out;
  for (const auto& p : properties) {
    out += p.text.empty() ? print_formula(p.formula) : p.text;
    out += "  # (" + std::to_string(p.cls) + ") " + p.name + "\n";
  }
  return out;
}

}  // namespace interlock
