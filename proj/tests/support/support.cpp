#include "support.hpp"

#include "interlock/error.hpp"

#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace interlock::testing {

std::string data_path(const std::string& relative) {
  return std::string(INTERLOCK_DATA_DIR) + "/" + relative;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

const Fixture& fixture() {
  static const Fixture f = [] {
    Fixture x;
    x.data = parse_appdata(slurp(data_path("fixture/station.ssi")));
    x.graph = parse_layout(slurp(data_path("fixture/station.xml")));
    x.decls = parse_route_decls(slurp(data_path("fixture/station.routes")));
    x.model = link(x.data, x.graph, x.decls);
    return x;
  }();
  return f;
}

InterlockingModel mutant(const MutationSpec& spec) {
  const auto& f = fixture();
  return link(apply_mutation(f.data, spec), f.graph, f.decls, LinkMode::tolerant);
}

InterlockingModel mutant(std::string_view type, std::string_view target) {
  return mutant(MutationSpec{parse_mutation_type(type), parse_locator(target), std::nullopt});
}

RecordSchema tiny_schema() {
  RecordSchema s;
  s.points = {"P_1", "P_2"};
  s.routes = {"R_A", "R_B"};
  s.subroutes = {"U_A", "U_B"};
  s.uirs = {"U_IR(1)"};
  s.tracks = {"T_1", "T_2"};
  return s;
}

namespace {

template <class T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& v) {
  return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

int roll(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

std::string atom(std::mt19937_64& rng, const RecordSchema& s) {
  static const std::vector<std::string> cmps = {"==", "!=", "<", "<=", ">", ">="};
  auto maybe_next = [&](const std::string& term) {
    if (roll(rng, 0, 3) == 0) return "next(" + term + ")";
    return term;
  };
  switch (roll(rng, 0, 5)) {
    case 0: {
      const auto lhs = "trains(" + pick(rng, s.tracks) + ")";
      const auto rhs = roll(rng, 0, 1) ? std::to_string(roll(rng, 0, 2))
                                       : "trains(" + pick(rng, s.tracks) + ")";
      return maybe_next(lhs) + " " + pick(rng, cmps) + " " + rhs;
    }
    case 1: {
      const auto p = "point(" + pick(rng, s.points) + ")";
      const auto rhs = roll(rng, 0, 1) ? std::string(roll(rng, 0, 1) ? "normal" : "reverse")
                                       : maybe_next(p);
      return p + (roll(rng, 0, 1) ? " == " : " != ") + rhs;
    }
    case 2:
      return maybe_next("route(" + pick(rng, s.routes) + ")") + " == " +
             (roll(rng, 0, 1) ? "set" : "unset");
    case 3:
      return maybe_next("sub(" + pick(rng, s.subroutes) + ")") + " == " +
             (roll(rng, 0, 1) ? "free" : "locked");
    case 4:
      return "uir(" + pick(rng, s.uirs) + ") != " + (roll(rng, 0, 1) ? "free" : "locked");
    default:
      return roll(rng, 0, 1) ? "true" : "false";
  }
}

std::string expr(std::mt19937_64& rng, const RecordSchema& s, int depth) {
  if (depth <= 0 || roll(rng, 0, 2) == 0) return atom(rng, s);
  switch (roll(rng, 0, 3)) {
    case 0: return "!(" + expr(rng, s, depth - 1) + ")";
    case 1: return "(" + expr(rng, s, depth - 1) + ") & (" + expr(rng, s, depth - 1) + ")";
    case 2: return "(" + expr(rng, s, depth - 1) + ") | (" + expr(rng, s, depth - 1) + ")";
    default: return "(" + expr(rng, s, depth - 1) + ") => (" + expr(rng, s, depth - 1) + ")";
  }
}

}  // namespace

std::string random_formula(std::mt19937_64& rng, const RecordSchema& schema, int max_depth) {
  const auto body = expr(rng, schema, roll(rng, 0, max_depth));
  switch (roll(rng, 0, 4)) {
    case 0: return body;
    case 1:
    case 2: return "G[" + std::to_string(roll(rng, 1, 12)) + "] " + body;
    default:
      return "GF[" + std::to_string(roll(rng, 1, 12)) + "," + std::to_string(roll(rng, 1, 5)) + "] " + body;
  }
}

std::vector<StateRecord> random_trace(std::mt19937_64& rng, const RecordSchema& schema,
                                      std::size_t length) {
  std::vector<StateRecord> out;
  StateRecord r;
  r.points.assign(schema.points.size(), 0);
  r.routes.assign(schema.routes.size(), 0);
  r.subroutes.assign(schema.subroutes.size(), 0);
  r.uirs.assign(schema.uirs.size(), 0);
  r.tracks.assign(schema.tracks.size(), 0);
  for (std::size_t i = 0; i < length; ++i) {
    if (i > 0) {
      r.nb += static_cast<std::uint64_t>(roll(rng, 0, 2));
      r.event = EventKind::movement;
      // Change a couple of components, sometimes none so stutter steps occur.
      for (int k = roll(rng, 0, 2); k > 0; --k) {
        switch (roll(rng, 0, 4)) {
          case 0: r.points[static_cast<std::size_t>(roll(rng, 0, 1))] ^= 1; break;
          case 1: r.routes[static_cast<std::size_t>(roll(rng, 0, 1))] ^= 1; break;
          case 2: r.subroutes[static_cast<std::size_t>(roll(rng, 0, 1))] ^= 1; break;
          case 3: r.uirs[0] ^= 1; break;
          default: r.tracks[static_cast<std::size_t>(roll(rng, 0, 1))] = static_cast<std::uint16_t>(roll(rng, 0, 2)); break;
        }
      }
    }
    r.now = static_cast<double>(i);
    out.push_back(r);
  }
  return out;
}

namespace {

std::string show(const std::optional<Outcome>& o) {
  if (!o) return "too-short";
  return std::string(to_string(o->verdict)) + "@" + std::to_string(o->index);
}

std::optional<Outcome> reference(const Formula& f, const std::vector<StateRecord>& trace,
                                 TraceEnd end) {
  try {
    return evaluate_trace(f, trace, end);
  } catch (const TraceTooShort&) {
    return std::nullopt;
  }
}

}  // namespace

bool oracle_agrees(const Formula& f, const std::vector<StateRecord>& trace, std::string* why) {
  auto shared = std::make_shared<const Formula>(f);
  Monitor m(shared);
  for (const auto& r : trace) {
    if (m.final()) break;
    m.step(r);
  }
  const std::optional<Outcome> open =
      m.final() ? std::optional<Outcome>(m.outcome()) : std::nullopt;
  const auto ref_open = reference(f, trace, TraceEnd::open);
  if (open != ref_open) {
    if (why) *why = "open trace: monitor " + show(open) + ", reference " + show(ref_open);
    return false;
  }
  if (!m.final() && !trace.empty()) m.close_stalled(trace.back());
  const std::optional<Outcome> stalled =
      m.final() ? std::optional<Outcome>(m.outcome()) : std::nullopt;
  const auto ref_stalled = reference(f, trace, TraceEnd::stalled);
  if (stalled != ref_stalled) {
    if (why) *why = "stalled trace: monitor " + show(stalled) + ", reference " + show(ref_stalled);
    return false;
  }
  return true;
}

}  // namespace interlock::testing
