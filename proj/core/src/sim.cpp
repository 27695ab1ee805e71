#include "interlock/sim.hpp"

#include <algorithm>
#include <json.hpp>

#include "interlock/error.hpp"

namespace interlock {

void SimConfig::validate() const {
  if (!(beta_a > 0) || !(beta_r > 0) || !(beta_m > 0)) {
    throw ConfigError("beta_a, beta_r and beta_m must be positive");
  }
  if (bound_trains < 1) throw ConfigError("bound_trains must be at least 1");
  if (stall_time < 0) throw ConfigError("stall_time must not be negative");
}

double SimConfig::effective_stall_time() const {
  return stall_time > 0 ? stall_time : 50.0 * (beta_a + beta_r + beta_m);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::init: return "init";
    case EventKind::arrival: return "arrival";
    case EventKind::route_request: return "request";
    case EventKind::movement: return "move";
  }
  return "?";
}

std::string_view to_string(MoveOutcome outcome) {
  switch (outcome) {
    case MoveOutcome::moved: return "moved";
    case MoveOutcome::derailed_position: return "derailed_position";
    case MoveOutcome::exited: return "exited";
  }
  return "?";
}

namespace {

bool later(const Event& a, const Event& b) {
  return a.time > b.time || (a.time == b.time && a.seq > b.seq);
}

void schedule(SimState& s, double time, EventKind kind, std::uint32_t subject) {
  s.queue.push_back({time, s.next_seq++, kind, subject});
  std::push_heap(s.queue.begin(), s.queue.end(), later);
}

Train* train_ptr(SimState& s, std::uint32_t id) {
  auto it = std::lower_bound(s.trains.begin(), s.trains.end(), id,
                             [](const Train& t, std::uint32_t v) { return t.id < v; });
  return it != s.trains.end() && it->id == id ? &*it : nullptr;
}

void maybe_request(SimState& s, std::uint32_t entry) {
  if (s.request_pending[entry] || s.departing[entry] >= 0 || s.waiting[entry].empty()) {
    return;
  }
  s.request_pending[entry] = 1;
  schedule(s, s.now + s.rng.delay(s.config.beta_r), EventKind::route_request, entry);
}

bool holds(const SimState& s, const InterlockingModel& m, const compiled::Cond& c,
           bool nested);

bool all_hold(const SimState& s, const InterlockingModel& m,
              const std::vector<compiled::Cond>& conds, bool nested) {
  return std::all_of(conds.begin(), conds.end(),
                     [&](const auto& c) { return holds(s, m, c, nested); });
}

bool point_free(const SimState& s, const InterlockingModel& m, std::uint32_t p,
                std::uint8_t position, bool nested) {
  if (s.points[p] == position) return true;
  if (nested) return false;
  const auto& info = m.point_info[p];
  return info.has_rule[position] && all_hold(s, m, info.rule[position], true);
}

bool holds(const SimState& s, const InterlockingModel& m, const compiled::Cond& c,
           bool nested) {
  using compiled::CondOp;
  switch (c.op) {
    case CondOp::route_unset: return s.routes[c.index] == 0;
    case CondOp::route_set: return s.routes[c.index] != 0;
    case CondOp::point_free_normal: return point_free(s, m, c.index, 0, nested);
    case CondOp::point_free_reverse: return point_free(s, m, c.index, 1, nested);
    case CondOp::sub_free: return s.subroutes[c.index] == 0;
    case CondOp::sub_locked: return s.subroutes[c.index] != 0;
    case CondOp::uir_free: return s.uirs[c.index] == 0;
    case CondOp::uir_locked: return s.uirs[c.index] != 0;
    case CondOp::track_clear: return s.tracks[c.index] == 0;
    case CondOp::track_occupied: return s.tracks[c.index] != 0;
  }
  return false;
}

void handle_request(SimState& s, const InterlockingModel& m, std::uint32_t entry,
                    StateRecord& rec) {
  s.request_pending[entry] = 0;
  const auto& routes = m.entries[entry].routes;
  if (s.waiting[entry].empty() || s.departing[entry] >= 0 || routes.empty()) return;
  const auto route = routes[s.rng.index(static_cast<std::uint32_t>(routes.size()))];
  rec.subject = route;
  const bool granted = evaluate_route_request(s, m, route);
  rec.detail = granted ? 1 : 0;
  if (!granted) {
    maybe_request(s, entry);
    return;
  }
  Train t = s.waiting[entry].front();
  s.waiting[entry].pop_front();
  t.route = static_cast<std::int32_t>(route);
  auto pos = std::lower_bound(s.trains.begin(), s.trains.end(), t.id,
                              [](const Train& a, std::uint32_t v) { return a.id < v; });
  s.trains.insert(pos, t);
  s.departing[entry] = t.id;
  schedule(s, s.now + s.rng.delay(s.config.beta_m), EventKind::movement, t.id);
}

}  // namespace

const Train* SimState::find_train(std::uint32_t id) const {
  return train_ptr(const_cast<SimState&>(*this), id);
}

const Event& SimState::next_event() const {
  if (queue.empty()) throw QueueEmpty();
  return queue.front();
}

SimState init_sim(const InterlockingModel& model, const SimConfig& config) {
  config.validate();
  SimState s;
  s.config = config;
  s.rng = Rng(config.seed);
  s.points.assign(model.points.size(), 0);
  s.routes.assign(model.routes.size(), 0);
  s.subroutes.assign(model.subroutes.size(), 0);
  s.uirs.assign(model.uirs.size(), 0);
  s.tracks.assign(model.tracks.size(), 0);
  s.waiting.resize(model.entries.size());
  s.request_pending.assign(model.entries.size(), 0);
  s.departing.assign(model.entries.size(), -1);
  schedule(s, s.rng.delay(config.beta_a), EventKind::arrival, 0);
  return s;
}

bool evaluate_route_request(SimState& state, const InterlockingModel& model,
                            std::string_view route) {
  const auto r = model.route_index(route);
  if (r < 0) throw UnknownRoute(std::string(route));
  return evaluate_route_request(state, model, static_cast<std::uint32_t>(r));
}

bool evaluate_route_request(SimState& s, const InterlockingModel& m, std::uint32_t route) {
  if (route >= m.route_info.size() || !m.route_info[route].has_request) {
    throw UnknownRoute(route < m.routes.size() ? m.routes[route] : std::to_string(route));
  }
  const auto& info = m.route_info[route];
  if (!all_hold(s, m, info.conds, false)) return false;
  using compiled::ActOp;
  for (const auto& a : info.acts) {
    switch (a.op) {
      case ActOp::set_route: s.routes[a.index] = 1; break;
      case ActOp::point_normal: s.points[a.index] = 0; break;
      case ActOp::point_reverse: s.points[a.index] = 1; break;
      case ActOp::lock_sub: s.subroutes[a.index] = 1; break;
      case ActOp::lock_uir: s.uirs[a.index] = 1; break;
    }
  }
  s.last_change = s.now;
  return true;
}

void apply_releases(SimState& s, const InterlockingModel& m) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& rel : m.releases) {
      auto& slot = rel.uir ? s.uirs[rel.target] : s.subroutes[rel.target];
      if (slot == 0 || !all_hold(s, m, rel.conds, false)) continue;
      slot = 0;
      changed = true;
      s.last_change = s.now;
    }
  }
}

MoveOutcome move_train(SimState& s, const InterlockingModel& m, std::uint32_t id) {
  Train* t = train_ptr(s, id);
  if (t == nullptr || t->route < 0) throw UnknownTrain(id);
  if (t->derailed) return MoveOutcome::derailed_position;
  const auto& route = m.route_info[static_cast<std::size_t>(t->route)];

  if (t->edge < 0) {
    const auto first = route.path.front();
    t->edge = static_cast<std::int32_t>(first);
    t->toward = m.edge_info[first].other(route.entry_node);
    t->track = m.edge_info[first].track;
    ++s.tracks[t->track];
    ++s.nb;
    s.last_change = s.now;
    s.departing[t->entry] = -1;
    maybe_request(s, t->entry);
    return MoveOutcome::moved;
  }

  const auto node = t->toward;
  const auto& info = m.node_info[node];
  const auto here = static_cast<std::uint32_t>(t->edge);
  std::int64_t next = -1;
  bool derail = false;
  if (node != route.exit_node && info.kind == NodeKind::point) {
    const auto& p = m.point_info[static_cast<std::size_t>(info.point)];
    const auto selected = s.points[static_cast<std::size_t>(info.point)] ? p.reverse : p.normal;
    if (here == p.toe) {
      next = selected;
    } else {
      next = p.toe;
      derail = here != selected;
    }
  } else if (node != route.exit_node && info.kind != NodeKind::boundary) {
    for (auto e : info.edges) {
      if (e != here) next = e;
    }
  }

  s.last_change = s.now;
  --s.tracks[m.edge_info[here].track];
  if (next < 0) {
    s.routes[static_cast<std::size_t>(t->route)] = 0;
    s.trains.erase(s.trains.begin() + (t - s.trains.data()));
    return MoveOutcome::exited;
  }
  const auto to = static_cast<std::uint32_t>(next);
  ++s.tracks[m.edge_info[to].track];
  t->edge = static_cast<std::int32_t>(to);
  t->track = m.edge_info[to].track;
  t->toward = m.edge_info[to].other(node);
  if (derail) {
    t->derailed = true;
    ++s.derailments;
    return MoveOutcome::derailed_position;
  }
  return MoveOutcome::moved;
}

StateRecord step(SimState& s, const InterlockingModel& m) {
  if (s.queue.empty()) throw QueueEmpty();
  std::pop_heap(s.queue.begin(), s.queue.end(), later);
  const Event ev = s.queue.back();
  s.queue.pop_back();
  s.now = ev.time;
  if (++s.events > s.config.max_events) {
    throw SimulationError("event limit exceeded", s.config.seed);
  }

  StateRecord head;
  head.event = ev.kind;
  switch (ev.kind) {
    case EventKind::init:
      break;
    case EventKind::arrival: {
      std::uint32_t entry = 0;
      if (!m.entries.empty()) {
        entry = s.rng.index(static_cast<std::uint32_t>(m.entries.size()));
        Train t;
        t.id = s.next_train++;
        t.entry = entry;
        t.direction = m.entries[entry].direction;
        t.toward = m.entries[entry].node;
        s.waiting[entry].push_back(t);
        head.subject = t.id;
        maybe_request(s, entry);
      }
      schedule(s, s.now + s.rng.delay(s.config.beta_a), EventKind::arrival, 0);
      break;
    }
    case EventKind::route_request:
      handle_request(s, m, ev.subject, head);
      break;
    case EventKind::movement: {
      const auto outcome = move_train(s, m, ev.subject);
      head.subject = ev.subject;
      head.detail = static_cast<std::uint8_t>(outcome);
      if (outcome == MoveOutcome::moved) {
        schedule(s, s.now + s.rng.delay(s.config.beta_m), EventKind::movement, ev.subject);
      }
      break;
    }
  }
  apply_releases(s, m);

  StateRecord rec = make_record(s);
  rec.event = head.event;
  rec.subject = head.subject;
  rec.detail = head.detail;
  return rec;
}

StateRecord make_record(const SimState& s) {
  StateRecord rec;
  rec.nb = s.nb;
  rec.now = s.now;
  rec.points = s.points;
  rec.routes = s.routes;
  rec.subroutes = s.subroutes;
  rec.uirs = s.uirs;
  rec.tracks = s.tracks;
  rec.trains.reserve(s.trains.size());
  for (const auto& t : s.trains) {
    if (t.edge < 0) continue;
    rec.trains.push_back({t.id, t.track, t.direction});
  }
  return rec;
}

Snapshot snapshot(const SimState& state) {
  Snapshot snap{state};
  snap.state.rng = Rng();
  return snap;
}

SimState restore(const Snapshot& snap, std::uint64_t seed) {
  SimState s = snap.state;
  s.rng = Rng(seed);
  s.config.seed = seed;
  return s;
}

std::vector<std::string> audit(const SimState& s, const InterlockingModel& m) {
  std::vector<std::string> issues;
  std::vector<std::uint32_t> counts(m.tracks.size(), 0);
  for (const auto& t : s.trains) {
    if (t.edge < 0) continue;
    ++counts[m.edge_info[static_cast<std::size_t>(t.edge)].track];
  }
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] != s.tracks[i]) {
      issues.push_back("track " + m.tracks[i] + " counts " + std::to_string(s.tracks[i]) +
                       " trains but " + std::to_string(counts[i]) + " are on it");
    }
  }
  for (const auto& e : s.queue) {
    if (e.time < s.now) issues.push_back("event scheduled in the past");
  }
  for (std::size_t i = 1; i < s.trains.size(); ++i) {
    if (s.trains[i - 1].id >= s.trains[i].id) issues.push_back("train list not sorted");
  }
  for (const auto& t : s.trains) {
    if (t.route < 0) issues.push_back("train " + std::to_string(t.id) + " has no route");
  }
  return issues;
}

std::string describe_event(const StateRecord& r, const InterlockingModel& m) {
  switch (r.event) {
    case EventKind::init:
      return "init";
    case EventKind::arrival:
      return "arrival:" + std::to_string(r.subject);
    case EventKind::route_request:
      return "request:" + (r.subject < m.routes.size() ? m.routes[r.subject] : "-") +
             (r.detail ? ":granted" : ":rejected");
    case EventKind::movement:
      return "move:" + std::to_string(r.subject) + ":" +
             std::string(to_string(static_cast<MoveOutcome>(r.detail)));
  }
  return "?";
}

std::string record_json(const StateRecord& r, const InterlockingModel& m) {
  using nlohmann::json;
  auto named = [](const std::vector<std::string>& names, const auto& values,
                  const char* zero, const char* one) {
    json out = json::object();
    for (std::size_t i = 0; i < names.size() && i < values.size(); ++i) {
      out[names[i]] = values[i] ? one : zero;
    }
    return out;
  };
  json j;
  j["nb"] = r.nb;
  j["now"] = r.now;
  j["event"] = describe_event(r, m);
  j["p"] = named(m.points, r.points, "normal", "reverse");
  j["r"] = named(m.routes, r.routes, "unset", "set");
  j["s"] = named(m.subroutes, r.subroutes, "free", "locked");
  j["u"] = named(m.uirs, r.uirs, "free", "locked");
  json t = json::object();
  for (std::size_t i = 0; i < m.tracks.size() && i < r.tracks.size(); ++i) {
    t[m.tracks[i]] = r.tracks[i];
  }
  j["t"] = std::move(t);
  json tr = json::object();
  for (const auto& p : r.trains) {
    tr[std::to_string(p.id)] = json::array(
        {p.track < m.tracks.size() ? m.tracks[p.track] : "?", std::string(to_string(p.direction))});
  }
  j["tr"] = std::move(tr);
  return j.dump();
}

}  // namespace interlock
