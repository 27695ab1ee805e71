#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <set>
#include <ostream>
#include <sstream>

#include "interlock/appdata.hpp"
#include "interlock/bltl.hpp"
#include "interlock/error.hpp"
#include "interlock/layout.hpp"
#include "interlock/model.hpp"
#include "interlock/mutate.hpp"
#include "interlock/propgen.hpp"
#include "interlock/report.hpp"
#include "interlock/smc.hpp"

namespace interlock::cli {
namespace {

using json = nlohmann::ordered_json;

constexpr std::uint64_t kDefaultWindow = 240;

struct Settings {
  std::string appdata;
  std::string layout;
  std::string routes;
  std::string props;
  std::string config;
  std::string traces;
  std::string out;
  std::string format = "table";
  std::string type;
  std::string target;
  std::string payload;
  std::string types = "a,b,c,d,e,f";
  bool lenient = false;

  std::uint64_t sims = 100;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::uint64_t bound = 1440;
  std::uint64_t gf_window = kDefaultWindow;
  double beta_a = 60.0;
  double beta_r = 30.0;
  double beta_m = 20.0;
  double stall_time = 0.0;
  double confidence = 0.95;
  // Zero means unset; both are only meaningful in (0, 1).
  double epsilon = 0.0;
  double delta = 0.0;
  std::uint64_t experiments = 10;
  std::uint64_t sims_per_level = 100;
};

/// Options that can also come from the config file, keyed by config name.
class Registry {
 public:
  template <class T>
  CLI::Option* add(CLI::App* app, const std::string& flag, T& field, const std::string& help) {
    auto* opt = app->add_option(flag, field, help);
    std::string key = flag.substr(2);
    std::replace(key.begin(), key.end(), '-', '_');
    entries_[app][key] = {opt, [&field, key](const json& v) {
                            try {
                              field = v.get<T>();
                            } catch (const json::exception&) {
                              throw ConfigError("config key '" + key + "' has the wrong type");
                            }
                          }};
    known_.insert(key);
    return opt;
  }

  /// Fills every option of `app` not given on the command line from `cfg`.
  std::set<std::string> apply(CLI::App* app, const json& cfg) const {
    if (!cfg.is_object()) throw ConfigError("config file must hold a JSON object");
    std::set<std::string> applied;
    const auto it = entries_.find(app);
    for (const auto& [key, value] : cfg.items()) {
      if (!known_.count(key)) throw ConfigError("unknown config key '" + key + "'");
      if (it == entries_.end()) continue;
      const auto e = it->second.find(key);
      if (e == it->second.end()) continue;
      if (e->second.option->count() == 0) {
        e->second.set(value);
        applied.insert(key);
      }
    }
    return applied;
  }

  bool given(CLI::App* app, const std::string& key) const {
    const auto it = entries_.find(app);
    if (it == entries_.end()) return false;
    const auto e = it->second.find(key);
    return e != it->second.end() && e->second.option->count() > 0;
  }

 private:
  struct Entry {
    CLI::Option* option = nullptr;
    std::function<void(const json&)> set;
  };
  std::map<CLI::App*, std::map<std::string, Entry>> entries_;
  std::set<std::string> known_;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + path + "'");
  f << text;
}

std::string require(const std::string& value, const std::string& flag) {
  if (value.empty()) throw ConfigError(flag + " is required");
  return value;
}

struct Inputs {
  ApplicationData data;
  StationGraph graph;
  RouteDecls decls;
  std::vector<InputFile> files;
  std::vector<std::string> warnings;
};

void add_file(Inputs& in, const std::string& role, const std::string& path, const std::string& text) {
  in.files.push_back({role, path, sha256_hex(text)});
}

Inputs load(const Settings& s, bool need_layout, bool need_routes) {
  Inputs in;
  const auto appdata = read_file(require(s.appdata, "--appdata"));
  add_file(in, "appdata", s.appdata, appdata);
  in.data = parse_appdata(appdata);
  if (need_layout) {
    const auto xml = read_file(require(s.layout, "--layout"));
    add_file(in, "layout", s.layout, xml);
    auto parsed = parse_layout_ex(xml, {s.lenient});
    in.graph = std::move(parsed.graph);
    in.warnings = std::move(parsed.warnings);
  }
  if (need_routes) {
    const auto routes = read_file(require(s.routes, "--routes"));
    add_file(in, "routes", s.routes, routes);
    in.decls = parse_route_decls(routes);
  }
  return in;
}

SimConfig sim_config(const Settings& s) {
  SimConfig c;
  c.beta_a = s.beta_a;
  c.beta_r = s.beta_r;
  c.beta_m = s.beta_m;
  c.bound_trains = s.bound;
  c.seed = s.seed;
  c.stall_time = s.stall_time;
  c.validate();
  return c;
}

std::optional<MutationSpec> mutation_of(const Settings& s) {
  if (s.type.empty() && s.target.empty()) return std::nullopt;
  MutationSpec spec;
  spec.type = parse_mutation_type(require(s.type, "--type"));
  spec.target = parse_locator(require(s.target, "--target"));
  if (!s.payload.empty()) spec.payload = parse_condition(s.payload);
  return spec;
}

ReportMeta meta_of(const Settings& s, const std::string& command, const Inputs& in) {
  ReportMeta m;
  m.command = command;
  m.master_seed = s.seed;
  m.inputs = in.files;
  m.sim = sim_config(s);
  m.gf_window = s.gf_window;
  return m;
}

std::string fmt(double v, int digits = 4) {
  std::ostringstream o;
  o << std::fixed << std::setprecision(digits) << v;
  return o.str();
}

// Properties that name only components the model knows. A mutant can lose
// the last mention of a subroute, which the clean suite still refers to.
std::vector<Property> bindable(const std::vector<Property>& props, const InterlockingModel& model,
                               std::vector<std::string>* skipped) {
  const auto schema = schema_of(model);
  std::vector<Property> out;
  for (const auto& p : props) {
    try {
      (void)bind(p.formula, schema);
      out.push_back(p);
    } catch (const Error&) {
      if (skipped) skipped->push_back(p.name);
    }
  }
  return out;
}

// Fraction of replicas violating at least one property of each class.
std::map<int, double> class_violation(const McResult& r, const std::vector<Property>& props) {
  std::map<int, double> out;
  for (int k = 1; k <= 5; ++k) {
    std::uint64_t hit = 0;
    for (const auto& rep : r.replicas) {
      bool any = false;
      for (std::size_t p = 0; p < props.size() && p < rep.outcomes.size(); ++p) {
        any |= props[p].cls == k && rep.outcomes[p].verdict == Verdict::violated;
      }
      hit += any ? 1 : 0;
    }
    out[k] = r.replicas.empty() ? 0.0
                                : static_cast<double>(hit) / static_cast<double>(r.replicas.size());
  }
  return out;
}

std::string error_kind(const Error& e) {
#define INTERLOCK_KIND(T) \
  if (dynamic_cast<const T*>(&e)) return #T;
  INTERLOCK_KIND(UnknownOperator)
  INTERLOCK_KIND(DuplicateRule)
  INTERLOCK_KIND(KindMismatch)
  INTERLOCK_KIND(XmlError)
  INTERLOCK_KIND(SchemaError)
  INTERLOCK_KIND(TopologyError)
  INTERLOCK_KIND(UnknownTrack)
  INTERLOCK_KIND(UnknownRoute)
  INTERLOCK_KIND(NoPath)
  INTERLOCK_KIND(LinkError)
  INTERLOCK_KIND(DomainError)
  INTERLOCK_KIND(ConfigError)
  INTERLOCK_KIND(IncompatibleTarget)
  INTERLOCK_KIND(NothingToRemove)
#undef INTERLOCK_KIND
  return "Error";
}

// ---- subcommands ----

int cmd_parse(const Settings& s, std::ostream& out) {
  if (s.appdata.empty() && s.layout.empty() && s.routes.empty()) {
    throw ConfigError("--appdata, --layout or --routes is required");
  }
  json j;
  std::ostringstream t;
  if (!s.appdata.empty()) {
    const auto text = read_file(s.appdata);
    const auto data = parse_appdata(text);
    json a;
    a["path"] = s.appdata;
    a["sha256"] = sha256_hex(text);
    a["route_requests"] = data.route_requests.size();
    a["point_commands"] = data.point_commands.size();
    a["releases"] = data.releases.size();
    for (auto kind : {ComponentKind::route, ComponentKind::point, ComponentKind::subroute,
                      ComponentKind::uir, ComponentKind::track, ComponentKind::signal}) {
      a["components"][std::string(to_string(kind))] = data.names(kind);
    }
    j["appdata"] = a;
    t << "appdata " << s.appdata << ": " << data.route_requests.size() << " route requests, "
      << data.point_commands.size() << " point commands, " << data.releases.size()
      << " releases, " << data.components.size() << " components\n";
  }
  if (!s.layout.empty()) {
    const auto text = read_file(s.layout);
    const auto parsed = parse_layout_ex(text, {s.lenient});
    const auto& g = parsed.graph;
    json l;
    l["path"] = s.layout;
    l["sha256"] = sha256_hex(text);
    l["name"] = g.name;
    l["nodes"] = g.nodes.size();
    l["edges"] = g.edges.size();
    l["tracks"] = g.tracks;
    l["entries"] = g.entry_signals;
    l["warnings"] = parsed.warnings;
    j["layout"] = l;
    t << "layout " << s.layout << ": station '" << g.name << "', " << g.nodes.size() << " nodes, "
      << g.edges.size() << " edges, " << g.tracks.size() << " tracks, "
      << g.entry_signals.size() << " entries\n";
    for (const auto& w : parsed.warnings) t << "  warning: " << w << "\n";
  }
  if (!s.routes.empty()) {
    const auto text = read_file(s.routes);
    const auto decls = parse_route_decls(text);
    json r;
    r["path"] = s.routes;
    r["sha256"] = sha256_hex(text);
    for (const auto& [name, d] : decls) r["routes"][name] = {{"entry", d.entry}, {"exit", d.exit}};
    j["routes"] = r;
    t << "routes " << s.routes << ": " << decls.size() << " declarations\n";
  }
  out << (s.format == "json" ? j.dump(2) + "\n" : t.str());
  return ok;
}

int cmd_validate(const Settings& s, std::ostream& out) {
  auto in = load(s, true, true);
  const auto issues = validate_appdata(in.data, in.graph);
  const auto model = link(in.data, in.graph, in.decls,
                          s.lenient ? LinkMode::tolerant : LinkMode::strict);
  json j;
  j["issues"] = json::array();
  for (const auto& i : issues) {
    j["issues"].push_back(
        {{"kind", std::string(to_string(i.kind))}, {"component", i.component}, {"detail", i.detail}});
  }
  j["warnings"] = in.warnings;
  for (const auto& w : model.warnings) j["warnings"].push_back(w);
  j["routes"] = json::object();
  for (const auto& r : model.route_info) {
    if (!r.has_geometry) continue;
    std::vector<std::string> tracks;
    for (auto t : r.path_tracks) tracks.push_back(model.tracks[static_cast<std::size_t>(t)]);
    j["routes"][r.name] = tracks;
  }
  j["conflicts"] = json::array();
  for (const auto& [a, b] : model.conflict_index) {
    j["conflicts"].push_back({model.routes[a], model.routes[b]});
  }
  if (s.format == "json") {
    out << j.dump(2) << "\n";
  } else {
    for (const auto& i : issues) {
      out << "issue " << to_string(i.kind) << " " << i.component << ": " << i.detail << "\n";
    }
    for (const auto& w : j["warnings"]) out << "warning: " << w.get<std::string>() << "\n";
    for (const auto& [name, tracks] : j["routes"].items()) {
      out << name << ":";
      for (const auto& t : tracks) out << " " << t.get<std::string>();
      out << "\n";
    }
    out << model.conflict_index.size() << " conflicting route pairs, " << issues.size()
        << " issues\n";
  }
  return issues.empty() ? ok : violation;
}

int cmd_genprops(const Settings& s, std::ostream& out) {
  auto in = load(s, true, true);
  const auto model = link(in.data, in.graph, in.decls,
                          s.lenient ? LinkMode::tolerant : LinkMode::strict);
  emit(s.out, print_property_file(gen_properties(model, s.bound, s.gf_window)), out);
  return ok;
}

int cmd_verify(const Settings& s, const Registry& reg, CLI::App* app, std::ostream& out) {
  auto in = load(s, true, true);
  const auto mode = s.lenient ? LinkMode::tolerant : LinkMode::strict;
  const auto clean = link(in.data, in.graph, in.decls, mode);
  std::vector<Property> props;
  if (!s.props.empty()) {
    const auto text = read_file(s.props);
    add_file(in, "props", s.props, text);
    props = parse_property_file(text);
  } else {
    props = gen_properties(clean, s.bound, s.gf_window);
  }
  const auto spec = mutation_of(s);
  const auto model = spec ? link(apply_mutation(in.data, *spec), in.graph, in.decls,
                                 LinkMode::tolerant)
                          : clean;

  McConfig mc;
  mc.master_seed = s.seed;
  mc.workers = s.workers;
  mc.confidence = s.confidence;
  mc.trace_dir = s.traces;
  mc.sims = s.sims;
  if (s.epsilon > 0.0 || s.delta > 0.0) {
    if (!(s.epsilon > 0.0 && s.delta > 0.0)) {
      throw ConfigError("--epsilon and --delta must be given together");
    }
    const auto n = chernoff_n(s.epsilon, s.delta);
    if (!reg.given(app, "sims")) mc.sims = n;
    if (mc.sims >= n) {
      mc.epsilon = s.epsilon;
      mc.delta = s.delta;
    }
  }
  const auto result = monte_carlo(model, props, sim_config(s), mc);
  auto meta = meta_of(s, "verify", in);
  const auto report = mc_report_json(result, props, meta);
  if (!s.out.empty()) emit(s.out, report + "\n", out);
  if (s.format == "json") {
    out << report << "\n";
  } else {
    out << std::left << std::setw(6) << "class" << std::setw(44) << "property" << std::setw(10)
        << "estimate" << std::setw(12) << "violations" << "ci\n";
    for (const auto& e : result.estimates) {
      out << std::setw(6) << e.cls << std::setw(44) << e.property << std::setw(10)
          << fmt(e.estimate) << std::setw(12) << (e.total - e.satisfied);
      if (e.ci) out << "[" << fmt(e.ci->low) << ", " << fmt(e.ci->high) << "]";
      out << "\n";
    }
    out << result.replicas.size() << " replicas, " << result.total_events << " events, "
        << fmt(result.wall_ms, 1) << " ms\n";
  }
  return any_violation(result) ? violation : ok;
}

int cmd_chernoff(const Settings& s, std::ostream& out) {
  if (!(s.epsilon > 0.0) || !(s.delta > 0.0)) throw ConfigError("--epsilon and --delta are required");
  const auto n = chernoff_n(s.epsilon, s.delta);
  if (s.format == "json") {
    out << json{{"epsilon", s.epsilon}, {"delta", s.delta}, {"n", n}}.dump() << "\n";
  } else {
    out << n << "\n";
  }
  return ok;
}

int cmd_isplit(const Settings& s, std::ostream& out) {
  auto in = load(s, true, true);
  const auto spec = mutation_of(s);
  const auto data = spec ? apply_mutation(in.data, *spec) : in.data;
  const auto model = link(data, in.graph, in.decls,
                          spec || s.lenient ? LinkMode::tolerant : LinkMode::strict);
  const auto levels = collision_levels(model);
  SplitConfig sc;
  sc.experiments = s.experiments;
  sc.sims_per_level = s.sims_per_level;
  sc.master_seed = s.seed;
  sc.workers = s.workers;
  sc.confidence = s.confidence;
  const auto result = importance_split(model, levels, sim_config(s), sc);
  const auto report = split_report_json(result, levels, meta_of(s, "isplit", in), s.sims_per_level);
  if (!s.out.empty()) emit(s.out, report + "\n", out);
  if (s.format == "json") {
    out << report << "\n";
  } else {
    for (std::size_t e = 0; e < result.experiments.size(); ++e) {
      const auto& x = result.experiments[e];
      out << "experiment " << e << ":";
      for (auto p : x.level_estimates) out << " " << fmt(p, 2);
      out << " -> " << fmt(x.estimate) << " (" << x.events << " events)\n";
    }
    out << "mean " << fmt(result.mean) << " sd " << fmt(result.stddev) << " ci ["
        << fmt(result.ci.low) << ", " << fmt(result.ci.high) << "] at " << result.ci.confidence
        << ", " << result.total_events << " events, " << fmt(result.wall_ms, 1) << " ms\n";
  }
  return result.mean > 0.0 ? violation : ok;
}

int cmd_mutate(const Settings& s, std::ostream& out) {
  auto in = load(s, false, false);
  const auto spec = mutation_of(s);
  if (spec) {
    emit(s.out, print_appdata(apply_mutation(in.data, *spec)), out);
    return ok;
  }
  // Without a target: list every applicable instance.
  json j = json::array();
  std::ostringstream t;
  const auto types = parse_mutation_types(s.type.empty() ? s.types : s.type);
  for (auto type : types) {
    for (const auto& m : enumerate_mutations(in.data, type)) {
      j.push_back({{"type", std::string(to_string(m.type))},
                   {"target", to_string(m.target)},
                   {"description", describe(m, in.data)}});
      t << describe(m, in.data) << "\n";
    }
  }
  emit(s.out, s.format == "json" ? j.dump(2) + "\n" : t.str(), out);
  return ok;
}

int cmd_campaign(const Settings& s, std::ostream& out, std::ostream& err) {
  auto in = load(s, true, true);
  const auto clean = link(in.data, in.graph, in.decls,
                          s.lenient ? LinkMode::tolerant : LinkMode::strict);
  std::vector<Property> props;
  if (!s.props.empty()) {
    const auto text = read_file(s.props);
    add_file(in, "props", s.props, text);
    props = parse_property_file(text);
  } else {
    props = gen_properties(clean, s.bound, s.gf_window);
  }
  const auto sim = sim_config(s);
  McConfig mc;
  mc.sims = s.sims;
  mc.master_seed = s.seed;
  mc.workers = s.workers;
  mc.confidence = s.confidence;

  json mutants = json::array();
  std::map<MutationType, std::map<int, double>> matrix;
  std::map<MutationType, double> wall;
  std::map<MutationType, std::size_t> count;
  bool any = false;
  for (auto type : parse_mutation_types(s.types)) {
    matrix[type];
    for (const auto& spec : enumerate_mutations(in.data, type)) {
      json m{{"type", std::string(to_string(type))},
             {"target", to_string(spec.target)},
             {"description", describe(spec, in.data)}};
      const auto start = std::chrono::steady_clock::now();
      try {
        const auto model =
            link(apply_mutation(in.data, spec), in.graph, in.decls, LinkMode::tolerant);
        std::vector<std::string> skipped;
        const auto usable = bindable(props, model, &skipped);
        const auto r = monte_carlo(model, usable, sim, mc);
        const auto per_class = class_violation(r, usable);
        for (const auto& [k, p] : per_class) {
          m["classes"][std::to_string(k)] = p;
          matrix[type][k] = std::max(matrix[type][k], p);
          any |= p > 0.0;
        }
        m["events"] = r.total_events;
        if (!skipped.empty()) m["skipped_properties"] = skipped;
        ++count[type];
      } catch (const Error& e) {
        m["error"] = e.what();
        err << "campaign: " << describe(spec, in.data) << ": " << e.what() << "\n";
      }
      const double ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
      m["wall_time_ms"] = ms;
      wall[type] += ms;
      mutants.push_back(std::move(m));
    }
  }

  json j;
  j["tool"] = {{"name", "interlock-smc"}, {"version", std::string(version())}};
  j["command"] = "campaign";
  j["seed"] = s.seed;
  j["inputs"] = json::array();
  for (const auto& f : in.files) j["inputs"].push_back({{"role", f.role}, {"path", f.path}, {"sha256", f.sha256}});
  j["config"] = {{"sims", s.sims}, {"bound", s.bound}, {"gf_window", s.gf_window},
                 {"beta_a", s.beta_a}, {"beta_r", s.beta_r}, {"beta_m", s.beta_m}};
  j["matrix"] = json::object();
  for (const auto& [type, row] : matrix) {
    json r;
    for (const auto& [k, p] : row) r[std::to_string(k)] = p;
    r["mutants"] = count[type];
    r["wall_time_ms"] = wall[type];
    j["matrix"][std::string(to_string(type))] = r;
  }
  j["mutants"] = mutants;
  if (!s.out.empty()) emit(s.out, j.dump(2) + "\n", out);

  if (s.format == "json") {
    out << j.dump(2) << "\n";
  } else {
    out << "type  (1)     (2)     (3)     (4)     (5)     mutants  time(s)\n";
    for (const auto& [type, row] : matrix) {
      out << std::left << std::setw(6) << (std::string(to_string(type)) + ".");
      for (int k = 1; k <= 5; ++k) {
        const auto it = row.find(k);
        out << std::setw(8) << fmt(100.0 * (it == row.end() ? 0.0 : it->second), 1);
      }
      out << std::setw(9) << count[type] << fmt(wall[type] / 1000.0, 1) << "\n";
    }
    out << "cells: highest percentage of replicas violating a property of the class, over the type's mutants\n";
  }
  return any ? violation : ok;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Settings s;
  Registry reg;
  CLI::App app{"Statistical model checker for interlocking application data", "interlock-smc"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(version()));

  auto files = [&](CLI::App* c, bool layout, bool routes) {
    c->add_option("--appdata", s.appdata, "SSI application data file");
    if (layout) {
      c->add_option("--layout", s.layout, "railML station layout file");
      c->add_flag("--lenient", s.lenient,
                  "warn about unknown layout elements; fall back to any leg when linking");
    }
    if (routes) c->add_option("--routes", s.routes, "route declarations (entry signal, exit node)");
  };
  auto common = [&](CLI::App* c) {
    c->add_option("--format", s.format, "stdout format")->check(CLI::IsMember({"json", "table"}));
    c->add_option("--config", s.config, "JSON file with option defaults");
  };
  auto simulation = [&](CLI::App* c) {
    reg.add(c, "--seed", s.seed, "master seed");
    reg.add(c, "--bound", s.bound, "BLTL bound in trains");
    reg.add(c, "--beta-a", s.beta_a, "train arrival spread");
    reg.add(c, "--beta-r", s.beta_r, "route request spread");
    reg.add(c, "--beta-m", s.beta_m, "movement spread");
    reg.add(c, "--stall-time", s.stall_time, "idle simulated time that ends a run (0: automatic)");
    reg.add(c, "--workers", s.workers, "worker threads (default $INTERLOCK_SMC_WORKERS or 1)")
        ->check(CLI::PositiveNumber);
    reg.add(c, "--confidence", s.confidence, "confidence of normal intervals");
  };
  auto mutation = [&](CLI::App* c) {
    c->add_option("--type", s.type, "mutation type a-f");
    c->add_option("--target", s.target, "mutation target <rule>:<index>");
    c->add_option("--payload", s.payload, "condition added by type f, e.g. 'U_CGC_20C f'");
  };

  auto* parse = app.add_subcommand("parse", "parse application data and/or layout");
  files(parse, true, true);
  common(parse);

  auto* validate = app.add_subcommand("validate", "cross-check data, layout and routes");
  files(validate, true, true);
  common(validate);

  auto* genprops = app.add_subcommand("genprops", "generate the requirement suite");
  files(genprops, true, true);
  common(genprops);
  reg.add(genprops, "--bound", s.bound, "BLTL bound in trains");
  reg.add(genprops, "--gf-window", s.gf_window, "GF window in trains");
  genprops->add_option("--out", s.out, "output file (default stdout)");

  auto* verify = app.add_subcommand("verify", "Monte Carlo estimation of every property");
  files(verify, true, true);
  common(verify);
  simulation(verify);
  mutation(verify);
  verify->add_option("--props", s.props, "property file (default: generated suite)");
  reg.add(verify, "--sims", s.sims, "number of replicas")->check(CLI::PositiveNumber);
  reg.add(verify, "--gf-window", s.gf_window, "GF window of generated properties");
  reg.add(verify, "--epsilon", s.epsilon, "Chernoff precision");
  reg.add(verify, "--delta", s.delta, "Chernoff confidence risk");
  verify->add_option("--traces", s.traces, "directory for JSON Lines traces");
  verify->add_option("--out", s.out, "JSON report file");

  auto* chernoff = app.add_subcommand("chernoff", "replicas needed for precision and risk");
  common(chernoff);
  reg.add(chernoff, "--epsilon", s.epsilon, "precision");
  reg.add(chernoff, "--delta", s.delta, "confidence risk");

  auto* isplit = app.add_subcommand("isplit", "importance splitting on the collision levels");
  files(isplit, true, true);
  common(isplit);
  simulation(isplit);
  mutation(isplit);
  reg.add(isplit, "--experiments", s.experiments, "independent experiments");
  reg.add(isplit, "--sims-per-level", s.sims_per_level, "simulations per level");
  isplit->add_option("--out", s.out, "JSON report file");

  auto* mutate = app.add_subcommand("mutate", "apply one mutation or list the applicable ones");
  files(mutate, false, false);
  common(mutate);
  mutation(mutate);
  mutate->add_option("--types", s.types, "types to list when no target is given");
  mutate->add_option("--out", s.out, "output file (default stdout)");

  auto* campaign = app.add_subcommand("campaign", "detection matrix over every mutant");
  files(campaign, true, true);
  common(campaign);
  simulation(campaign);
  campaign->add_option("--props", s.props, "property file (default: generated suite)");
  reg.add(campaign, "--sims", s.sims, "replicas per mutant")->check(CLI::PositiveNumber);
  reg.add(campaign, "--gf-window", s.gf_window, "GF window of generated properties");
  campaign->add_option("--types", s.types, "comma-separated mutation types");
  campaign->add_option("--out", s.out, "JSON report file");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return ok;
  } catch (const CLI::CallForVersion&) {
    out << version() << "\n";
    return ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return tool_error;
  }

  CLI::App* cmd = app.get_subcommands().front();
  try {
    std::set<std::string> from_config;
    if (!s.config.empty()) {
      json cfg;
      try {
        cfg = json::parse(read_file(s.config));
      } catch (const json::parse_error& e) {
        throw ConfigError("config file '" + s.config + "' is not valid JSON: " + e.what());
      }
      from_config = reg.apply(cmd, cfg);
    }
    if (!reg.given(cmd, "workers") && !from_config.count("workers")) {
      if (const char* env = std::getenv("INTERLOCK_SMC_WORKERS")) {
        try {
          const auto n = std::stoul(env);
          if (n >= 1) s.workers = static_cast<unsigned>(n);
        } catch (const std::exception&) {
          throw ConfigError("INTERLOCK_SMC_WORKERS must be a positive integer");
        }
      }
    }
    if (s.workers < 1) throw ConfigError("--workers must be at least 1");

    if (cmd == parse) return cmd_parse(s, out);
    if (cmd == validate) return cmd_validate(s, out);
    if (cmd == genprops) return cmd_genprops(s, out);
    if (cmd == verify) return cmd_verify(s, reg, verify, out);
    if (cmd == chernoff) return cmd_chernoff(s, out);
    if (cmd == isplit) return cmd_isplit(s, out);
    if (cmd == mutate) return cmd_mutate(s, out);
    if (cmd == campaign) return cmd_campaign(s, out, err);
  } catch (const SyntaxError& e) {
    err << json{{"error", "SyntaxError"}, {"message", e.what()}, {"line", e.line()},
                {"column", e.column()}}.dump()
        << "\n";
    return tool_error;
  } catch (const SimulationError& e) {
    err << json{{"error", "SimulationError"}, {"message", e.what()}, {"seed", e.seed()}}.dump()
        << "\n";
    return tool_error;
  } catch (const Error& e) {
    err << json{{"error", error_kind(e)}, {"message", e.what()}}.dump() << "\n";
    return tool_error;
  } catch (const std::exception& e) {
    err << json{{"error", "InternalError"}, {"message", e.what()}}.dump() << "\n";
    return tool_error;
  }
  return tool_error;
}

}  // namespace interlock::cli
