#include "interlock/smc.hpp"

#include <algorithm>
#include <atomic>
#include <boost/math/distributions/normal.hpp>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <ostream>
#include <thread>

#include "interlock/error.hpp"

namespace interlock {

namespace {

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since)
      .count();
}

}  // namespace

std::uint64_t chernoff_n(double epsilon, double delta) {
  if (!(epsilon > 0 && epsilon < 1) || !(delta > 0 && delta < 1)) {
    throw DomainError("epsilon and delta must lie in (0, 1)");
  }
  const double n = std::log(2.0 / delta) / (2.0 * epsilon * epsilon);
  return static_cast<std::uint64_t>(std::ceil(n));
}

double normal_z(double confidence) {
  if (!(confidence > 0 && confidence < 1)) {
    throw DomainError("confidence must lie in (0, 1)");
  }
  return boost::math::quantile(boost::math::normal(), 1.0 - (1.0 - confidence) / 2.0);
}

Interval normal_interval(double p_hat, std::uint64_t n, double confidence) {
  const double half =
      n == 0 ? 1.0 : normal_z(confidence) * std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(n));
  return {std::max(0.0, p_hat - half), std::min(1.0, p_hat + half), confidence};
}

Interval additive_interval(double p_hat, double epsilon, double delta) {
  return {std::max(0.0, p_hat - epsilon), std::min(1.0, p_hat + epsilon), 1.0 - delta};
}

void parallel_for(std::uint64_t n, unsigned workers,
                  const std::function<void(std::uint64_t)>& body) {
  if (workers <= 1 || n <= 1) {
    for (std::uint64_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex mutex;
  std::uint64_t failed_index = n;
  std::exception_ptr error;
  auto work = [&] {
    for (;;) {
      if (failed.load()) return;
      const auto i = next.fetch_add(1);
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(mutex);
        if (i < failed_index) {
          failed_index = i;
          error = std::current_exception();
        }
        failed = true;
      }
    }
  };
  const auto count = static_cast<unsigned>(std::min<std::uint64_t>(workers, n));
  std::vector<std::thread> threads;
  threads.reserve(count);
  for (unsigned t = 0; t < count; ++t) threads.emplace_back(work);
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

std::vector<Estimate> monte_carlo(const Sampler& sample,
                                  const std::vector<std::string>& properties,
                                  const McConfig& config) {
  if (config.sims < 1) throw ConfigError("at least one simulation is required");
  const auto start = std::chrono::steady_clock::now();
  std::vector<std::vector<bool>> results(config.sims);
  parallel_for(config.sims, config.workers, [&](std::uint64_t i) {
    results[i] = sample(i, derive_seed(config.master_seed, i));
  });
  const double wall = elapsed_ms(start);
  std::vector<Estimate> out;
  for (std::size_t p = 0; p < properties.size(); ++p) {
    Estimate e;
    e.property = properties[p];
    e.total = config.sims;
    for (const auto& r : results) {
      if (p < r.size() && r[p]) ++e.satisfied;
    }
    e.estimate = static_cast<double>(e.satisfied) / static_cast<double>(e.total);
    if (config.epsilon) {
      e.ci = additive_interval(e.estimate, *config.epsilon,
                               config.delta.value_or(1.0 - config.confidence));
      e.method = "monte-carlo/chernoff";
    } else {
      e.ci = normal_interval(e.estimate, e.total, config.confidence);
      e.method = "monte-carlo/normal";
    }
    e.wall_ms = wall;
    out.push_back(std::move(e));
  }
  return out;
}

ReplicaSummary run_replica(const InterlockingModel& model,
                           const std::vector<std::shared_ptr<const Formula>>& formulas,
                           const SimConfig& config, std::ostream* trace) {
  ReplicaSummary out;
  out.seed = config.seed;
  try {
    SimState state = init_sim(model, config);
    MonitorSet monitors(formulas);
    auto emit = [&](StateRecord&& rec) {
      if (trace != nullptr) *trace << record_json(rec, model) << '\n';
      for (auto load : rec.tracks) out.max_track_load = std::max<std::uint32_t>(out.max_track_load, load);
      ++out.records;
      monitors.observe(std::move(rec));
    };
    emit(make_record(state));
    for (;;) {
      if (formulas.empty() ? state.nb > config.bound_trains : monitors.all_final()) break;
      if (state.stalled()) {
        monitors.close_stalled();
        out.stalled = true;
        break;
      }
      emit(step(state, model));
    }
    out.events = state.events;
    out.final_nb = state.nb;
    out.derailments = state.derailments;
    for (const auto& m : monitors.monitors()) out.outcomes.push_back(m.outcome());
  } catch (const SimulationError&) {
    throw;
  } catch (const std::exception& e) {
    throw SimulationError(e.what(), config.seed);
  }
  return out;
}

McResult monte_carlo(const InterlockingModel& model, const std::vector<Property>& properties,
                     const SimConfig& sim, const McConfig& config) {
  if (config.sims < 1) throw ConfigError("at least one simulation is required");
  sim.validate();
  const auto start = std::chrono::steady_clock::now();
  const auto schema = schema_of(model);
  std::vector<std::shared_ptr<const Formula>> formulas;
  std::vector<std::string> names;
  for (const auto& p : properties) {
    formulas.push_back(std::make_shared<const Formula>(bind(p.formula, schema)));
    names.push_back(p.name);
  }
  if (!config.trace_dir.empty()) std::filesystem::create_directories(config.trace_dir);

  McResult result;
  result.replicas.resize(config.sims);
  const Sampler sampler = [&](std::uint64_t i, std::uint64_t seed) {
    SimConfig cfg = sim;
    cfg.seed = seed;
    ReplicaSummary summary;
    if (config.trace_dir.empty()) {
      summary = run_replica(model, formulas, cfg);
    } else {
      const auto path = std::filesystem::path(config.trace_dir) /
                        ("replica-" + std::to_string(i) + ".jsonl");
      std::ofstream out(path, std::ios::binary);
      if (!out) throw ConfigError("cannot write trace file " + path.string());
      summary = run_replica(model, formulas, cfg, &out);
    }
    summary.index = i;
    std::vector<bool> sat;
    for (const auto& o : summary.outcomes) sat.push_back(o.verdict == Verdict::holds);
    result.replicas[i] = std::move(summary);
    return sat;
  };
  result.estimates = monte_carlo(sampler, names, config);
  for (std::size_t p = 0; p < properties.size(); ++p) result.estimates[p].cls = properties[p].cls;
  for (const auto& r : result.replicas) result.total_events += r.events;
  result.wall_ms = elapsed_ms(start);
  return result;
}

int LevelFunction::level(const SimState& state) const {
  for (auto k = predicates.size(); k > 0; --k) {
    if (predicates[k - 1](state)) return static_cast<int>(k);
  }
  return 0;
}

LevelFunction collision_levels(const InterlockingModel& model) {
  const InterlockingModel* m = &model;
  const auto routes = model.routes.size();
  auto conflict = std::make_shared<std::vector<bool>>(routes * routes, false);
  for (const auto& [a, b] : model.conflict_index) {
    (*conflict)[a * routes + b] = true;
    (*conflict)[b * routes + a] = true;
  }
  LevelFunction f;
  f.id = "collision";
  f.names = {"conflicting routes set", "trains one track apart", "collision"};
  f.predicates.emplace_back([m](const SimState& s) {
    return std::any_of(m->conflict_index.begin(), m->conflict_index.end(),
                       [&](const auto& pair) { return s.routes[pair.first] && s.routes[pair.second]; });
  });
  f.predicates.emplace_back([m, conflict, routes](const SimState& s) {
    for (std::size_t i = 0; i < s.trains.size(); ++i) {
      const auto& x = s.trains[i];
      if (x.edge < 0) continue;
      const auto nx = m->route_info[static_cast<std::size_t>(x.route)]
                          .next_track[static_cast<std::size_t>(x.edge)];
      if (nx < 0 || s.tracks[static_cast<std::size_t>(nx)] != 0) continue;
      for (std::size_t j = i + 1; j < s.trains.size(); ++j) {
        const auto& y = s.trains[j];
        if (y.edge < 0) continue;
        if (!(*conflict)[static_cast<std::size_t>(x.route) * routes +
                         static_cast<std::size_t>(y.route)]) {
          continue;
        }
        const auto ny = m->route_info[static_cast<std::size_t>(y.route)]
                            .next_track[static_cast<std::size_t>(y.edge)];
        if (ny == nx) return true;
      }
    }
    return false;
  });
  f.predicates.emplace_back([](const SimState& s) {
    return std::any_of(s.tracks.begin(), s.tracks.end(), [](auto n) { return n >= 2; });
  });
  return f;
}

void summarize(SplitResult& result, double confidence) {
  const auto n = result.experiments.size();
  if (n == 0) return;
  double sum = 0;
  for (const auto& e : result.experiments) sum += e.estimate;
  result.mean = sum / static_cast<double>(n);
  double sq = 0;
  for (const auto& e : result.experiments) sq += (e.estimate - result.mean) * (e.estimate - result.mean);
  result.stddev = n > 1 ? std::sqrt(sq / static_cast<double>(n - 1)) : 0.0;
  const double half = normal_z(confidence) * result.stddev / std::sqrt(static_cast<double>(n));
  result.ci = {std::max(0.0, result.mean - half), std::min(1.0, result.mean + half), confidence};
}

SplitResult importance_split(const InterlockingModel& model, const LevelFunction& levels,
                             const SimConfig& sim, const SplitConfig& config) {
  if (levels.size() == 0) throw ConfigError("level function has no levels");
  if (config.sims_per_level < 2) throw ConfigError("at least two simulations per level");
  if (config.experiments < 1) throw ConfigError("at least one experiment");
  sim.validate();
  const auto start = std::chrono::steady_clock::now();
  SplitResult result;
  const auto per_level = config.sims_per_level;

  for (std::uint64_t e = 0; e < config.experiments; ++e) {
    const auto root = derive_seed(config.master_seed, e);
    SimConfig cfg = sim;
    cfg.seed = root;
    std::vector<Snapshot> pool{snapshot(init_sim(model, cfg))};
    SplitExperiment exp;
    exp.estimate = 1.0;
    for (std::size_t k = 1; k <= levels.size(); ++k) {
      std::vector<std::optional<Snapshot>> reached(per_level);
      std::vector<std::uint64_t> events(per_level, 0);
      parallel_for(per_level, config.workers, [&](std::uint64_t j) {
        const auto seed = derive_seed(root, k * per_level + j);
        const auto pick = derive_seed(seed, 0) % pool.size();
        SimState s = restore(pool[pick], seed);
        const auto before = s.events;
        try {
          for (;;) {
            if (s.nb > sim.bound_trains) break;
            if (levels.level(s) >= static_cast<int>(k)) {
              reached[j] = snapshot(s);
              break;
            }
            if (s.stalled()) break;
            step(s, model);
          }
        } catch (const SimulationError&) {
          throw;
        } catch (const std::exception& ex) {
          throw SimulationError(ex.what(), seed);
        }
        events[j] = s.events - before;
      });
      std::vector<Snapshot> next;
      for (auto& r : reached) {
        if (r) next.push_back(std::move(*r));
      }
      for (auto n : events) exp.events += n;
      const double p = static_cast<double>(next.size()) / static_cast<double>(per_level);
      exp.level_estimates.push_back(p);
      exp.estimate *= p;
      if (next.empty()) break;
      pool = std::move(next);
    }
    result.total_events += exp.events;
    result.experiments.push_back(std::move(exp));
  }
  summarize(result, config.confidence);
  result.wall_ms = elapsed_ms(start);
  return result;
}

}  // namespace interlock
