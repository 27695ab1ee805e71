#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "interlock/bltl.hpp"
#include "interlock/model.hpp"
#include "interlock/sim.hpp"

namespace interlock {

/// Smallest N with N >= ln(2/delta) / (2 epsilon^2). Throws DomainError.
std::uint64_t chernoff_n(double epsilon, double delta);

/// Two-sided standard normal quantile for `confidence` (0.95 -> 1.96).
double normal_z(double confidence);

struct Interval {
  double low = 0.0;
  double high = 0.0;
  double confidence = 0.0;

  bool operator==(const Interval&) const = default;
};

/// p_hat -/+ z * sqrt(p_hat (1 - p_hat) / n), clipped to [0, 1].
Interval normal_interval(double p_hat, std::uint64_t n, double confidence);
/// p_hat -/+ epsilon, clipped to [0, 1]; confidence is 1 - delta.
Interval additive_interval(double p_hat, double epsilon, double delta);

struct Estimate {
  std::string property;
  int cls = 0;
  std::uint64_t satisfied = 0;
  std::uint64_t total = 0;
  double estimate = 0.0;
  std::optional<Interval> ci;
  std::string method;
  double wall_ms = 0.0;
};

struct McConfig {
  std::uint64_t sims = 100;
  std::uint64_t master_seed = 0;
  unsigned workers = 1;
  double confidence = 0.95;
  /// Set when `sims` was sized with chernoff_n; selects the additive interval.
  std::optional<double> epsilon;
  std::optional<double> delta;
  /// When non-empty, every replica writes `<dir>/replica-<index>.jsonl`.
  std::string trace_dir;
};

/// Runs `body(i)` for i in [0, n) on up to `workers` threads. The first
/// exception (by index) is rethrown after all workers stop.
void parallel_for(std::uint64_t n, unsigned workers,
                  const std::function<void(std::uint64_t)>& body);

/// Generic estimator: `sample(index, seed)` returns per-property
/// satisfaction for one replica.
using Sampler = std::function<std::vector<bool>(std::uint64_t index, std::uint64_t seed)>;

std::vector<Estimate> monte_carlo(const Sampler& sample,
                                  const std::vector<std::string>& properties,
                                  const McConfig& config);

struct ReplicaSummary {
  std::uint64_t index = 0;
  std::uint64_t seed = 0;
  std::vector<Outcome> outcomes;
  std::uint64_t events = 0;
  std::uint64_t records = 0;
  std::uint64_t final_nb = 0;
  bool stalled = false;
  std::uint64_t derailments = 0;
  std::uint32_t max_track_load = 0;
};

/// One simulation monitored until every formula is decided, the run stalls
/// or nb passes the bound with nothing left to decide. When `trace` is
/// non-null every record is written to it as JSON Lines.
ReplicaSummary run_replica(const InterlockingModel& model,
                           const std::vector<std::shared_ptr<const Formula>>& formulas,
                           const SimConfig& config, std::ostream* trace = nullptr);

struct McResult {
  std::vector<Estimate> estimates;
  std::vector<ReplicaSummary> replicas;
  std::uint64_t total_events = 0;
  double wall_ms = 0.0;
};

/// Estimates the satisfaction probability of every property over
/// `config.sims` replicas seeded with derive_seed(master_seed, i).
/// Replica failures surface as SimulationError carrying the replica seed.
McResult monte_carlo(const InterlockingModel& model, const std::vector<Property>& properties,
                     const SimConfig& sim, const McConfig& config);

/// Ordered level predicates; the last one is the target event.
struct LevelFunction {
  std::string id;
  std::vector<std::string> names;
  std::vector<std::function<bool(const SimState&)>> predicates;

  /// Highest k (1-based) whose predicate holds, 0 when none does.
  int level(const SimState& state) const;
  std::size_t size() const { return predicates.size(); }
};

/// Level 1: two conflicting routes set together. Level 2: two trains on
/// conflicting routes whose next track along their paths is the same clear
/// track. Level 3: a track holding two or more trains. The model must
/// outlive the returned function.
LevelFunction collision_levels(const InterlockingModel& model);

struct SplitConfig {
  std::uint64_t experiments = 10;
  std::uint64_t sims_per_level = 100;
  std::uint64_t master_seed = 0;
  unsigned workers = 1;
  double confidence = 0.999;
};

struct SplitExperiment {
  std::vector<double> level_estimates;
  double estimate = 0.0;
  std::uint64_t events = 0;
};

struct SplitResult {
  std::vector<SplitExperiment> experiments;
  double mean = 0.0;
  double stddev = 0.0;
  Interval ci;
  std::uint64_t total_events = 0;
  double wall_ms = 0.0;
};

/// Fixed-level importance splitting. Each stage starts its simulations from
/// states resampled (with replacement) among those that first reached the
/// previous level, and runs each until it reaches the next level, passes
/// the bound or stalls. Throws ConfigError for empty levels or fewer than
/// two simulations per level.
SplitResult importance_split(const InterlockingModel& model, const LevelFunction& levels,
                             const SimConfig& sim, const SplitConfig& config);

/// Summary statistics over experiment estimates: sample mean, sample
/// standard deviation and the normal interval mean -/+ z sd / sqrt(E).
void summarize(SplitResult& result, double confidence);

}  // namespace interlock
