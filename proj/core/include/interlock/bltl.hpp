#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "interlock/sim.hpp"

namespace interlock {

enum class ValueType : std::uint8_t { count, position, route_state, lock_state, boolean };

enum class Op : std::uint8_t {
  // terms
  constant,
  trains,
  point,
  route,
  sub,
  uir,
  next,
  // state formulas
  truth,
  compare,
  negate,
  conj,
  disj,
  implies,
};

enum class Cmp : std::uint8_t { eq, ne, lt, le, gt, ge };

struct FormulaNode {
  Op op = Op::truth;
  Cmp cmp = Cmp::eq;
  ValueType type = ValueType::boolean;
  std::int32_t a = -1;
  std::int32_t b = -1;
  /// Constants and truth values.
  std::int32_t value = 0;
  /// Component name for state functions.
  std::string name;
  /// Position of `name` in the record vectors; -1 until bound.
  std::int32_t slot = -1;
};

enum class Temporal : std::uint8_t { none, globally, globally_finally };

/// A bounded formula: an optional top-level G[n] or GF[n,k] over a state
/// formula. Nodes live in a flat arena; children precede their parents.
struct Formula {
  Temporal temporal = Temporal::none;
  std::uint64_t bound = 0;
  std::uint64_t window = 0;
  std::vector<FormulaNode> nodes;
  std::int32_t root = -1;
  bool uses_next = false;
};

/// Structural equality, ignoring arena layout and bound slots.
bool operator==(const Formula& x, const Formula& y);

/// Parses `G[n] expr`, `GF[n,k] expr` or a bare state expression.
/// Precedence from tightest: next(term), comparisons, !, &, |, =>.
/// Throws SyntaxError or UnknownOperator.
Formula parse_formula(std::string_view text);

/// Canonical text; parse_formula(print_formula(f)) == f.
std::string print_formula(const Formula& formula);

/// Component vocabularies a formula is resolved against.
struct RecordSchema {
  std::vector<std::string> points;
  std::vector<std::string> routes;
  std::vector<std::string> subroutes;
  std::vector<std::string> uirs;
  std::vector<std::string> tracks;
};

RecordSchema schema_of(const InterlockingModel& model);

/// Resolves component names to record slots. Throws UnknownTrack,
/// UnknownRoute or LinkError for names outside the schema.
Formula bind(Formula formula, const RecordSchema& schema);

/// Truth of the state formula at `cur`; `next` is the successor record and
/// must be non-null when the formula uses next(). The formula must be bound.
bool evaluate_state(const Formula& formula, const StateRecord& cur,
                    const StateRecord* next);

enum class Verdict : std::uint8_t { pending, holds, violated };

std::string_view to_string(Verdict verdict);

struct Outcome {
  Verdict verdict = Verdict::pending;
  /// Record index at which the verdict was reached. A run that ends by
  /// stalling is decided at index = trace length.
  std::size_t index = 0;

  bool operator==(const Outcome&) const = default;
};

/// Incremental three-valued evaluation of one bound formula.
///
/// Bounds are measured in nb. G[n] is violated at the first record with
/// nb <= n where the body is false and holds at the first record with
/// nb > n. A body using next() is judged for record i when record i+1
/// arrives; the last record inside the bound is vacuously fine.
/// GF[n,k] opens an obligation at each record with nb <= n where the body
/// is false; a later or the same record with the body true closes it, and
/// reaching a record with nb beyond the opening nb + k violates it.
class Monitor {
 public:
  explicit Monitor(std::shared_ptr<const Formula> formula);

  /// Feeds the next record, keeping a private copy of it when needed.
  Verdict step(const StateRecord& record);
  /// Feeds `cur` when the caller keeps the previous record itself.
  Verdict observe(const StateRecord* prev, const StateRecord& cur);
  /// Ends the trace at `last` under the assumption that the state never
  /// changes again (the simulation stalled).
  Verdict close_stalled(const StateRecord& last);

  Verdict verdict() const { return outcome_.verdict; }
  const Outcome& outcome() const { return outcome_; }
  const Formula& formula() const { return *formula_; }
  bool final() const { return outcome_.verdict != Verdict::pending; }

 private:
  void decide(Verdict v, std::size_t index);
  void value_at(std::size_t index, std::uint64_t nb, bool value);

  std::shared_ptr<const Formula> formula_;
  Outcome outcome_;
  std::size_t count_ = 0;
  bool open_ = false;
  std::uint64_t open_nb_ = 0;
  std::optional<StateRecord> held_;
};

/// Convenience wrapper for Monitor::step.
Verdict monitor_step(Monitor& monitor, const StateRecord& record);

enum class TraceEnd : std::uint8_t {
  /// More records could follow.
  open,
  /// The simulation stalled; the last state repeats forever.
  stalled,
};

/// Reference semantics over a whole trace, used as the oracle for Monitor.
/// Throws TraceTooShort when the verdict depends on records not present.
Outcome evaluate_trace(const Formula& formula, const std::vector<StateRecord>& trace,
                       TraceEnd end = TraceEnd::open);

/// Monitors sharing one previous-record buffer, fed once per step.
class MonitorSet {
 public:
  explicit MonitorSet(const std::vector<std::shared_ptr<const Formula>>& formulas);

  void observe(StateRecord&& record);
  void close_stalled();
  bool all_final() const { return remaining_ == 0; }
  const std::vector<Monitor>& monitors() const { return monitors_; }

 private:
  std::vector<Monitor> monitors_;
  std::optional<StateRecord> prev_;
  std::size_t remaining_ = 0;
};

struct Property {
  std::string name;
  /// Requirement class 1..5, 0 when unknown.
  int cls = 0;
  std::string text;
  Formula formula;
};

/// Parses a property file: one formula per line, `#` starts a comment.
/// A comment of the form `# (k) name` sets the class and the name.
std::vector<Property> parse_property_file(std::string_view text);

/// Writes properties in the form read by parse_property_file.
std::string print_property_file(const std::vector<Property>& properties);

}  // namespace interlock
