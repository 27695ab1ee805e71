#pragma once

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "interlock/layout.hpp"
#include "interlock/model.hpp"

namespace interlock {

struct SimConfig {
  double beta_a = 60.0;
  double beta_r = 30.0;
  double beta_m = 20.0;
  std::uint64_t bound_trains = 1440;
  std::uint64_t seed = 0;
  /// Simulated time without any state change after which a run counts as
  /// stalled. Zero selects 50 * (beta_a + beta_r + beta_m).
  double stall_time = 0.0;
  /// Safety net against runaway replicas.
  std::uint64_t max_events = 50'000'000;

  void validate() const;  // throws ConfigError
  double effective_stall_time() const;

  bool operator==(const SimConfig&) const = default;
};

/// 64-bit Mersenne Twister with a fixed, library-independent mapping to
/// uniform doubles so traces are identical across standard libraries.
class Rng {
 public:
  Rng() = default;
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform in (0, width].
  double delay(double width) { return width * (1.0 - uniform()); }
  /// Uniform integer in [0, n).
  std::uint32_t index(std::uint32_t n) {
    return static_cast<std::uint32_t>(uniform() * n);
  }

  bool operator==(const Rng&) const = default;

 private:
  std::mt19937_64 engine_{0};
};

/// splitmix64 of (master, i); used to derive per-replica seeds.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

enum class EventKind : std::uint8_t { init, arrival, route_request, movement };

std::string_view to_string(EventKind kind);

struct Event {
  double time = 0.0;
  std::uint64_t seq = 0;
  EventKind kind = EventKind::arrival;
  /// Entry index for requests, train id for movements.
  std::uint32_t subject = 0;

  bool operator==(const Event&) const = default;
};

enum class MoveOutcome : std::uint8_t { moved, derailed_position, exited };

std::string_view to_string(MoveOutcome outcome);

struct Train {
  std::uint32_t id = 0;
  Direction direction = Direction::up;
  std::uint32_t entry = 0;
  std::int32_t route = -1;
  /// Edge currently occupied; -1 while still waiting at the entry signal.
  std::int32_t edge = -1;
  std::uint32_t track = 0;
  /// Node the train moves towards on its edge (the entry node while waiting).
  std::uint32_t toward = 0;
  bool derailed = false;

  bool operator==(const Train&) const = default;
};

struct TrainPosition {
  std::uint32_t id = 0;
  std::uint32_t track = 0;
  Direction direction = Direction::up;

  bool operator==(const TrainPosition&) const = default;
};

/// Immutable view of one simulation state plus the event that produced it.
/// Components are stored positionally, following the model vocabularies.
struct StateRecord {
  std::uint64_t nb = 0;
  double now = 0.0;
  EventKind event = EventKind::init;
  /// Train id (arrival, movement) or route index (request).
  std::uint32_t subject = 0;
  /// Request: 1 granted, 0 rejected. Movement: a MoveOutcome.
  std::uint8_t detail = 0;
  std::vector<std::uint8_t> points;     // 0 normal, 1 reverse
  std::vector<std::uint8_t> routes;     // 0 unset, 1 set
  std::vector<std::uint8_t> subroutes;  // 0 free, 1 locked
  std::vector<std::uint8_t> uirs;       // 0 free, 1 locked
  std::vector<std::uint16_t> tracks;    // train count
  std::vector<TrainPosition> trains;    // on-track trains, by id

  bool operator==(const StateRecord&) const = default;
};

/// Full simulator state. Copyable; a copy is an independent replica.
struct SimState {
  SimConfig config;
  double now = 0.0;
  std::uint64_t nb = 0;
  std::vector<std::uint8_t> points;
  std::vector<std::uint8_t> routes;
  std::vector<std::uint8_t> subroutes;
  std::vector<std::uint8_t> uirs;
  std::vector<std::uint16_t> tracks;
  /// Trains holding a route (on track or about to depart), sorted by id.
  std::vector<Train> trains;
  /// Trains waiting at each entry signal, in arrival order.
  std::vector<std::deque<Train>> waiting;
  std::vector<std::uint8_t> request_pending;
  /// Granted train at each entry that has not moved yet; -1 if none.
  std::vector<std::int64_t> departing;
  /// Min-heap on (time, seq).
  std::vector<Event> queue;
  std::uint64_t next_seq = 0;
  std::uint32_t next_train = 0;
  double last_change = 0.0;
  std::uint64_t events = 0;
  std::uint64_t derailments = 0;
  Rng rng;

  bool operator==(const SimState&) const = default;

  const Train* find_train(std::uint32_t id) const;
  /// Earliest pending event; throws QueueEmpty.
  const Event& next_event() const;
  bool stalled() const { return now - last_change > config.effective_stall_time(); }
};

SimState init_sim(const InterlockingModel& model, const SimConfig& config);

/// Pops the earliest event, applies it, runs releases to a fixpoint and
/// schedules follow-up events. Throws QueueEmpty.
StateRecord step(SimState& state, const InterlockingModel& model);

/// Grants `route` if all its conditions hold, applying its actions
/// atomically. Throws UnknownRoute if the route has no request rule.
bool evaluate_route_request(SimState& state, const InterlockingModel& model,
                            std::string_view route);
bool evaluate_route_request(SimState& state, const InterlockingModel& model,
                            std::uint32_t route);

/// Frees every subroute and zone whose release conditions hold, to a fixpoint.
void apply_releases(SimState& state, const InterlockingModel& model);

/// Advances a train one edge following the current point positions.
/// Throws UnknownTrain.
MoveOutcome move_train(SimState& state, const InterlockingModel& model,
                       std::uint32_t train);

StateRecord make_record(const SimState& state);

/// SimState without its generator.
struct Snapshot {
  SimState state;
};

Snapshot snapshot(const SimState& state);
SimState restore(const Snapshot& snap, std::uint64_t seed);

/// Checks the state invariants; returns one message per violation.
std::vector<std::string> audit(const SimState& state, const InterlockingModel& model);

/// Short human-readable description of the record's event.
std::string describe_event(const StateRecord& record, const InterlockingModel& model);

/// One JSON Lines record with lexicographically sorted keys.
std::string record_json(const StateRecord& record, const InterlockingModel& model);

}  // namespace interlock
