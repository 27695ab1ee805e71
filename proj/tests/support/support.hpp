#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "interlock/appdata.hpp"
#include "interlock/bltl.hpp"
#include "interlock/layout.hpp"
#include "interlock/model.hpp"
#include "interlock/mutate.hpp"
#include "interlock/sim.hpp"

namespace interlock::testing {

std::string data_path(const std::string& relative);
std::string slurp(const std::string& path);

struct Fixture {
  ApplicationData data;
  StationGraph graph;
  RouteDecls decls;
  InterlockingModel model;
};

/// The bundled station, parsed and linked once per process.
const Fixture& fixture();

/// Fixture with one mutation applied, linked tolerantly.
InterlockingModel mutant(const MutationSpec& spec);
InterlockingModel mutant(std::string_view type, std::string_view target);

/// Small vocabulary for synthetic traces: two of each kind, one zone.
RecordSchema tiny_schema();

/// Random formula text over `schema` with boolean nesting depth <= max_depth
/// and bounds small enough for short traces.
std::string random_formula(std::mt19937_64& rng, const RecordSchema& schema, int max_depth);

/// Random trace whose nb starts at 0 and grows by 0, 1 or 2 per record.
std::vector<StateRecord> random_trace(std::mt19937_64& rng, const RecordSchema& schema,
                                      std::size_t length);

/// Feeds `trace` to a Monitor and compares with evaluate_trace, both for an
/// open trace and for one closed by stalling. On disagreement `why` (when
/// non-null) receives a description.
bool oracle_agrees(const Formula& bound_formula, const std::vector<StateRecord>& trace,
                   std::string* why = nullptr);

}  // namespace interlock::testing
