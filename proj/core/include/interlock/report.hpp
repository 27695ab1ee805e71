#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "interlock/bltl.hpp"
#include "interlock/sim.hpp"
#include "interlock/smc.hpp"

namespace interlock {

std::string_view version();

/// Lower-case hex SHA-256 digest.
std::string sha256_hex(std::string_view data);

struct InputFile {
  std::string role;
  std::string path;
  std::string sha256;
};

/// Everything a report embeds besides the estimates, for replay.
struct ReportMeta {
  std::string command;
  std::uint64_t master_seed = 0;
  std::vector<InputFile> inputs;
  SimConfig sim;
  std::uint64_t gf_window = 0;
};

/// JSON report of a Monte Carlo run; `pretty` indents by two spaces.
std::string mc_report_json(const McResult& result, const std::vector<Property>& properties,
                           const ReportMeta& meta, bool pretty = true);

std::string split_report_json(const SplitResult& result, const LevelFunction& levels,
                              const ReportMeta& meta, std::uint64_t sims_per_level,
                              bool pretty = true);

/// True when any replica violated any property.
bool any_violation(const McResult& result);

}  // namespace interlock
