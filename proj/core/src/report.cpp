#include "interlock/report.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include "interlock/error.hpp"

#ifndef INTERLOCK_VERSION
#define INTERLOCK_VERSION "0.0.0"
#endif

namespace interlock {

using nlohmann::json;

std::string_view version() { return INTERLOCK_VERSION; }

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 computation failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(length * 2);
  for (unsigned int i = 0; i < length; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

namespace {

json interval_json(const std::optional<Interval>& ci) {
  if (!ci) return nullptr;
  return {{"low", ci->low}, {"high", ci->high}, {"confidence", ci->confidence}};
}

json meta_json(const ReportMeta& meta) {
  json inputs = json::array();
  for (const auto& in : meta.inputs) {
    inputs.push_back({{"role", in.role}, {"path", in.path}, {"sha256", in.sha256}});
  }
  return {
      {"tool", {{"name", "interlock-smc"}, {"version", std::string(version())}}},
      {"command", meta.command},
      {"seed", meta.master_seed},
      {"inputs", inputs},
      {"config",
       {{"beta_a", meta.sim.beta_a},
        {"beta_r", meta.sim.beta_r},
        {"beta_m", meta.sim.beta_m},
        {"bound", meta.sim.bound_trains},
        {"gf_window", meta.gf_window},
        {"stall_time", meta.sim.effective_stall_time()}}},
  };
}

}  // namespace

bool any_violation(const McResult& result) {
  for (const auto& e : result.estimates) {
    if (e.satisfied < e.total) return true;
  }
  return false;
}

std::string mc_report_json(const McResult& result, const std::vector<Property>& properties,
                           const ReportMeta& meta, bool pretty) {
  json j = meta_json(meta);
  json props = json::array();
  std::uint64_t stalled = 0;
  std::uint64_t derailments = 0;
  std::uint32_t max_load = 0;
  for (const auto& r : result.replicas) {
    stalled += r.stalled ? 1 : 0;
    derailments += r.derailments;
    max_load = std::max(max_load, r.max_track_load);
  }
  for (std::size_t i = 0; i < result.estimates.size(); ++i) {
    const auto& e = result.estimates[i];
    json p = {
        {"name", e.property},
        {"class", e.cls},
        {"estimate", e.estimate},
        {"n", e.total},
        {"satisfied", e.satisfied},
        {"violations", e.total - e.satisfied},
        {"ci", interval_json(e.ci)},
        {"method", e.method},
        {"seeds-root", meta.master_seed},
        {"wall_time_ms", e.wall_ms},
    };
    if (i < properties.size()) p["formula"] = properties[i].text;
    props.push_back(std::move(p));
  }
  j["properties"] = std::move(props);
  j["summary"] = {
      {"replicas", result.replicas.size()},
      {"violation_observed", any_violation(result)},
      {"total_events", result.total_events},
      {"stalled_replicas", stalled},
      {"derailments", derailments},
      {"max_track_load", max_load},
      {"wall_time_ms", result.wall_ms},
  };
  return j.dump(pretty ? 2 : -1);
}

std::string split_report_json(const SplitResult& result, const LevelFunction& levels,
                              const ReportMeta& meta, std::uint64_t sims_per_level,
                              bool pretty) {
  json j = meta_json(meta);
  json exps = json::array();
  for (const auto& e : result.experiments) {
    exps.push_back({{"level_estimates", e.level_estimates},
                    {"levels_used", e.level_estimates.size()},
                    {"estimate", e.estimate},
                    {"events", e.events}});
  }
  j["levels"] = levels.names;
  j["level_function"] = levels.id;
  j["sims_per_level"] = sims_per_level;
  j["experiments"] = std::move(exps);
  j["estimate"] = result.mean;
  j["stddev"] = result.stddev;
  j["ci"] = interval_json(result.ci);
  j["method"] = "importance-splitting";
  j["seeds-root"] = meta.master_seed;
  j["total_events"] = result.total_events;
  j["wall_time_ms"] = result.wall_ms;
  return j.dump(pretty ? 2 : -1);
}

}  // namespace interlock
