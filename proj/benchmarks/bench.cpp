#include <benchmark/benchmark.h>

#include <fstream>
#include <random>
#include <sstream>

#include "interlock/appdata.hpp"
#include "interlock/bltl.hpp"
#include "interlock/layout.hpp"
#include "interlock/model.hpp"
#include "interlock/propgen.hpp"
#include "interlock/sim.hpp"
#include "interlock/smc.hpp"

using namespace interlock;

namespace {

std::string slurp(const std::string& name) {
  std::ifstream in(std::string(INTERLOCK_DATA_DIR) + "/" + name);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

const InterlockingModel& station() {
  static const InterlockingModel m =
      link(parse_appdata(slurp("fixture/station.ssi")), parse_layout(slurp("fixture/station.xml")),
           parse_route_decls(slurp("fixture/station.routes")));
  return m;
}

void BM_SimStep(benchmark::State& st) {
  const auto& m = station();
  SimConfig cfg;
  cfg.seed = 1;
  auto s = init_sim(m, cfg);
  for (auto _ : st) {
    if (s.nb > 1440) s = init_sim(m, cfg);
    benchmark::DoNotOptimize(step(s, m));
  }
}
BENCHMARK(BM_SimStep);

void BM_MonitorSuite(benchmark::State& st) {
  const auto& m = station();
  const auto schema = schema_of(m);
  std::vector<std::shared_ptr<const Formula>> fs;
  for (const auto& p : gen_properties(m, 1u << 30, 240)) {
    fs.push_back(std::make_shared<const Formula>(bind(p.formula, schema)));
  }
  SimConfig cfg;
  cfg.seed = 2;
  auto s = init_sim(m, cfg);
  std::vector<StateRecord> trace;
  for (int i = 0; i < 4096; ++i) trace.push_back(step(s, m));
  for (auto _ : st) {
    MonitorSet set(fs);
    for (const auto& r : trace) set.observe(StateRecord(r));
    benchmark::DoNotOptimize(set.monitors().data());
  }
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(trace.size()));
}
BENCHMARK(BM_MonitorSuite)->Unit(benchmark::kMillisecond);

void BM_Replica(benchmark::State& st) {
  const auto& m = station();
  const auto schema = schema_of(m);
  std::vector<std::shared_ptr<const Formula>> fs;
  for (const auto& p : gen_properties(m, static_cast<std::uint64_t>(st.range(0)), 240)) {
    fs.push_back(std::make_shared<const Formula>(bind(p.formula, schema)));
  }
  std::uint64_t seed = 0;
  for (auto _ : st) {
    SimConfig cfg;
    cfg.bound_trains = static_cast<std::uint64_t>(st.range(0));
    cfg.seed = seed++;
    benchmark::DoNotOptimize(run_replica(m, fs, cfg));
  }
}
BENCHMARK(BM_Replica)->Arg(144)->Arg(1440)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
