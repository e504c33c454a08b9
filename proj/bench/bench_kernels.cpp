// Serial reference vs OpenMP kernels. Arg 0 = serial, 1 = parallel.
#include <benchmark/benchmark.h>

#include "loewner/conditions.hpp"
#include "loewner/forward.hpp"
#include "loewner/gallery.hpp"
#include "loewner/trace.hpp"

using namespace loewner;

namespace {

Exec exec_of(const benchmark::State& st) { return st.range(0) ? Exec::parallel : Exec::serial; }

void BM_TracePerAnchor(benchmark::State& st) {
  const Driver d = make_example("logsqrt");
  const auto grid = uniform_grid(1.0, static_cast<int>(st.range(1)));
  TraceConfig tc;
  tc.exec = exec_of(st);
  tc.force = true;
  for (auto _ : st) benchmark::DoNotOptimize(trace_per_anchor(d, grid, tc));
}

void BM_TraceIncremental(benchmark::State& st) {
  const Driver d = make_example("sqrt");
  const auto grid = uniform_grid(1.0, static_cast<int>(st.range(1)));
  TraceConfig tc;
  tc.exec = exec_of(st);
  tc.force = true;
  for (auto _ : st) benchmark::DoNotOptimize(trace_incremental(d, grid, tc));
}

void BM_CheckC2(benchmark::State& st) {
  const Driver d = make_example("monotone_bvlr");
  for (auto _ : st) benchmark::DoNotOptimize(check_c2(d, {}, exec_of(st)));
}

void BM_Simpleness(benchmark::State& st) {
  const Driver d = make_example("random");
  const TracePath p = trace_per_anchor(d, uniform_grid(1.0, static_cast<int>(st.range(1))));
  for (auto _ : st) benchmark::DoNotOptimize(simpleness_check(p, 0.5, exec_of(st)));
}

void BM_Roundtrip(benchmark::State& st) {
  const Driver d = make_example("sqrt");
  const TracePath p = trace_per_anchor(d, uniform_grid(1.0, 256));
  for (auto _ : st) benchmark::DoNotOptimize(roundtrip_residual(d, p, {}, {}, exec_of(st)));
}

}  // namespace

BENCHMARK(BM_TracePerAnchor)->ArgsProduct({{0, 1}, {128, 256}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TraceIncremental)->ArgsProduct({{0, 1}, {128, 256}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CheckC2)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Simpleness)->ArgsProduct({{0, 1}, {512}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Roundtrip)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
