// Copyright 2026 The graphrca Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Serial versus parallel throughput for the suite runner and PDG parsing.

#include <benchmark/benchmark.h>

#include <filesystem>

#include "graphrca/builder/hammock_builder.hpp"
#include "graphrca/harness/harness.hpp"

namespace graphrca {
namespace {

const std::filesystem::path kSource = GRAPHRCA_SOURCE_DIR;

void BM_SuiteSerial(benchmark::State& state) {
  auto scenarios = discover_scenarios(kSource / "scenarios" / "positive");
  auto backend = scripted_backend_for(scenarios);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        run_suite_serial(scenarios, *backend, {1, 2, 3, 4, 5}, RunConfig{}));
  }
}
BENCHMARK(BM_SuiteSerial)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_SuiteParallel(benchmark::State& state) {
  auto scenarios = discover_scenarios(kSource / "scenarios" / "positive");
  auto backend = scripted_backend_for(scenarios);
  const int workers = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        run_suite(scenarios, *backend, {1, 2, 3, 4, 5}, RunConfig{}, workers));
  }
}
BENCHMARK(BM_SuiteParallel)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_CorpusPdg(benchmark::State& state) {
  const bool parallel = state.range(0) != 0;
  for (auto _ : state) {
    std::vector<std::string> diagnostics;
    benchmark::DoNotOptimize(
        build_service_pdg_from_sources(kSource / "corpus", "corpus", &diagnostics, parallel));
  }
}
BENCHMARK(BM_CorpusPdg)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace
}  // namespace graphrca

BENCHMARK_MAIN();
