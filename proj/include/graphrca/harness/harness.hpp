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

// Scenario suite execution and scoring: exact-set root-cause identification
// (RCI), rubric-based root-cause reasoning (RCR), and the time and token
// metrics normalized by RCR.

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "graphrca/orchestrator/orchestrator.hpp"
#include "graphrca/policy/backend.hpp"
#include "graphrca/policy/types.hpp"

namespace graphrca {

struct GroundTruth {
  std::vector<EntityRef> root_cause_entities;
  std::vector<std::string> fault_site_identifiers;
  // Every group needs one member present in the justifications.
  std::vector<std::vector<std::string>> reasoning_keywords;
  std::vector<EntityRef> propagation_chain;
};

// Throws SchemaViolation (e.g. empty root-cause set).
GroundTruth ground_truth_from_json(const Json& doc);
GroundTruth load_ground_truth(const std::filesystem::path& path);

int score_rci(const RcaReport& report, const GroundTruth& truth);
int score_rcr(const RcaReport& report, const GroundTruth& truth);

// value / rcr; nullopt when rcr == 0. Throws PreconditionError when rcr is
// outside [0, 1].
std::optional<double> normalize_metric(double value, double rcr);

struct RunScore {
  std::string scenario_id;
  std::int64_t seed = 0;
  int rci = 0;
  int rcr = 0;
  std::int64_t wall_time_ms = 0;
  std::int64_t tokens = 0;
  bool failed = false;
  std::string diagnostic;
  std::string report_json;  // canonical, empty on failure
};

struct ScenarioBreakdown {
  std::string scenario_id;
  int runs = 0;
  double rci = 0;
  double rcr = 0;
  double mttc_s = 0;
  double atc_tokens = 0;
  std::vector<std::string> failures;
};

struct SuiteMetrics {
  std::string suite;
  int runs = 0;
  double rci = 0;
  double rcr = 0;
  double mttc_s = 0;
  double atc_tokens = 0;
  std::optional<double> mttd_s;
  std::optional<double> eff_atc_tokens;
  std::vector<ScenarioBreakdown> per_scenario;
  std::vector<RunScore> run_scores;  // sorted by (scenario, seed)
};

// Sub-directories holding a scenario.json, sorted by name.
std::vector<std::filesystem::path> discover_scenarios(const std::filesystem::path& dir);

// One scripted backend loaded with every bundle's rules.
std::unique_ptr<ScriptedBackend> scripted_backend_for(
    const std::vector<std::filesystem::path>& scenarios);

// Runs |scenarios| x |seeds| RCA runs on up to `workers` threads. Per-run
// failures score 0 and are listed in the breakdown.
SuiteMetrics run_suite(const std::vector<std::filesystem::path>& scenarios,
                       PolicyBackend& backend, const std::vector<std::int64_t>& seeds,
                       const RunConfig& config, int workers = 1,
                       const std::string& suite_name = "suite");

// Sequential reference with identical semantics.
SuiteMetrics run_suite_serial(const std::vector<std::filesystem::path>& scenarios,
                              PolicyBackend& backend,
                              const std::vector<std::int64_t>& seeds,
                              const RunConfig& config,
                              const std::string& suite_name = "suite");

// Aggregates run scores; the result does not depend on their order.
SuiteMetrics aggregate_runs(std::vector<RunScore> runs, const std::string& suite_name);

Json metrics_to_json(const SuiteMetrics& metrics);
std::string metrics_to_text(const SuiteMetrics& metrics);

}  // namespace graphrca
