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

#include "graphrca/harness/harness.hpp"

#include <omp.h>

#include <algorithm>
#include <cctype>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "graphrca/common/error.hpp"
#include "graphrca/common/json_util.hpp"

namespace graphrca {

namespace fs = std::filesystem;

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<EntityRef> entity_list(const Json& doc, std::string_view key) {
  std::vector<EntityRef> out;
  auto it = doc.find(key);
  if (it == doc.end()) return out;
  if (!it->is_array()) throw SchemaViolation("groundtruth: '" + std::string(key) + "' must be a list");
  for (const auto& item : *it) {
    if (item.is_string()) {
      out.push_back(EntityRef{EntityKind::kMicroservice, item.get<std::string>()});
    } else {
      out.push_back(entity_from_json(item, "groundtruth"));
    }
  }
  return out;
}

struct Job {
  std::size_t scenario = 0;
  std::int64_t seed = 0;
};

struct PreparedScenario {
  fs::path root;
  std::optional<ScenarioBundle> bundle;
  std::optional<GroundTruth> truth;
  std::string label;
  std::string error;
};

std::vector<PreparedScenario> prepare(const std::vector<fs::path>& scenarios) {
  std::vector<PreparedScenario> out;
  for (const auto& root : scenarios) {
    PreparedScenario p;
    p.root = root;
    p.label = root.filename().string();
    try {
      p.bundle = ScenarioBundle::open(root);
      p.label = p.bundle->id();
      p.truth = load_ground_truth(root / "groundtruth.json");
    } catch (const std::exception& e) {
      p.error = e.what();
    }
    out.push_back(std::move(p));
  }
  return out;
}

RunScore execute(const PreparedScenario& scenario, PolicyBackend& backend,
                 std::int64_t seed, const RunConfig& base) {
  RunScore score;
  score.scenario_id = scenario.label;
  score.seed = seed;
  if (!scenario.error.empty()) {
    score.failed = true;
    score.diagnostic = scenario.error;
    return score;
  }
  try {
    RunConfig config = base;
    config.seed = seed;
    RcaReport report = run_rca(*scenario.bundle, backend, config);
    score.rci = score_rci(report, *scenario.truth);
    score.rcr = score_rcr(report, *scenario.truth);
    score.wall_time_ms = report.metadata.wall_time_ms;
    score.tokens = report.metadata.prompt_tokens + report.metadata.completion_tokens;
    score.report_json = canonical_dump(report_to_json(report));
  } catch (const std::exception& e) {
    score.failed = true;
    score.diagnostic = e.what();
  }
  return score;
}

void check_inputs(const std::vector<fs::path>& scenarios,
                  const std::vector<std::int64_t>& seeds) {
  if (scenarios.empty()) throw PreconditionError("suite needs at least one scenario");
  if (seeds.empty()) throw PreconditionError("suite needs at least one seed");
}

std::vector<Job> jobs_for(std::size_t scenarios, const std::vector<std::int64_t>& seeds) {
  std::vector<Job> jobs;
  for (std::size_t s = 0; s < scenarios; ++s) {
    for (auto seed : seeds) jobs.push_back(Job{s, seed});
  }
  return jobs;
}

double mean(std::int64_t sum, int count) {
  return count == 0 ? 0.0 : static_cast<double>(sum) / count;
}

Json optional_number(const std::optional<double>& v) {
  return v ? Json(*v) : Json(nullptr);
}

}  // namespace

GroundTruth ground_truth_from_json(const Json& doc) {
  if (!doc.is_object()) throw SchemaViolation("groundtruth must be an object");
  GroundTruth truth;
  truth.root_cause_entities = entity_list(doc, "root_cause_entities");
  if (truth.root_cause_entities.empty()) {
    throw SchemaViolation("groundtruth: root_cause_entities is empty");
  }
  truth.propagation_chain = entity_list(doc, "propagation_chain");
  if (auto it = doc.find("fault_site_identifiers"); it != doc.end()) {
    for (const auto& s : *it) truth.fault_site_identifiers.push_back(s.get<std::string>());
  }
  if (auto it = doc.find("reasoning_keywords"); it != doc.end()) {
    for (const auto& group : *it) {
      if (!group.is_array() || group.empty()) {
        throw SchemaViolation("groundtruth: keyword groups must be non-empty lists");
      }
      std::vector<std::string> words;
      for (const auto& w : group) words.push_back(w.get<std::string>());
      truth.reasoning_keywords.push_back(std::move(words));
    }
  }
  return truth;
}

GroundTruth load_ground_truth(const fs::path& path) {
  return ground_truth_from_json(parse_json(read_file(path), path.filename().string()));
}

int score_rci(const RcaReport& report, const GroundTruth& truth) {
  std::set<EntityRef> got(report.root_cause_entities.begin(), report.root_cause_entities.end());
  std::set<EntityRef> want(truth.root_cause_entities.begin(), truth.root_cause_entities.end());
  return !want.empty() && got == want ? 1 : 0;
}

int score_rcr(const RcaReport& report, const GroundTruth& truth) {
  if (score_rci(report, truth) == 0) return 0;
  std::string text = lower(report.root_cause_reasoning);
  std::vector<std::string> evidence;
  for (const auto& [entity, verdict] : report.per_entity) {
    text += "\n" + lower(verdict.justification);
    evidence.insert(evidence.end(), verdict.evidence.begin(), verdict.evidence.end());
  }
  for (const auto& group : truth.reasoning_keywords) {
    bool hit = std::any_of(group.begin(), group.end(), [&](const std::string& w) {
      return text.find(lower(w)) != std::string::npos;
    });
    if (!hit) return 0;
  }
  bool cited = std::any_of(
      truth.fault_site_identifiers.begin(), truth.fault_site_identifiers.end(),
      [&](const std::string& id) {
        return std::any_of(evidence.begin(), evidence.end(), [&](const std::string& e) {
          return e.find(id) != std::string::npos;
        });
      });
  return cited ? 1 : 0;
}

std::optional<double> normalize_metric(double value, double rcr) {
  if (!(rcr >= 0.0 && rcr <= 1.0)) throw PreconditionError("rcr must lie in [0, 1]");
  if (rcr == 0.0) return std::nullopt;
  return value / rcr;
}

std::vector<fs::path> discover_scenarios(const fs::path& dir) {
  std::vector<fs::path> out;
  if (!fs::is_directory(dir)) throw MissingFixture(dir.string());
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_directory() && fs::exists(entry.path() / "scenario.json")) {
      out.push_back(entry.path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::unique_ptr<ScriptedBackend> scripted_backend_for(const std::vector<fs::path>& scenarios) {
  auto backend = std::make_unique<ScriptedBackend>();
  for (const auto& root : scenarios) {
    Json scenario = parse_json(read_file(root / "scenario.json"), "scenario.json");
    backend->add_bundle(root, require_string(scenario, "id", "scenario.json"));
  }
  return backend;
}

SuiteMetrics run_suite(const std::vector<fs::path>& scenarios, PolicyBackend& backend,
                       const std::vector<std::int64_t>& seeds, const RunConfig& config,
                       int workers, const std::string& suite_name) {
  check_inputs(scenarios, seeds);
  config.validate();
  if (workers < 1) throw PreconditionError("workers must be at least 1");
  const auto prepared = prepare(scenarios);
  const auto jobs = jobs_for(prepared.size(), seeds);
  std::vector<RunScore> scores(jobs.size());
  const auto n = static_cast<std::int64_t>(jobs.size());
#pragma omp parallel for schedule(dynamic) num_threads(workers)
  for (std::int64_t i = 0; i < n; ++i) {
    const Job& job = jobs[static_cast<std::size_t>(i)];
    scores[static_cast<std::size_t>(i)] =
        execute(prepared[job.scenario], backend, job.seed, config);
  }
  return aggregate_runs(std::move(scores), suite_name);
}

SuiteMetrics run_suite_serial(const std::vector<fs::path>& scenarios, PolicyBackend& backend,
                              const std::vector<std::int64_t>& seeds,
                              const RunConfig& config, const std::string& suite_name) {
  check_inputs(scenarios, seeds);
  config.validate();
  const auto prepared = prepare(scenarios);
  std::vector<RunScore> scores;
  for (const auto& job : jobs_for(prepared.size(), seeds)) {
    scores.push_back(execute(prepared[job.scenario], backend, job.seed, config));
  }
  return aggregate_runs(std::move(scores), suite_name);
}

SuiteMetrics aggregate_runs(std::vector<RunScore> runs, const std::string& suite_name) {
  std::sort(runs.begin(), runs.end(), [](const RunScore& a, const RunScore& b) {
    return std::tie(a.scenario_id, a.seed) < std::tie(b.scenario_id, b.seed);
  });
  SuiteMetrics m;
  m.suite = suite_name;
  m.runs = static_cast<int>(runs.size());
  // Integer sums keep the means independent of run order.
  std::int64_t rci = 0, rcr = 0, wall = 0, tokens = 0;
  std::map<std::string, std::vector<const RunScore*>> by_scenario;
  for (const auto& r : runs) {
    rci += r.rci;
    rcr += r.rcr;
    wall += r.wall_time_ms;
    tokens += r.tokens;
    by_scenario[r.scenario_id].push_back(&r);
  }
  m.rci = mean(rci, m.runs);
  m.rcr = mean(rcr, m.runs);
  m.mttc_s = mean(wall, m.runs) / 1000.0;
  m.atc_tokens = mean(tokens, m.runs);
  if (m.runs > 0) {
    m.mttd_s = normalize_metric(m.mttc_s, m.rcr);
    m.eff_atc_tokens = normalize_metric(m.atc_tokens, m.rcr);
  }
  for (const auto& [id, list] : by_scenario) {
    ScenarioBreakdown b;
    b.scenario_id = id;
    b.runs = static_cast<int>(list.size());
    std::int64_t s_rci = 0, s_rcr = 0, s_wall = 0, s_tokens = 0;
    for (const RunScore* r : list) {
      s_rci += r->rci;
      s_rcr += r->rcr;
      s_wall += r->wall_time_ms;
      s_tokens += r->tokens;
      if (r->failed) {
        b.failures.push_back("seed " + std::to_string(r->seed) + ": " + r->diagnostic);
      }
    }
    b.rci = mean(s_rci, b.runs);
    b.rcr = mean(s_rcr, b.runs);
    b.mttc_s = mean(s_wall, b.runs) / 1000.0;
    b.atc_tokens = mean(s_tokens, b.runs);
    m.per_scenario.push_back(std::move(b));
  }
  m.run_scores = std::move(runs);
  return m;
}

Json metrics_to_json(const SuiteMetrics& m) {
  Json per = Json::array();
  for (const auto& b : m.per_scenario) {
    per.push_back(Json{{"scenario_id", b.scenario_id},
                       {"runs", b.runs},
                       {"rci", b.rci},
                       {"rcr", b.rcr},
                       {"mttc_s", b.mttc_s},
                       {"atc_tokens", b.atc_tokens},
                       {"failures", b.failures}});
  }
  return Json{{"version", 1},
              {"suite", m.suite},
              {"runs", m.runs},
              {"rci", m.rci},
              {"rcr", m.rcr},
              {"mttc_s", m.mttc_s},
              {"atc_tokens", m.atc_tokens},
              {"mttd_s", optional_number(m.mttd_s)},
              {"eff_atc_tokens", optional_number(m.eff_atc_tokens)},
              {"per_scenario", std::move(per)}};
}

std::string metrics_to_text(const SuiteMetrics& m) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4);
  out << "suite " << m.suite << ": " << m.runs << " runs\n";
  out << "  RCI Pass@1   " << m.rci << "\n";
  out << "  RCR Pass@1   " << m.rcr << "\n";
  out << "  MTTC (s)     " << m.mttc_s << "\n";
  out << "  ATC (tokens) " << m.atc_tokens << "\n";
  out << "  MTTD (s)     ";
  if (m.mttd_s) out << *m.mttd_s; else out << "undefined";
  out << "\n  eff. ATC     ";
  if (m.eff_atc_tokens) out << *m.eff_atc_tokens; else out << "undefined";
  out << "\n\n";
  out << std::left << std::setw(34) << "scenario" << std::right << std::setw(6) << "runs"
      << std::setw(8) << "rci" << std::setw(8) << "rcr" << std::setw(10) << "mttc_s"
      << std::setw(12) << "atc" << "\n";
  for (const auto& b : m.per_scenario) {
    out << std::left << std::setw(34) << b.scenario_id << std::right << std::setw(6)
        << b.runs << std::setprecision(2) << std::setw(8) << b.rci << std::setw(8) << b.rcr
        << std::setprecision(3) << std::setw(10) << b.mttc_s << std::setprecision(1)
        << std::setw(12) << b.atc_tokens << std::setprecision(4) << "\n";
    for (const auto& f : b.failures) out << "    failure: " << f << "\n";
  }
  return out.str();
}

}  // namespace graphrca
