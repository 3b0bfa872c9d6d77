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

#include <gtest/gtest.h>

#include "graphrca/orchestrator/orchestrator.hpp"
#include "test_support.hpp"

namespace graphrca {
namespace {

namespace fs = std::filesystem;

EntityRef ms(const std::string& n) { return EntityRef{EntityKind::kMicroservice, n}; }

std::vector<EntityRef> pending(const InvestigationQueue& q) {
  return {q.pending().begin(), q.pending().end()};
}

TEST(UpdateQueue, SuggestionsBeforeDependees) {
  InvestigationQueue q;
  q.mark_visited(ms("recommendation"));
  q = update_queue(q, {ms("product-catalog")}, {ms("external-product-db")});
  EXPECT_EQ(pending(q), (std::vector<EntityRef>{ms("external-product-db"), ms("product-catalog")}));
}

TEST(UpdateQueue, VisitedAndDuplicatesAreSkipped) {
  InvestigationQueue q;
  q.enqueue(ms("a"));
  q.mark_visited(ms("v"));
  q = update_queue(q, {ms("v"), ms("b"), ms("a")}, {ms("b"), ms("c")});
  EXPECT_EQ(pending(q), (std::vector<EntityRef>{ms("a"), ms("b"), ms("c")}));
  EXPECT_EQ(q.dequeue(), ms("a"));
  EXPECT_TRUE(q.is_visited(ms("a")));
  EXPECT_FALSE(q.enqueue(ms("a")));
  for (const auto& e : q.pending()) EXPECT_FALSE(q.is_visited(e));
}

RunConfig config() { return RunConfig{}; }

TEST(InvestigateEntity, RecommendationIsPrimaryWithCodeEvidence) {
  const auto dir = testing::scenario_dir("positive", "schema-mismatch");
  ScenarioBundle bundle = ScenarioBundle::open(dir);
  Sdg sdg = bundle.load_sdg();
  ScriptedBackend backend;
  backend.add_bundle(dir, bundle.id());
  Policy policy(backend, bundle.id());
  EntityInvestigation inv = investigate(bundle, ms("recommendation"), sdg, policy, config());
  EXPECT_EQ(inv.finding.judgment.label, JudgmentLabel::kPrimaryFailure);
  ASSERT_TRUE(inv.traversal.has_value());
  EXPECT_NE(inv.program.summary.find("products_list"), std::string::npos);
  EXPECT_FALSE(inv.finding.observability_digest.empty());
  EXPECT_FALSE(inv.finding.program_context_digest.empty());
}

TEST(InvestigateEntity, ConfigmapIsJudgedWithoutCode) {
  const auto dir = testing::scenario_dir("positive", "feature-flag-configmap");
  ScenarioBundle bundle = ScenarioBundle::open(dir);
  Sdg sdg = bundle.load_sdg();
  ScriptedBackend backend;
  backend.add_bundle(dir, bundle.id());
  Policy policy(backend, bundle.id());
  EntityRef cfg{EntityKind::kConfigmap, "flagd-config"};
  EntityInvestigation inv = investigate(bundle, cfg, sdg, policy, config());
  EXPECT_FALSE(inv.traversal.has_value());
  EXPECT_TRUE(inv.program.empty);
  ASSERT_TRUE(inv.context.config_status.has_value());
  EXPECT_FALSE(inv.context.config_status->empty());
  EXPECT_EQ(inv.finding.judgment.label, JudgmentLabel::kPrimaryFailure);
  for (const auto& call : policy.calls()) {
    EXPECT_NE(call.kind, QueryKind::kStep);
    EXPECT_NE(call.kind, QueryKind::kMatch);
  }
}

// Writes a bundle with the given services; `attachments` maps a service to
// its PDG locator.
void write_bundle(const fs::path& root, const std::vector<std::string>& services,
                  const std::vector<std::pair<std::string, std::string>>& edges,
                  const std::map<std::string, std::string>& attachments) {
  write_file(root / "scenario.json", R"({"id": "quiet", "description": "d"})");
  Json nodes = Json::array();
  for (const auto& s : services) nodes.push_back(Json{{"kind", "microservice"}, {"name", s}});
  Json e = Json::array();
  for (const auto& [a, b] : edges) {
    e.push_back(Json{{"from", Json{{"kind", "microservice"}, {"name", a}}},
                     {"to", Json{{"kind", "microservice"}, {"name", b}}}});
  }
  write_file(root / "sdg.json", Json{{"version", 1}, {"snapshot_time", 0}, {"nodes", nodes},
                                     {"edges", e}, {"pdg_attachments", attachments}}
                                    .dump());
  fs::create_directories(root / "obs");
  write_file(root / "obs" / "alerts.json",
             Json::array({Json{{"name", "Latency"}, {"entity", services.front()},
                               {"severity", "warning"}, {"started_at", 5},
                               {"sustained", true}, {"description", "slow"}}})
                 .dump());
}

TEST(InvestigateEntity, EmptyFixturesWithoutCodeAreUnrelated) {
  testing::TempDir tmp("orch-empty");
  write_bundle(tmp.path(), {"lonely"}, {}, {});
  ScenarioBundle bundle = ScenarioBundle::open(tmp.path());
  ScriptedBackend backend;
  Policy policy(backend, bundle.id());
  EntityFinding f = investigate_entity(bundle, ms("lonely"), bundle.load_sdg(), policy, config());
  EXPECT_EQ(f.judgment.label, JudgmentLabel::kUnrelated);
  EXPECT_NE(f.judgment.reasoning.find("insufficient signal"), std::string::npos);
  EXPECT_THROW(investigate_entity(bundle, ms("ghost"), bundle.load_sdg(), policy, config()),
               UnknownEntity);
}

TEST(InvestigateEntity, BrokenPdgDegradesToNoCodePath) {
  testing::TempDir tmp("orch-broken");
  write_bundle(tmp.path(), {"svc"}, {}, {{"svc", "src/svc"}});
  fs::create_directories(tmp.path() / "src" / "svc");
  write_file(tmp.path() / "src" / "svc" / "bad.mini", "fn broken( {\n");
  ScenarioBundle bundle = ScenarioBundle::open(tmp.path());
  ScriptedBackend backend;
  Policy policy(backend, bundle.id());
  EntityInvestigation inv = investigate(bundle, ms("svc"), bundle.load_sdg(), policy, config());
  EXPECT_FALSE(inv.traversal.has_value());
  EXPECT_EQ(inv.program.reason, "no code available");
  ASSERT_EQ(inv.finding.diagnostics.size(), 1u);
  EXPECT_NE(inv.finding.diagnostics[0].find("unavailable"), std::string::npos);
}

RcaReport run_bundle(const std::string& group, const std::string& id, std::int64_t seed,
                     RunArtifacts* artifacts = nullptr) {
  const auto dir = testing::scenario_dir(group, id);
  ScenarioBundle bundle = ScenarioBundle::open(dir);
  ScriptedBackend backend;
  backend.add_bundle(dir, bundle.id());
  RunConfig cfg;
  cfg.seed = seed;
  return run_rca(bundle, backend, cfg, artifacts);
}

TEST(RunRca, SilentRetryIsolatesExternalDatabase) {
  RunArtifacts artifacts;
  RcaReport r = run_bundle("positive", "silent-retry", 1, &artifacts);
  EXPECT_EQ(r.root_cause_entities, std::vector<EntityRef>{ms("external-product-db")});
  EXPECT_EQ(r.per_entity.at(ms("external-product-db")).label, JudgmentLabel::kPrimaryFailure);
  EXPECT_EQ(r.per_entity.at(ms("recommendation")).label, JudgmentLabel::kSymptomOnly);
  EXPECT_EQ(r.propagation_chain, (std::vector<EntityRef>{ms("external-product-db"),
                                                         ms("recommendation"), ms("frontend")}));
  // The database has no SDG in-edge, so only the suggestion can reach it.
  ScenarioBundle bundle = ScenarioBundle::open(testing::scenario_dir("positive", "silent-retry"));
  EXPECT_TRUE(bundle.load_sdg().dependents(ms("external-product-db")).empty());
  EXPECT_NE(std::find(artifacts.dequeue_order.begin(), artifacts.dequeue_order.end(),
                      ms("external-product-db")),
            artifacts.dequeue_order.end());
}

TEST(RunRca, SchemaMismatchJudgmentSet) {
  RcaReport r = run_bundle("positive", "schema-mismatch", 1);
  EXPECT_EQ(r.root_cause_entities, std::vector<EntityRef>{ms("recommendation")});
  EXPECT_EQ(r.per_entity.at(ms("recommendation")).label, JudgmentLabel::kPrimaryFailure);
  EXPECT_EQ(r.per_entity.at(ms("frontend")).label, JudgmentLabel::kSymptomOnly);
  EXPECT_EQ(r.per_entity.at(ms("frontend-proxy")).label, JudgmentLabel::kSymptomOnly);
  EXPECT_EQ(r.per_entity.at(ms("product-catalog")).label, JudgmentLabel::kUnrelated);
  EXPECT_NE(r.root_cause_reasoning.find("schema mismatch"), std::string::npos);
  EXPECT_FALSE(r.inconclusive);
}

TEST(RunRca, FindingsFollowDequeueOrderAndCoverVisitedSet) {
  for (const char* id : {"schema-mismatch", "silent-retry", "feature-flag-configmap"}) {
    RunArtifacts artifacts;
    RcaReport r = run_bundle("positive", id, 3, &artifacts);
    ASSERT_EQ(artifacts.narrative.findings.size(), artifacts.dequeue_order.size());
    std::set<EntityRef> visited;
    for (std::size_t i = 0; i < artifacts.dequeue_order.size(); ++i) {
      EXPECT_EQ(artifacts.narrative.findings[i].entity, artifacts.dequeue_order[i]);
      EXPECT_TRUE(visited.insert(artifacts.dequeue_order[i]).second) << "investigated twice";
    }
    std::set<EntityRef> keys;
    for (const auto& [e, _] : r.per_entity) keys.insert(e);
    EXPECT_EQ(keys, visited);
    ScenarioBundle bundle = ScenarioBundle::open(testing::scenario_dir("positive", id));
    EXPECT_LE(visited.size(), bundle.load_sdg().nodes().size());
    for (const auto& e : r.propagation_chain) EXPECT_TRUE(visited.contains(e));
    for (const auto& e : r.root_cause_entities) {
      EXPECT_EQ(r.per_entity.at(e).label, JudgmentLabel::kPrimaryFailure);
    }
  }
}

TEST(RunRca, AllUnrelatedIsInconclusive) {
  testing::TempDir tmp("orch-inconclusive");
  write_bundle(tmp.path(), {"alpha", "beta"}, {}, {});
  ScenarioBundle bundle = ScenarioBundle::open(tmp.path());
  ScriptedBackend backend;
  RunArtifacts artifacts;
  RcaReport r = run_rca(bundle, backend, RunConfig{}, &artifacts);
  EXPECT_TRUE(r.root_cause_entities.empty());
  EXPECT_TRUE(r.inconclusive);
  EXPECT_EQ(artifacts.dequeue_order, std::vector<EntityRef>{ms("alpha")});
}

TEST(RunRca, ScriptedRunsAreByteIdentical) {
  for (const char* id : {"schema-mismatch", "silent-retry"}) {
    for (std::int64_t seed : {1, 2}) {
      std::string a = canonical_dump(report_to_json(run_bundle("positive", id, seed)));
      std::string b = canonical_dump(report_to_json(run_bundle("positive", id, seed)));
      EXPECT_EQ(a, b);
    }
  }
}

TEST(RunRca, TokenTotalsMatchTheCallLog) {
  RunArtifacts artifacts;
  RcaReport r = run_bundle("positive", "schema-mismatch", 1, &artifacts);
  std::int64_t prompt = 0, completion = 0;
  for (const auto& c : artifacts.calls) {
    prompt += c.usage.prompt_tokens;
    completion += c.usage.completion_tokens;
  }
  EXPECT_EQ(r.metadata.prompt_tokens, prompt);
  EXPECT_EQ(r.metadata.completion_tokens, completion);
  EXPECT_EQ(r.metadata.calls, static_cast<int>(artifacts.calls.size()));
  EXPECT_EQ(r.metadata.backend, "scripted");
  EXPECT_GT(r.metadata.wall_time_ms, 0);
}

TEST(RunRca, TraceDirectoryReceivesOneFilePerTraversal) {
  const auto dir = testing::scenario_dir("positive", "schema-mismatch");
  ScenarioBundle bundle = ScenarioBundle::open(dir);
  ScriptedBackend backend;
  backend.add_bundle(dir, bundle.id());
  testing::TempDir tmp("orch-trace");
  RunConfig cfg;
  cfg.trace_dir = tmp.path();
  RunArtifacts artifacts;
  run_rca(bundle, backend, cfg, &artifacts);
  EXPECT_TRUE(fs::exists(tmp.path() / "recommendation.trace.jsonl"));
  for (const auto& f : artifacts.narrative.findings) {
    if (f.trace_locator) {
      EXPECT_TRUE(fs::exists(tmp.path() / *f.trace_locator));
    }
  }
}

TEST(RunConfig, CapsMustBePositive) {
  RunConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.suggestions = 0;
  EXPECT_THROW(cfg.validate(), PreconditionError);
  cfg = RunConfig{};
  cfg.budget.max_blocks = 0;
  EXPECT_THROW(cfg.validate(), PreconditionError);
}

TEST(ReportJson, RoundTripsAndRendersMarkdown) {
  RcaReport r = run_bundle("positive", "silent-retry", 4);
  Json doc = report_to_json(r);
  EXPECT_EQ(doc["version"], 1);
  EXPECT_EQ(canonical_dump(report_to_json(report_from_json(doc))), canonical_dump(doc));
  std::string md = report_to_markdown(r);
  EXPECT_NE(md.find("external-product-db"), std::string::npos);
}

}  // namespace
}  // namespace graphrca
