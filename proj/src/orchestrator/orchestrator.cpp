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

#include "graphrca/orchestrator/orchestrator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "graphrca/builder/hammock_builder.hpp"
#include "graphrca/common/error.hpp"
#include "graphrca/common/json_util.hpp"

namespace graphrca {

namespace fs = std::filesystem;

void RunConfig::validate() const {
  if (candidates < 1 || suggestions < 1 || log_cap < 1) {
    throw PreconditionError("run caps must be at least 1");
  }
  if (budget.max_blocks < 1) throw PreconditionError("max_blocks must be at least 1");
  if (budget.retry_limit < 0) throw PreconditionError("retry_limit must be non-negative");
}

bool InvestigationQueue::is_pending(const EntityRef& e) const {
  return std::find(pending_.begin(), pending_.end(), e) != pending_.end();
}

bool InvestigationQueue::enqueue(const EntityRef& entity) {
  if (is_visited(entity) || is_pending(entity)) return false;
  pending_.push_back(entity);
  return true;
}

std::optional<EntityRef> InvestigationQueue::dequeue() {
  if (pending_.empty()) return std::nullopt;
  EntityRef head = pending_.front();
  pending_.pop_front();
  visited_.insert(head);
  return head;
}

void InvestigationQueue::mark_visited(const EntityRef& e) {
  pending_.erase(std::remove(pending_.begin(), pending_.end(), e), pending_.end());
  visited_.insert(e);
}

InvestigationQueue update_queue(InvestigationQueue queue,
                                const std::vector<EntityRef>& dependees,
                                const std::vector<EntityRef>& suggestions) {
  for (const auto& e : suggestions) queue.enqueue(e);
  for (const auto& e : dependees) queue.enqueue(e);
  return queue;
}

std::optional<Pdg> load_entity_pdg(const ScenarioBundle& bundle, const Sdg& sdg,
                                   const EntityRef& entity,
                                   std::vector<std::string>& diagnostics) {
  if (entity.kind != EntityKind::kMicroservice) return std::nullopt;
  auto locator = sdg.pdg_locator(entity);
  if (!locator) return std::nullopt;
  const fs::path path = bundle.root() / *locator;
  try {
    Pdg pdg;
    if (path.extension() == ".json") {
      pdg = pdg_from_json(read_file(path));
    } else if (fs::is_directory(path)) {
      pdg = build_service_pdg_from_sources(path, entity.name);
    } else {
      throw MissingFixture(*locator);
    }
    if (pdg.empty()) throw SchemaViolation("program dependence graph has no blocks");
    return pdg;
  } catch (const Error& e) {
    diagnostics.push_back("pdg for " + entity.label() + " unavailable (" + *locator +
                          "): " + e.what());
    return std::nullopt;
  }
}

EntityInvestigation investigate(const ScenarioBundle& bundle, const EntityRef& entity,
                                const Sdg& sdg, Policy& policy, const RunConfig& config) {
  if (!sdg.contains(entity)) throw UnknownEntity(entity.label());
  EntityInvestigation inv;
  inv.finding.entity = entity;
  inv.context = build_observability_context(bundle, entity, sdg, config.log_cap);
  inv.finding.observability_digest =
      fnv1a_hex(canonical_dump(observability_to_json(inv.context)));

  std::optional<Pdg> pdg = load_entity_pdg(bundle, sdg, entity, inv.finding.diagnostics);
  if (pdg) {
    TraversalOutcome outcome = run_traversal(policy, *pdg, inv.context, config.budget);
    inv.program = outcome.program;
    for (const auto& d : outcome.diagnostics) inv.finding.diagnostics.push_back(d);
    if (config.trace_dir) {
      std::string file = entity.name + ".trace.jsonl";
      write_trace(*config.trace_dir / file, outcome.trace);
      inv.finding.trace_locator = file;
    }
    inv.traversal = std::move(outcome);
  } else {
    inv.program = ProgramContext::empty_because("no code available");
  }
  inv.finding.program_summary = inv.program.empty ? inv.program.reason : inv.program.summary;
  inv.finding.program_context_digest =
      fnv1a_hex(canonical_dump(program_context_to_json(inv.program)));

  try {
    inv.finding.judgment = judge_entity(policy, inv.context, inv.program);
  } catch (const InvalidReply& e) {
    inv.finding.diagnostics.push_back(e.what());
    inv.finding.judgment =
        Judgment{JudgmentLabel::kUnrelated, "judgment unavailable: " + std::string(e.what()), {}};
  }
  return inv;
}

EntityFinding investigate_entity(const ScenarioBundle& bundle, const EntityRef& entity,
                                 const Sdg& sdg, Policy& policy, const RunConfig& config) {
  return investigate(bundle, entity, sdg, policy, config).finding;
}

RcaReport run_rca(const ScenarioBundle& bundle, PolicyBackend& backend,
                  const RunConfig& config, RunArtifacts* artifacts) {
  config.validate();
  const auto started = std::chrono::steady_clock::now();
  Policy policy(backend, bundle.id(), config.budget.retry_limit);

  // Phase 1: incident context and graph snapshot.
  const IncidentContext incident = load_incident_context(bundle);
  const Sdg sdg = bundle.load_sdg();

  // Phase 2: candidates seed the queue.
  CandidateSelection selection = select_candidates(policy, incident, sdg, config.candidates);
  InvestigationNarrative narrative;
  narrative.initial = selection.narrative;
  InvestigationQueue queue;
  for (const auto& c : selection.candidates) queue.enqueue(c);

  // Phase 3: investigate until the queue drains.
  std::vector<EntityRef> order;
  std::vector<std::string> diagnostics;
  while (auto entity = queue.dequeue()) {
    order.push_back(*entity);
    EntityInvestigation inv = investigate(bundle, *entity, sdg, policy, config);
    std::vector<EntityRef> suggestions;
    try {
      suggestions = suggest_entities(policy, inv.finding.judgment, inv.context, inv.program,
                                     sdg, config.suggestions);
    } catch (const InvalidReply& e) {
      inv.finding.diagnostics.push_back(e.what());
    }
    for (const auto& s : suggestions) {
      if (queue.is_visited(s)) inv.finding.repeat_implications.push_back(s);
    }
    queue = update_queue(std::move(queue), sdg.dependees(*entity), suggestions);
    for (const auto& d : inv.finding.diagnostics) diagnostics.push_back(entity->label() + ": " + d);
    narrative.findings.push_back(std::move(inv.finding));
  }

  // Phase 4: consolidate.
  RcaReport report = summarize(policy, narrative, bundle.id());
  for (const auto& d : policy.diagnostics()) diagnostics.push_back(d);
  report.diagnostics = std::move(diagnostics);

  TokenUsage usage = policy.usage();
  report.metadata.seed = config.seed;
  report.metadata.backend = backend.name();
  report.metadata.prompt_tokens = usage.prompt_tokens;
  report.metadata.completion_tokens = usage.completion_tokens;
  report.metadata.calls = policy.call_count();
  if (backend.simulated_clock()) {
    report.metadata.wall_time_ms = std::llround(policy.backend_latency_ms());
  } else {
    report.metadata.wall_time_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                                       std::chrono::steady_clock::now() - started)
                                       .count();
  }
  if (artifacts) {
    artifacts->narrative = std::move(narrative);
    artifacts->calls = policy.calls();
    artifacts->dequeue_order = std::move(order);
  }
  return report;
}

}  // namespace graphrca
