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

// End-to-end RCA workflow: candidate selection, the investigation queue,
// per-entity investigation (observability, code traversal, judgment), queue
// expansion and the final report.

#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "graphrca/graph/pdg.hpp"
#include "graphrca/graph/sdg.hpp"
#include "graphrca/observability/observability.hpp"
#include "graphrca/policy/backend.hpp"
#include "graphrca/policy/policy.hpp"
#include "graphrca/policy/types.hpp"
#include "graphrca/traversal/traversal.hpp"

namespace graphrca {

struct RunConfig {
  int candidates = kDefaultCandidates;   // N
  int suggestions = kDefaultSuggestions; // k
  int log_cap = 40;                      // K
  TraversalBudget budget;
  std::int64_t seed = 0;
  // When set, each traversal writes <entity>.trace.jsonl here.
  std::optional<std::filesystem::path> trace_dir;

  // Throws PreconditionError when a cap is below 1.
  void validate() const;
};

class InvestigationQueue {
 public:
  // False when the entity is visited or already pending.
  bool enqueue(const EntityRef& entity);
  // Pops the head and marks it visited.
  std::optional<EntityRef> dequeue();

  bool empty() const { return pending_.empty(); }
  const std::deque<EntityRef>& pending() const { return pending_; }
  const std::set<EntityRef>& visited() const { return visited_; }
  bool is_visited(const EntityRef& e) const { return visited_.contains(e); }
  bool is_pending(const EntityRef& e) const;

  void mark_visited(const EntityRef& e);

 private:
  std::deque<EntityRef> pending_;
  std::set<EntityRef> visited_;
};

// Suggestions first, then dependees; visited and pending entities are
// skipped.
InvestigationQueue update_queue(InvestigationQueue queue,
                                const std::vector<EntityRef>& dependees,
                                const std::vector<EntityRef>& suggestions);

// The PDG attached to a microservice, from pdg/<name>.json or built from a
// source directory. Nullopt (with a diagnostic) when absent or broken.
std::optional<Pdg> load_entity_pdg(const ScenarioBundle& bundle, const Sdg& sdg,
                                   const EntityRef& entity,
                                   std::vector<std::string>& diagnostics);

struct EntityInvestigation {
  EntityFinding finding;
  ObservabilityContext context;
  ProgramContext program;
  std::optional<TraversalOutcome> traversal;
};

EntityInvestigation investigate(const ScenarioBundle& bundle, const EntityRef& entity,
                                const Sdg& sdg, Policy& policy, const RunConfig& config);

EntityFinding investigate_entity(const ScenarioBundle& bundle, const EntityRef& entity,
                                 const Sdg& sdg, Policy& policy, const RunConfig& config);

struct RunArtifacts {
  InvestigationNarrative narrative;
  std::vector<CallRecord> calls;
  std::vector<EntityRef> dequeue_order;
};

RcaReport run_rca(const ScenarioBundle& bundle, PolicyBackend& backend,
                  const RunConfig& config, RunArtifacts* artifacts = nullptr);

}  // namespace graphrca
