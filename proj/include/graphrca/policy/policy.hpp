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

// Typed model queries. Every operation renders its inputs through a prompt
// template, asks the backend, extracts the fenced `rca-json` payload and
// validates it against the live graphs. Invalid replies are regenerated with
// the failure reason appended, up to the retry limit.

#pragma once

#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "graphrca/common/error.hpp"
#include "graphrca/graph/pdg.hpp"
#include "graphrca/graph/sdg.hpp"
#include "graphrca/observability/observability.hpp"
#include "graphrca/policy/backend.hpp"
#include "graphrca/policy/types.hpp"

namespace graphrca {

// A reply that could not be used; the reason goes into the regeneration
// prompt.
class Retryable : public Error {
 public:
  using Error::Error;
};

inline constexpr int kDefaultRetryLimit = 3;

// Extracts the single ```rca-json fenced block and checks the kind's schema.
// Throws Retryable.
Json parse_structured_reply(std::string_view raw, QueryKind kind);
TraversalDecision decision_from_payload(const Json& payload);

struct CallRecord {
  QueryKind kind = QueryKind::kSelect;
  std::string entity;
  std::string block;
  int attempt = 0;
  TokenUsage usage;
  double latency_ms = 0;
  std::string rejection;  // empty when the reply was accepted
};

struct QuerySpec {
  QueryKind kind = QueryKind::kSelect;
  std::string entity;
  std::string block;
  int step = -1;
  Json payload;
};

// Checks a parsed payload against live state and returns the normalized
// payload. Throws Retryable.
using ReplyValidator = std::function<Json(const Json&)>;

// One run's view of a backend: retry policy, call log and token totals.
// Queries from one run are sequential; the log is still guarded so that
// readers on other threads see a consistent view.
class Policy {
 public:
  Policy(PolicyBackend& backend, std::string scenario_id,
         int retry_limit = kDefaultRetryLimit);

  PolicyBackend& backend() const { return *backend_; }
  const std::string& scenario_id() const { return scenario_id_; }
  int retry_limit() const { return retry_limit_; }

  // Up to `max_attempts` calls (default 1 + retry_limit). Throws
  // InvalidReply when none is usable.
  Json ask(const QuerySpec& spec, const ReplyValidator& validate,
           int max_attempts = -1);

  struct Attempt {
    std::optional<Json> payload;
    std::string error;
  };
  // Exactly one backend call. `feedback` is the previous failure, if any.
  Attempt ask_once(const QuerySpec& spec, int attempt, const std::string& feedback,
                   const ReplyValidator& validate);

  std::vector<CallRecord> calls() const;
  int call_count() const;
  TokenUsage usage() const;
  double backend_latency_ms() const;

  void note(std::string diagnostic);
  std::vector<std::string> diagnostics() const;

 private:
  PolicyBackend* backend_;
  std::string scenario_id_;
  int retry_limit_;
  mutable std::mutex mu_;
  std::vector<CallRecord> calls_;
  std::vector<std::string> diagnostics_;
};

// Renders the prompt for a query (first attempt when feedback is empty).
std::string render_prompt(const QuerySpec& spec, const std::string& scenario_id,
                          const std::string& feedback);
// Raw template text by name ("select", "step", ..., "system", "retry").
std::string_view prompt_template(std::string_view name);
std::vector<std::string> prompt_template_names();

// Entity names in replies may be {kind,name} objects, "kind/name" labels or
// bare names that are unique in the graph.
std::optional<EntityRef> resolve_entity(const Sdg& sdg, const Json& value);

struct CandidateSelection {
  std::vector<EntityRef> candidates;
  std::string narrative;
};

inline constexpr int kDefaultCandidates = 5;
inline constexpr int kDefaultSuggestions = 3;

CandidateSelection select_candidates(Policy& policy, const IncidentContext& incident,
                                     const Sdg& sdg, int n = kDefaultCandidates);

// "main", else the first request-handler function, else the module root.
BlockId entry_point_block(const Pdg& pdg);

BlockId match_initial_block(Policy& policy, const ObservabilityContext& context,
                            const Pdg& pdg);

// The ψ_τ payload: code for the current block and its neighbours only.
Json step_payload(const Pdg& pdg, const TraversalState& state);

// Regenerates on malformed replies and on Relate targets outside
// B_related. Throws InvalidReply.
TraversalDecision traversal_step(Policy& policy, const Pdg& pdg,
                                 const TraversalState& state);

struct StepAttempt {
  std::optional<TraversalDecision> decision;
  std::string error;
};
// One call; the traversal loop owns the retry accounting.
StepAttempt traversal_step_once(Policy& policy, const Pdg& pdg,
                                const TraversalState& state, int attempt,
                                const std::string& feedback);

ProgramContext synthesize_program_context(Policy& policy, const Pdg& pdg,
                                          const TraversalHistory& history,
                                          const ObservabilityContext& context,
                                          int max_attempts = -1);

Judgment judge_entity(Policy& policy, const ObservabilityContext& context,
                      const ProgramContext& program);

std::vector<EntityRef> suggest_entities(Policy& policy, const Judgment& judgment,
                                        const ObservabilityContext& context,
                                        const ProgramContext& program,
                                        const Sdg& sdg, int k = kDefaultSuggestions);

// Fills everything but run metadata.
RcaReport summarize(Policy& policy, const InvestigationNarrative& narrative,
                    const std::string& scenario_id);

}  // namespace graphrca
