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

// Value types exchanged between the policy, the traversal loop and the
// orchestrator: decisions, judgments, program contexts, traversal state and
// history, the investigation narrative and the final report.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "graphrca/common/json_util.hpp"
#include "graphrca/graph/pdg.hpp"
#include "graphrca/graph/sdg.hpp"
#include "graphrca/observability/observability.hpp"

namespace graphrca {

enum class ActionKind { kExpand, kRelate, kComplete, kDiscard };

std::string_view to_string(ActionKind kind);
std::optional<ActionKind> parse_action_kind(std::string_view text);

struct TraversalDecision {
  ActionKind action = ActionKind::kComplete;
  std::optional<BlockId> target;  // Relate only
  std::string insight;

  bool operator==(const TraversalDecision&) const = default;
};

Json decision_to_json(const TraversalDecision& decision);

enum class JudgmentLabel { kPrimaryFailure, kSymptomOnly, kUnrelated };

std::string_view to_string(JudgmentLabel label);
std::optional<JudgmentLabel> parse_judgment_label(std::string_view text);

struct Judgment {
  JudgmentLabel label = JudgmentLabel::kUnrelated;
  std::string reasoning;
  std::vector<std::string> cited_evidence;

  bool operator==(const Judgment&) const = default;
};

Json judgment_to_json(const Judgment& judgment);

// The synthesized C_P. `empty` marks an explicitly empty context (Discard,
// no code available); `reason` says why.
struct ProgramContext {
  bool empty = true;
  std::string reason;
  std::string summary;
  std::vector<BlockId> cited_blocks;
  std::vector<std::string> dependencies;  // free-form "a -> b" notes

  static ProgramContext empty_because(std::string why) {
    ProgramContext ctx;
    ctx.reason = std::move(why);
    return ctx;
  }
};

Json program_context_to_json(const ProgramContext& context);

enum class TerminalKind { kComplete, kDiscard, kBudget, kExhausted };

std::string_view to_string(TerminalKind kind);

struct HistoryRecord {
  BlockId block;
  std::string insight;
  TraversalDecision action;
  // Set when the engine replaced the policy's answer with Complete after
  // the retry limit was spent.
  bool forced = false;
  // False for the final record of an Exhausted or Budget run, whose move was
  // not carried out.
  bool applied = true;
};

struct TraversalHistory {
  std::vector<HistoryRecord> records;
  std::optional<TerminalKind> terminal;

  bool visited(const BlockId& id) const;
};

Json history_to_json(const TraversalHistory& history);

struct TraversalState {
  BlockId current;
  std::vector<Neighbor> related;
  const ObservabilityContext* observability = nullptr;
  const TraversalHistory* history = nullptr;
  int step_index = 0;
};

struct TraversalBudget {
  int max_blocks = 25;
  int retry_limit = 3;
};

struct EntityFinding {
  EntityRef entity;
  Judgment judgment;
  std::string observability_digest;
  std::string program_context_digest;
  std::string program_summary;
  std::optional<std::string> trace_locator;
  // Entities implicated again after they had been investigated.
  std::vector<EntityRef> repeat_implications;
  std::vector<std::string> diagnostics;
};

Json finding_to_json(const EntityFinding& finding);

struct InvestigationNarrative {
  std::string initial;
  std::vector<EntityFinding> findings;
};

Json narrative_to_json(const InvestigationNarrative& narrative);

struct EntityVerdict {
  JudgmentLabel label = JudgmentLabel::kUnrelated;
  std::string justification;
  std::vector<std::string> evidence;
};

struct RunMetadata {
  std::int64_t seed = 0;
  std::string backend;
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
  std::int64_t wall_time_ms = 0;
  int calls = 0;
};

struct RcaReport {
  std::string scenario_id;
  std::vector<EntityRef> root_cause_entities;
  std::map<EntityRef, EntityVerdict> per_entity;
  std::vector<EntityRef> propagation_chain;
  std::string root_cause_reasoning;
  std::optional<std::string> remediation_hint;
  bool inconclusive = false;
  RunMetadata metadata;
  std::vector<std::string> diagnostics;
};

Json report_to_json(const RcaReport& report);
RcaReport report_from_json(const Json& doc);
std::string report_to_markdown(const RcaReport& report);

}  // namespace graphrca
