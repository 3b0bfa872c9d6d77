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

// The PDG traversal loop: start at the matched block, ask the policy for one
// of the four tools per step, apply it, and stop on Complete, Discard,
// exhaustion or budget.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "graphrca/graph/pdg.hpp"
#include "graphrca/observability/observability.hpp"
#include "graphrca/policy/policy.hpp"
#include "graphrca/policy/types.hpp"

namespace graphrca {

struct Moved {
  BlockId next;
  bool operator==(const Moved&) const = default;
};
struct Terminal {
  TerminalKind kind;
  bool operator==(const Terminal&) const = default;
};
struct Inadmissible {
  std::string reason;
  bool operator==(const Inadmissible&) const = default;
};
using ActionResult = std::variant<Moved, Terminal, Inadmissible>;

// related = all neighbours of `current` over every edge kind.
TraversalState make_state(const Pdg& pdg, const BlockId& current,
                          const ObservabilityContext* observability,
                          const TraversalHistory* history, int step_index);

// Pure: depends only on its arguments.
ActionResult apply_action(const Pdg& pdg, const TraversalState& state,
                          const TraversalDecision& decision);

// One line per step of the trace export.
struct TraceStep {
  int step = 0;
  BlockId block;
  int attempts = 0;
  std::optional<TraversalDecision> decision;
  std::string result;  // "moved:<id>", "terminal:<kind>", "forced", ...
  std::vector<std::string> rejections;
};

struct TraversalOutcome {
  TraversalHistory history;
  ProgramContext program;
  BlockId start;
  std::vector<TraceStep> trace;
  int policy_calls = 0;
  std::vector<std::string> diagnostics;
};

// Upper bound on policy calls for one traversal.
int traversal_call_bound(const TraversalBudget& budget);

// Throws PolicyUnavailable; every other failure ends in a terminal kind.
TraversalOutcome run_traversal(Policy& policy, const Pdg& pdg,
                               const ObservabilityContext& context,
                               const TraversalBudget& budget = {});

// Consecutive records are joined by a containment-parent link or a
// dependence edge. Returns the index of the first bad pair, if any.
std::optional<std::size_t> first_inadmissible_step(const Pdg& pdg,
                                                   const TraversalHistory& history);

std::string trace_to_jsonl(const std::vector<TraceStep>& trace);
void write_trace(const std::filesystem::path& path, const std::vector<TraceStep>& trace);

}  // namespace graphrca
