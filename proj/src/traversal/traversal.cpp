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

#include "graphrca/traversal/traversal.hpp"

#include <algorithm>
#include <set>

#include "graphrca/common/json_util.hpp"

namespace graphrca {
namespace {

bool connected(const Pdg& pdg, const BlockId& a, const BlockId& b) {
  auto pa = pdg.parent(a);
  auto pb = pdg.parent(b);
  if ((pa && pa->id == b) || (pb && pb->id == a)) return true;
  for (const auto& n : pdg.neighbors(a, kAllEdgeKinds)) {
    if (n.block.id == b) return true;
  }
  return false;
}

ProgramContext mechanical_context(const TraversalHistory& history, const std::string& why) {
  ProgramContext ctx;
  ctx.empty = false;
  ctx.reason = why;
  std::set<BlockId> seen;
  for (const auto& r : history.records) {
    if (seen.insert(r.block).second) ctx.cited_blocks.push_back(r.block);
    if (!r.insight.empty()) {
      if (!ctx.summary.empty()) ctx.summary += " ";
      ctx.summary += r.insight;
    }
  }
  if (ctx.summary.empty()) ctx.summary = "Traversal recorded no insights.";
  return ctx;
}

}  // namespace

TraversalState make_state(const Pdg& pdg, const BlockId& current,
                          const ObservabilityContext* observability,
                          const TraversalHistory* history, int step_index) {
  TraversalState state;
  state.current = current;
  state.related = pdg.neighbors(current, kAllEdgeKinds);
  state.observability = observability;
  state.history = history;
  state.step_index = step_index;
  return state;
}

ActionResult apply_action(const Pdg& pdg, const TraversalState& state,
                          const TraversalDecision& decision) {
  switch (decision.action) {
    case ActionKind::kExpand: {
      auto parent = pdg.parent(state.current);
      if (!parent) return Inadmissible{"root has no parent"};
      return Moved{parent->id};
    }
    case ActionKind::kRelate: {
      if (!decision.target) return Inadmissible{"Relate requires target"};
      for (const auto& n : state.related) {
        if (n.block.id == *decision.target) return Moved{*decision.target};
      }
      return Inadmissible{"not in B_related"};
    }
    case ActionKind::kComplete: return Terminal{TerminalKind::kComplete};
    case ActionKind::kDiscard: return Terminal{TerminalKind::kDiscard};
  }
  return Inadmissible{"unknown action"};
}

int traversal_call_bound(const TraversalBudget& budget) {
  return budget.max_blocks * (1 + budget.retry_limit) + 2;
}

TraversalOutcome run_traversal(Policy& policy, const Pdg& pdg,
                               const ObservabilityContext& context,
                               const TraversalBudget& budget) {
  if (pdg.empty()) throw PreconditionError("program dependence graph is empty");
  if (budget.max_blocks < 1) throw PreconditionError("max_blocks must be positive");
  if (budget.retry_limit < 0) throw PreconditionError("retry_limit must be non-negative");

  const int calls_before = policy.call_count();
  TraversalOutcome out;
  TraversalHistory& history = out.history;
  out.start = match_initial_block(policy, context, pdg);
  BlockId current = out.start;

  for (int step = 0;; ++step) {
    TraversalState state = make_state(pdg, current, &context, &history, step);
    TraceStep trace{step, current, 0, std::nullopt, "", {}};
    std::optional<TraversalDecision> decision;
    ActionResult result = Inadmissible{""};
    std::string feedback;
    for (int attempt = 0; attempt <= budget.retry_limit; ++attempt) {
      ++trace.attempts;
      StepAttempt a = traversal_step_once(policy, pdg, state, attempt, feedback);
      if (!a.decision) {
        feedback = a.error;
        trace.rejections.push_back(feedback);
        continue;
      }
      result = apply_action(pdg, state, *a.decision);
      if (auto* bad = std::get_if<Inadmissible>(&result)) {
        feedback = bad->reason;
        trace.rejections.push_back(feedback);
        continue;
      }
      decision = a.decision;
      break;
    }

    if (!decision) {
      TraversalDecision forced{ActionKind::kComplete, std::nullopt,
                               "retry limit reached: " + feedback};
      history.records.push_back(HistoryRecord{current, forced.insight, forced, true, true});
      history.terminal = TerminalKind::kComplete;
      trace.decision = forced;
      trace.result = "forced:Complete";
      out.trace.push_back(std::move(trace));
      break;
    }
    trace.decision = decision;

    if (auto* t = std::get_if<Terminal>(&result)) {
      history.records.push_back(HistoryRecord{current, decision->insight, *decision});
      history.terminal = t->kind;
      trace.result = "terminal:" + std::string(to_string(t->kind));
      out.trace.push_back(std::move(trace));
      break;
    }

    const BlockId next = std::get<Moved>(result).next;
    // Exhaustion: the move goes nowhere new and nothing new is reachable.
    auto seen = [&](const BlockId& id) { return id == current || history.visited(id); };
    bool all_seen = std::all_of(state.related.begin(), state.related.end(),
                                [&](const Neighbor& n) { return seen(n.block.id); });
    if (auto parent = pdg.parent(current)) all_seen = all_seen && seen(parent->id);
    if (seen(next) && all_seen) {
      history.records.push_back(
          HistoryRecord{current, decision->insight, *decision, false, false});
      history.terminal = TerminalKind::kExhausted;
      trace.result = "terminal:Exhausted";
      out.trace.push_back(std::move(trace));
      break;
    }

    history.records.push_back(HistoryRecord{current, decision->insight, *decision});
    if (static_cast<int>(history.records.size()) >= budget.max_blocks) {
      history.records.back().applied = false;
      history.terminal = TerminalKind::kBudget;
      trace.result = "terminal:Budget";
      out.trace.push_back(std::move(trace));
      break;
    }
    trace.result = "moved:" + next.value;
    out.trace.push_back(std::move(trace));
    current = next;
  }

  const int used = policy.call_count() - calls_before;
  const int remaining = traversal_call_bound(budget) - used;
  if (*history.terminal == TerminalKind::kDiscard) {
    out.program = synthesize_program_context(policy, pdg, history, context);
  } else if (remaining <= 0) {
    out.program = mechanical_context(history, "call budget spent before synthesis");
  } else {
    try {
      out.program = synthesize_program_context(
          policy, pdg, history, context, std::min(1 + policy.retry_limit(), remaining));
    } catch (const InvalidReply& e) {
      out.diagnostics.push_back(e.what());
      out.program = mechanical_context(history, "synthesis reply rejected");
    }
  }
  out.policy_calls = policy.call_count() - calls_before;
  return out;
}

std::optional<std::size_t> first_inadmissible_step(const Pdg& pdg,
                                                   const TraversalHistory& history) {
  for (std::size_t i = 0; i < history.records.size(); ++i) {
    if (!pdg.contains(history.records[i].block)) return i;
    if (i + 1 == history.records.size()) break;
    const BlockId& a = history.records[i].block;
    const BlockId& b = history.records[i + 1].block;
    if (!connected(pdg, a, b)) return i;
  }
  return std::nullopt;
}

std::string trace_to_jsonl(const std::vector<TraceStep>& trace) {
  std::string out;
  for (const auto& t : trace) {
    Json rejections = Json::array();
    for (const auto& r : t.rejections) rejections.push_back(r);
    Json row{{"step", t.step},
             {"block", t.block.value},
             {"attempts", t.attempts},
             {"decision", t.decision ? decision_to_json(*t.decision) : Json(nullptr)},
             {"result", t.result},
             {"rejections", std::move(rejections)}};
    out += row.dump() + "\n";
  }
  return out;
}

void write_trace(const std::filesystem::path& path, const std::vector<TraceStep>& trace) {
  write_file(path, trace_to_jsonl(trace));
}

}  // namespace graphrca
