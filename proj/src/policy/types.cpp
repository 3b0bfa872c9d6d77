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

#include "graphrca/policy/types.hpp"

#include <algorithm>
#include <sstream>

#include "graphrca/common/error.hpp"

namespace graphrca {
namespace {

Json entity_array(const std::vector<EntityRef>& entities) {
  Json out = Json::array();
  for (const auto& e : entities) out.push_back(entity_to_json(e));
  return out;
}

Json string_array(const std::vector<std::string>& items) {
  Json out = Json::array();
  for (const auto& s : items) out.push_back(s);
  return out;
}

std::vector<EntityRef> entities_from(const Json& doc, std::string_view key) {
  std::vector<EntityRef> out;
  for (const auto& item : require_array(doc, key, "report")) {
    out.push_back(entity_from_json(item, "report"));
  }
  return out;
}

EntityRef entity_from_label(const std::string& label) {
  auto slash = label.find('/');
  if (slash == std::string::npos) {
    throw SchemaViolation("report: bad entity label '" + label + "'");
  }
  auto kind = parse_entity_kind(label.substr(0, slash));
  if (!kind) throw SchemaViolation("report: bad entity kind in '" + label + "'");
  return EntityRef{*kind, label.substr(slash + 1)};
}

}  // namespace

std::string_view to_string(ActionKind kind) {
  switch (kind) {
    case ActionKind::kExpand: return "Expand";
    case ActionKind::kRelate: return "Relate";
    case ActionKind::kComplete: return "Complete";
    case ActionKind::kDiscard: return "Discard";
  }
  return "?";
}

std::optional<ActionKind> parse_action_kind(std::string_view text) {
  if (text == "Expand") return ActionKind::kExpand;
  if (text == "Relate") return ActionKind::kRelate;
  if (text == "Complete") return ActionKind::kComplete;
  if (text == "Discard") return ActionKind::kDiscard;
  return std::nullopt;
}

Json decision_to_json(const TraversalDecision& decision) {
  Json doc{{"action", to_string(decision.action)}, {"insight", decision.insight}};
  doc["target"] = decision.target ? Json(decision.target->value) : Json(nullptr);
  return doc;
}

std::string_view to_string(JudgmentLabel label) {
  switch (label) {
    case JudgmentLabel::kPrimaryFailure: return "PrimaryFailure";
    case JudgmentLabel::kSymptomOnly: return "SymptomOnly";
    case JudgmentLabel::kUnrelated: return "Unrelated";
  }
  return "?";
}

std::optional<JudgmentLabel> parse_judgment_label(std::string_view text) {
  if (text == "PrimaryFailure") return JudgmentLabel::kPrimaryFailure;
  if (text == "SymptomOnly") return JudgmentLabel::kSymptomOnly;
  if (text == "Unrelated") return JudgmentLabel::kUnrelated;
  return std::nullopt;
}

Json judgment_to_json(const Judgment& judgment) {
  return Json{{"label", to_string(judgment.label)},
              {"reasoning", judgment.reasoning},
              {"cited_evidence", string_array(judgment.cited_evidence)}};
}

Json program_context_to_json(const ProgramContext& context) {
  Json cited = Json::array();
  for (const auto& id : context.cited_blocks) cited.push_back(id.value);
  return Json{{"empty", context.empty},
              {"reason", context.reason},
              {"summary", context.summary},
              {"cited_blocks", std::move(cited)},
              {"dependencies", string_array(context.dependencies)}};
}

std::string_view to_string(TerminalKind kind) {
  switch (kind) {
    case TerminalKind::kComplete: return "Complete";
    case TerminalKind::kDiscard: return "Discard";
    case TerminalKind::kBudget: return "Budget";
    case TerminalKind::kExhausted: return "Exhausted";
  }
  return "?";
}

bool TraversalHistory::visited(const BlockId& id) const {
  return std::any_of(records.begin(), records.end(),
                     [&](const HistoryRecord& r) { return r.block == id; });
}

Json history_to_json(const TraversalHistory& history) {
  Json records = Json::array();
  for (const auto& r : history.records) {
    records.push_back(Json{{"block", r.block.value},
                           {"insight", r.insight},
                           {"action", decision_to_json(r.action)},
                           {"forced", r.forced},
                           {"applied", r.applied}});
  }
  return Json{{"records", std::move(records)},
              {"terminal", history.terminal ? Json(to_string(*history.terminal))
                                            : Json(nullptr)}};
}

Json finding_to_json(const EntityFinding& finding) {
  return Json{{"entity", entity_to_json(finding.entity)},
              {"judgment", judgment_to_json(finding.judgment)},
              {"observability_digest", finding.observability_digest},
              {"program_context_digest", finding.program_context_digest},
              {"program_summary", finding.program_summary},
              {"trace", finding.trace_locator ? Json(*finding.trace_locator)
                                              : Json(nullptr)},
              {"repeat_implications", entity_array(finding.repeat_implications)},
              {"diagnostics", string_array(finding.diagnostics)}};
}

Json narrative_to_json(const InvestigationNarrative& narrative) {
  Json findings = Json::array();
  for (const auto& f : narrative.findings) findings.push_back(finding_to_json(f));
  return Json{{"initial", narrative.initial}, {"findings", std::move(findings)}};
}

Json report_to_json(const RcaReport& report) {
  Json per_entity = Json::object();
  for (const auto& [entity, verdict] : report.per_entity) {
    per_entity[entity.label()] = Json{{"label", to_string(verdict.label)},
                                      {"justification", verdict.justification},
                                      {"evidence", string_array(verdict.evidence)}};
  }
  const RunMetadata& m = report.metadata;
  return Json{
      {"version", 1},
      {"scenario_id", report.scenario_id},
      {"root_cause_entities", entity_array(report.root_cause_entities)},
      {"per_entity", std::move(per_entity)},
      {"propagation_chain", entity_array(report.propagation_chain)},
      {"root_cause_reasoning", report.root_cause_reasoning},
      {"remediation_hint",
       report.remediation_hint ? Json(*report.remediation_hint) : Json(nullptr)},
      {"inconclusive", report.inconclusive},
      {"diagnostics", string_array(report.diagnostics)},
      {"metadata", Json{{"seed", m.seed},
                        {"backend", m.backend},
                        {"prompt_tokens", m.prompt_tokens},
                        {"completion_tokens", m.completion_tokens},
                        {"wall_time_ms", m.wall_time_ms},
                        {"calls", m.calls}}}};
}

RcaReport report_from_json(const Json& doc) {
  const std::string ctx = "report";
  if (!doc.is_object()) throw SchemaViolation("report must be an object");
  if (require_int(doc, "version", ctx) != 1) {
    throw SchemaViolation("report: unsupported version");
  }
  RcaReport report;
  report.scenario_id = optional_string(doc, "scenario_id");
  report.root_cause_entities = entities_from(doc, "root_cause_entities");
  report.propagation_chain = entities_from(doc, "propagation_chain");
  const Json& per_entity = require(doc, "per_entity", ctx);
  if (!per_entity.is_object()) throw SchemaViolation("report: per_entity must be an object");
  for (const auto& [label, body] : per_entity.items()) {
    EntityVerdict verdict;
    auto parsed = parse_judgment_label(require_string(body, "label", ctx));
    if (!parsed) throw SchemaViolation("report: bad judgment label for " + label);
    verdict.label = *parsed;
    verdict.justification = optional_string(body, "justification");
    if (auto it = body.find("evidence"); it != body.end() && it->is_array()) {
      for (const auto& e : *it) verdict.evidence.push_back(e.get<std::string>());
    }
    report.per_entity[entity_from_label(label)] = std::move(verdict);
  }
  report.root_cause_reasoning = optional_string(doc, "root_cause_reasoning");
  if (auto it = doc.find("remediation_hint"); it != doc.end() && it->is_string()) {
    report.remediation_hint = it->get<std::string>();
  }
  if (auto it = doc.find("inconclusive"); it != doc.end() && it->is_boolean()) {
    report.inconclusive = it->get<bool>();
  }
  if (auto it = doc.find("diagnostics"); it != doc.end() && it->is_array()) {
    for (const auto& d : *it) report.diagnostics.push_back(d.get<std::string>());
  }
  if (auto it = doc.find("metadata"); it != doc.end() && it->is_object()) {
    const Json& m = *it;
    report.metadata.seed = m.value("seed", std::int64_t{0});
    report.metadata.backend = m.value("backend", std::string());
    report.metadata.prompt_tokens = m.value("prompt_tokens", std::int64_t{0});
    report.metadata.completion_tokens = m.value("completion_tokens", std::int64_t{0});
    report.metadata.wall_time_ms = m.value("wall_time_ms", std::int64_t{0});
    report.metadata.calls = m.value("calls", 0);
  }
  return report;
}

std::string report_to_markdown(const RcaReport& report) {
  std::ostringstream out;
  out << "# RCA report: " << report.scenario_id << "\n\n";
  out << "## Root cause\n\n";
  if (report.inconclusive) {
    out << "Inconclusive: no entity was judged a primary failure.\n\n";
  } else {
    for (const auto& e : report.root_cause_entities) out << "- `" << e.label() << "`\n";
    out << "\n";
  }
  if (!report.root_cause_reasoning.empty()) {
    out << report.root_cause_reasoning << "\n\n";
  }
  if (!report.propagation_chain.empty()) {
    out << "## Propagation\n\n";
    for (std::size_t i = 0; i < report.propagation_chain.size(); ++i) {
      out << (i ? " -> " : "") << report.propagation_chain[i].label();
    }
    out << "\n\n";
  }
  out << "## Entities\n\n| entity | judgment | justification |\n|---|---|---|\n";
  for (const auto& [entity, verdict] : report.per_entity) {
    std::string text = verdict.justification;
    std::replace(text.begin(), text.end(), '\n', ' ');
    std::replace(text.begin(), text.end(), '|', '/');
    out << "| " << entity.label() << " | " << to_string(verdict.label) << " | "
        << text << " |\n";
  }
  if (report.remediation_hint) {
    out << "\n## Remediation\n\n" << *report.remediation_hint << "\n";
  }
  const RunMetadata& m = report.metadata;
  out << "\n## Run\n\n- backend: " << m.backend << "\n- seed: " << m.seed
      << "\n- tokens: " << m.prompt_tokens << " prompt, " << m.completion_tokens
      << " completion\n- wall time: " << m.wall_time_ms << " ms\n";
  return out.str();
}

}  // namespace graphrca
