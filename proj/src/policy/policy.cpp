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

#include "graphrca/policy/policy.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace graphrca {

namespace detail {
const std::map<std::string, std::string_view>& embedded_prompts();
}  // namespace detail

namespace {

constexpr std::string_view kFence = "```rca-json";

const Json& field(const Json& doc, const char* key, std::string_view what) {
  auto it = doc.find(key);
  if (it == doc.end()) throw Retryable(std::string(what) + " requires '" + key + "'");
  return *it;
}

std::string string_field(const Json& doc, const char* key, std::string_view what,
                         bool non_empty) {
  const Json& v = field(doc, key, what);
  if (!v.is_string()) throw Retryable(std::string("'") + key + "' must be a string");
  std::string s = v.get<std::string>();
  if (non_empty && s.empty()) throw Retryable(std::string("'") + key + "' is empty");
  return s;
}

void check_string_array(const Json& doc, const char* key, bool required) {
  auto it = doc.find(key);
  if (it == doc.end()) {
    if (required) throw Retryable(std::string("reply requires '") + key + "'");
    return;
  }
  if (!it->is_array()) throw Retryable(std::string("'") + key + "' must be a list");
  for (const auto& item : *it) {
    if (!item.is_string()) {
      throw Retryable(std::string("'") + key + "' must hold strings");
    }
  }
}

void check_entity_array(const Json& doc, const char* key) {
  const Json& v = field(doc, key, "reply");
  if (!v.is_array()) throw Retryable(std::string("'") + key + "' must be a list");
  for (const auto& item : v) {
    if (!item.is_string() && !(item.is_object() && item.contains("name"))) {
      throw Retryable(std::string("'") + key + "' entries must name entities");
    }
  }
}

std::string describe(const Json& value) {
  return value.is_string() ? value.get<std::string>() : value.dump();
}

Json graph_labels(const Sdg& sdg) {
  Json out = Json::array();
  for (const auto& e : sdg.nodes()) out.push_back(e.label());
  return out;
}

std::optional<EntityRef> resolve_among(const std::vector<EntityRef>& pool,
                                       const Json& value) {
  std::vector<EntityRef> hits;
  for (const auto& e : pool) {
    if (value.is_string()) {
      std::string s = value.get<std::string>();
      if (s == e.label() || s == e.name) hits.push_back(e);
    } else if (value.is_object()) {
      std::string name = value.value("name", std::string());
      std::string kind = value.value("kind", std::string(to_string(e.kind)));
      if (name == e.name && kind == to_string(e.kind)) hits.push_back(e);
    }
  }
  if (hits.size() == 1) return hits.front();
  // A full label wins over a bare-name collision.
  for (const auto& e : hits) {
    if (value.is_string() && value.get<std::string>() == e.label()) return e;
  }
  return std::nullopt;
}

std::string substitute(std::string_view text, const std::map<std::string, std::string>& vars) {
  std::string out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto open = text.find("{{", pos);
    if (open == std::string_view::npos) break;
    auto close = text.find("}}", open + 2);
    if (close == std::string_view::npos) break;
    out.append(text.substr(pos, open - pos));
    std::string key(text.substr(open + 2, close - open - 2));
    if (auto it = vars.find(key); it != vars.end()) {
      out += it->second;
    } else {
      out.append(text.substr(open, close + 2 - open));
    }
    pos = close + 2;
  }
  out.append(text.substr(pos));
  return out;
}

bool is_handler(const HammockBlock& b) {
  return b.kind == BlockKind::kFunctionDef && b.code_text.rfind("@handler", 0) == 0;
}

Json block_summary(const HammockBlock& b) {
  return Json{{"id", b.id.value},
              {"kind", to_string(b.kind)},
              {"granularity", to_string(b.granularity)},
              {"name", b.name ? Json(*b.name) : Json(nullptr)},
              {"span", Json{{"file", b.span.file}, {"start", b.span.start},
                            {"end", b.span.end}}},
              {"string_literals", b.string_literals}};
}

std::vector<HammockBlock> blocks_in_source_order(const Pdg& pdg) {
  std::vector<HammockBlock> blocks;
  for (const auto& [id, b] : pdg.blocks()) blocks.push_back(b);
  std::sort(blocks.begin(), blocks.end(), [](const HammockBlock& a, const HammockBlock& b) {
    return std::tie(a.span.file, a.span.start, a.id) <
           std::tie(b.span.file, b.span.start, b.id);
  });
  return blocks;
}

Json history_records_json(const TraversalHistory& history) {
  Json records = Json::array();
  for (const auto& r : history.records) {
    records.push_back(Json{{"block", r.block.value},
                           {"insight", r.insight},
                           {"action", decision_to_json(r.action)}});
  }
  return records;
}

}  // namespace

Json parse_structured_reply(std::string_view raw, QueryKind kind) {
  auto first = raw.find(kFence);
  if (first == std::string_view::npos) throw Retryable("missing structured section");
  if (raw.find(kFence, first + kFence.size()) != std::string_view::npos) {
    throw Retryable("more than one structured section");
  }
  auto body_start = raw.find('\n', first);
  if (body_start == std::string_view::npos) {
    throw Retryable("unterminated structured section");
  }
  auto close = raw.find("```", body_start);
  if (close == std::string_view::npos) throw Retryable("unterminated structured section");
  Json doc = Json::parse(raw.substr(body_start + 1, close - body_start - 1), nullptr,
                         /*allow_exceptions=*/false);
  if (doc.is_discarded()) throw Retryable("structured section is not valid JSON");
  if (!doc.is_object()) throw Retryable("structured section must be a JSON object");

  switch (kind) {
    case QueryKind::kSelect:
      check_entity_array(doc, "candidates");
      string_field(doc, "narrative", "select reply", true);
      break;
    case QueryKind::kMatch:
      check_string_array(doc, "matches", true);
      break;
    case QueryKind::kStep:
      decision_from_payload(doc);
      break;
    case QueryKind::kSynthesize:
      string_field(doc, "summary", "synthesis reply", true);
      check_string_array(doc, "cited_blocks", true);
      check_string_array(doc, "dependencies", false);
      break;
    case QueryKind::kJudge: {
      std::string label = string_field(doc, "label", "judgment", false);
      if (!parse_judgment_label(label)) {
        throw Retryable("unknown judgment label '" + label + "'");
      }
      string_field(doc, "reasoning", "judgment", true);
      check_string_array(doc, "cited_evidence", false);
      break;
    }
    case QueryKind::kSuggest:
      check_entity_array(doc, "entities");
      break;
    case QueryKind::kSummary: {
      check_entity_array(doc, "root_causes");
      check_entity_array(doc, "propagation_chain");
      string_field(doc, "reasoning", "summary", true);
      auto it = doc.find("remediation");
      if (it != doc.end() && !it->is_null() && !it->is_string()) {
        throw Retryable("'remediation' must be a string");
      }
      break;
    }
  }
  return doc;
}

TraversalDecision decision_from_payload(const Json& payload) {
  std::string action = string_field(payload, "action", "action reply", false);
  auto kind = parse_action_kind(action);
  if (!kind) throw Retryable("unknown action '" + action + "'");
  TraversalDecision decision;
  decision.action = *kind;
  auto target = payload.find("target");
  bool has_target = target != payload.end() && !target->is_null();
  if (*kind == ActionKind::kRelate) {
    if (!has_target || !target->is_string() || target->get<std::string>().empty()) {
      throw Retryable("Relate requires target");
    }
    decision.target = BlockId{target->get<std::string>()};
  } else if (has_target) {
    throw Retryable(action + " takes no target");
  }
  auto insight = payload.find("insight");
  if (insight != payload.end() && !insight->is_null()) {
    if (!insight->is_string()) throw Retryable("'insight' must be a string");
    decision.insight = insight->get<std::string>();
  }
  return decision;
}

std::string_view prompt_template(std::string_view name) {
  const auto& table = detail::embedded_prompts();
  auto it = table.find(std::string(name));
  if (it == table.end()) throw PreconditionError("no prompt template '" + std::string(name) + "'");
  return it->second;
}

std::vector<std::string> prompt_template_names() {
  std::vector<std::string> names;
  for (const auto& [name, text] : detail::embedded_prompts()) names.push_back(name);
  return names;
}

std::string render_prompt(const QuerySpec& spec, const std::string& scenario_id,
                          const std::string& feedback) {
  std::map<std::string, std::string> vars{
      {"scenario", scenario_id},
      {"entity", spec.entity},
      {"block", spec.block},
      {"step", std::to_string(spec.step)},
      {"payload", canonical_dump(spec.payload)},
  };
  if (auto it = spec.payload.find("limit"); it != spec.payload.end()) {
    vars["limit"] = it->dump();
  }
  std::string text = substitute(prompt_template(to_string(spec.kind)), vars);
  if (!feedback.empty()) {
    text += substitute(prompt_template("retry"), {{"reason", feedback}});
  }
  return text;
}

Policy::Policy(PolicyBackend& backend, std::string scenario_id, int retry_limit)
    : backend_(&backend), scenario_id_(std::move(scenario_id)), retry_limit_(retry_limit) {
  if (retry_limit < 0) throw PreconditionError("retry limit must be non-negative");
}

Policy::Attempt Policy::ask_once(const QuerySpec& spec, int attempt,
                                 const std::string& feedback,
                                 const ReplyValidator& validate) {
  const std::string system(prompt_template("system"));
  const std::string prompt = render_prompt(spec, scenario_id_, feedback);
  BackendRequest request;
  request.kind = spec.kind;
  request.scenario_id = scenario_id_;
  request.entity = spec.entity;
  request.block = spec.block;
  request.step = spec.step;
  request.attempt = attempt;
  request.system_prompt = system;
  request.prompt = prompt;
  request.payload = &spec.payload;

  BackendReply reply = backend_->complete(request);

  Attempt result;
  try {
    Json parsed = parse_structured_reply(reply.text, spec.kind);
    result.payload = validate ? validate(parsed) : parsed;
  } catch (const Retryable& e) {
    result.error = e.what();
  }
  std::lock_guard lock(mu_);
  calls_.push_back(CallRecord{spec.kind, spec.entity, spec.block, attempt, reply.usage,
                              reply.latency_ms, result.error});
  return result;
}

Json Policy::ask(const QuerySpec& spec, const ReplyValidator& validate,
                 int max_attempts) {
  const int attempts = max_attempts < 0 ? 1 + retry_limit_ : max_attempts;
  std::string feedback;
  for (int i = 0; i < attempts; ++i) {
    Attempt a = ask_once(spec, i, feedback, validate);
    if (a.payload) return *a.payload;
    feedback = a.error;
  }
  throw InvalidReply(std::string(to_string(spec.kind)) + " reply rejected after " +
                         std::to_string(attempts) + " attempts: " + feedback,
                     attempts);
}

std::vector<CallRecord> Policy::calls() const {
  std::lock_guard lock(mu_);
  return calls_;
}

int Policy::call_count() const {
  std::lock_guard lock(mu_);
  return static_cast<int>(calls_.size());
}

TokenUsage Policy::usage() const {
  std::lock_guard lock(mu_);
  TokenUsage total;
  for (const auto& c : calls_) {
    total.prompt_tokens += c.usage.prompt_tokens;
    total.completion_tokens += c.usage.completion_tokens;
  }
  return total;
}

double Policy::backend_latency_ms() const {
  std::lock_guard lock(mu_);
  double total = 0;
  for (const auto& c : calls_) total += c.latency_ms;
  return total;
}

void Policy::note(std::string diagnostic) {
  std::lock_guard lock(mu_);
  diagnostics_.push_back(std::move(diagnostic));
}

std::vector<std::string> Policy::diagnostics() const {
  std::lock_guard lock(mu_);
  return diagnostics_;
}

std::optional<EntityRef> resolve_entity(const Sdg& sdg, const Json& value) {
  std::vector<EntityRef> pool(sdg.nodes().begin(), sdg.nodes().end());
  return resolve_among(pool, value);
}

CandidateSelection select_candidates(Policy& policy, const IncidentContext& incident,
                                     const Sdg& sdg, int n) {
  if (incident.alerts.empty()) throw PreconditionError("incident has no alerts");
  if (n < 1) throw PreconditionError("candidate cap must be positive");
  if (sdg.nodes().empty()) throw PreconditionError("service dependency graph is empty");

  QuerySpec spec;
  spec.kind = QueryKind::kSelect;
  spec.payload = Json{{"incident", incident_to_json(incident)},
                      {"entities", graph_labels(sdg)},
                      {"limit", n}};
  const bool single = sdg.nodes().size() == 1;
  Json reply = policy.ask(spec, [&](const Json& doc) {
    Json names = Json::array();
    if (single) {
      names.push_back(sdg.nodes().begin()->label());
    } else {
      std::set<EntityRef> seen;
      for (const auto& item : doc["candidates"]) {
        auto e = resolve_entity(sdg, item);
        if (!e) throw Retryable("'" + describe(item) + "' is not in the service dependency graph");
        if (seen.insert(*e).second) names.push_back(e->label());
      }
    }
    if (names.empty()) throw Retryable("at least one candidate is required");
    while (static_cast<int>(names.size()) > n) names.erase(names.size() - 1);
    Json out = doc;
    out["candidates"] = names;
    return out;
  });

  CandidateSelection selection;
  for (const auto& label : reply["candidates"]) {
    selection.candidates.push_back(*resolve_entity(sdg, label));
  }
  selection.narrative = reply["narrative"].get<std::string>();
  return selection;
}

BlockId entry_point_block(const Pdg& pdg) {
  if (pdg.empty()) throw PreconditionError("program dependence graph is empty");
  const auto ordered = blocks_in_source_order(pdg);
  for (const auto& b : ordered) {
    if (b.kind == BlockKind::kFunctionDef && b.name && *b.name == "main") return b.id;
  }
  for (const auto& b : ordered) {
    if (is_handler(b)) return b.id;
  }
  for (const auto& b : ordered) {
    if (b.kind == BlockKind::kModule && !pdg.parent(b.id)) return b.id;
  }
  return pdg.roots().front();
}

BlockId match_initial_block(Policy& policy, const ObservabilityContext& context,
                            const Pdg& pdg) {
  const BlockId fallback = entry_point_block(pdg);
  if (context.signal_free()) return fallback;

  Json inventory = Json::array();
  for (const auto& b : blocks_in_source_order(pdg)) inventory.push_back(block_summary(b));
  QuerySpec spec;
  spec.kind = QueryKind::kMatch;
  spec.entity = context.entity.label();
  spec.payload = Json{{"observability", observability_to_json(context)},
                      {"blocks", std::move(inventory)}};
  Policy::Attempt a = policy.ask_once(spec, 0, "", nullptr);
  if (!a.payload) {
    policy.note("match: " + a.error + "; using entry point");
    return fallback;
  }
  std::set<std::string> ids;
  for (const auto& m : (*a.payload)["matches"]) ids.insert(m.get<std::string>());
  if (ids.size() != 1) {
    if (ids.size() > 1) policy.note("match: ambiguous reply; using entry point");
    return fallback;
  }
  BlockId chosen{*ids.begin()};
  if (!pdg.contains(chosen)) {
    policy.note("match: unknown block '" + chosen.value + "'; using entry point");
    return fallback;
  }
  return chosen;
}

Json step_payload(const Pdg& pdg, const TraversalState& state) {
  const HammockBlock& current = pdg.block(state.current);
  Json related = Json::array();
  for (const auto& n : state.related) {
    related.push_back(Json{{"block", block_to_json(n.block)},
                           {"edge", to_string(n.edge.kind)},
                           {"label", n.edge.label ? Json(*n.edge.label) : Json(nullptr)},
                           {"direction", to_string(n.direction)}});
  }
  auto parent = pdg.parent(state.current);
  return Json{
      {"current", block_to_json(current)},
      {"parent", parent ? Json(parent->id.value) : Json(nullptr)},
      {"related", std::move(related)},
      {"observability", state.observability ? observability_to_json(*state.observability)
                                            : Json(nullptr)},
      {"history", state.history ? history_records_json(*state.history) : Json::array()},
      {"step", state.step_index}};
}

namespace {

QuerySpec step_spec(const Pdg& pdg, const TraversalState& state) {
  QuerySpec spec;
  spec.kind = QueryKind::kStep;
  spec.entity = state.observability ? state.observability->entity.label() : pdg.service();
  spec.block = state.current.value;
  spec.step = state.step_index;
  spec.payload = step_payload(pdg, state);
  return spec;
}

ReplyValidator step_validator(const Pdg& pdg) {
  return [&pdg](const Json& doc) {
    TraversalDecision d = decision_from_payload(doc);
    if (d.target && !pdg.contains(*d.target)) {
      throw Retryable("block '" + d.target->value + "' does not exist");
    }
    return doc;
  };
}

}  // namespace

StepAttempt traversal_step_once(Policy& policy, const Pdg& pdg,
                                const TraversalState& state, int attempt,
                                const std::string& feedback) {
  Policy::Attempt a =
      policy.ask_once(step_spec(pdg, state), attempt, feedback, step_validator(pdg));
  StepAttempt out;
  if (a.payload) {
    out.decision = decision_from_payload(*a.payload);
  } else {
    out.error = a.error;
  }
  return out;
}

TraversalDecision traversal_step(Policy& policy, const Pdg& pdg,
                                 const TraversalState& state) {
  if (!pdg.contains(state.current)) throw UnknownBlock(state.current.value);
  auto base = step_validator(pdg);
  Json reply = policy.ask(step_spec(pdg, state), [&](const Json& doc) {
    Json out = base(doc);
    TraversalDecision d = decision_from_payload(out);
    if (d.target) {
      bool related = std::any_of(state.related.begin(), state.related.end(),
                                 [&](const Neighbor& n) { return n.block.id == *d.target; });
      if (!related) throw Retryable("'" + d.target->value + "' is not in B_related");
    }
    return out;
  });
  return decision_from_payload(reply);
}

ProgramContext synthesize_program_context(Policy& policy, const Pdg& pdg,
                                          const TraversalHistory& history,
                                          const ObservabilityContext& context,
                                          int max_attempts) {
  if (!history.terminal) throw PreconditionError("traversal history is not terminal");
  if (*history.terminal == TerminalKind::kDiscard) {
    std::string why = "traversal discarded";
    if (!history.records.empty() && !history.records.back().insight.empty()) {
      why += ": " + history.records.back().insight;
    }
    return ProgramContext::empty_because(why);
  }
  Json visited = Json::array();
  std::set<std::string> ids;
  for (const auto& r : history.records) {
    if (ids.insert(r.block.value).second && pdg.contains(r.block)) {
      visited.push_back(block_summary(pdg.block(r.block)));
    }
  }
  QuerySpec spec;
  spec.kind = QueryKind::kSynthesize;
  spec.entity = context.entity.label();
  spec.payload = Json{{"history", history_records_json(history)},
                      {"terminal", to_string(*history.terminal)},
                      {"visited_blocks", std::move(visited)},
                      {"observability", observability_to_json(context)}};
  Json reply = policy.ask(spec, [&](const Json& doc) {
    for (const auto& c : doc["cited_blocks"]) {
      if (!ids.contains(c.get<std::string>())) {
        throw Retryable("cites block '" + c.get<std::string>() +
                        "' that the traversal never visited");
      }
    }
    return doc;
  }, max_attempts);

  ProgramContext ctx;
  ctx.empty = false;
  ctx.summary = reply["summary"].get<std::string>();
  std::set<std::string> seen;
  for (const auto& c : reply["cited_blocks"]) {
    if (seen.insert(c.get<std::string>()).second) ctx.cited_blocks.push_back(BlockId{c});
  }
  if (auto it = reply.find("dependencies"); it != reply.end()) {
    for (const auto& d : *it) ctx.dependencies.push_back(d.get<std::string>());
  }
  return ctx;
}

Judgment judge_entity(Policy& policy, const ObservabilityContext& context,
                      const ProgramContext& program) {
  QuerySpec spec;
  spec.kind = QueryKind::kJudge;
  spec.entity = context.entity.label();
  spec.payload = Json{{"entity", entity_to_json(context.entity)},
                      {"observability", observability_to_json(context)},
                      {"program_context", program_context_to_json(program)}};
  Json reply = policy.ask(spec, nullptr);
  Judgment j;
  j.label = *parse_judgment_label(reply["label"].get<std::string>());
  j.reasoning = reply["reasoning"].get<std::string>();
  if (auto it = reply.find("cited_evidence"); it != reply.end()) {
    for (const auto& e : *it) j.cited_evidence.push_back(e.get<std::string>());
  }
  return j;
}

std::vector<EntityRef> suggest_entities(Policy& policy, const Judgment& judgment,
                                        const ObservabilityContext& context,
                                        const ProgramContext& program, const Sdg& sdg,
                                        int k) {
  if (k < 1) throw PreconditionError("suggestion cap must be positive");
  QuerySpec spec;
  spec.kind = QueryKind::kSuggest;
  spec.entity = context.entity.label();
  spec.payload = Json{{"entity", entity_to_json(context.entity)},
                      {"judgment", judgment_to_json(judgment)},
                      {"observability", observability_to_json(context)},
                      {"program_context", program_context_to_json(program)},
                      {"entities", graph_labels(sdg)},
                      {"limit", k}};
  Json reply = policy.ask(spec, nullptr);
  std::vector<EntityRef> out;
  for (const auto& item : reply["entities"]) {
    auto e = resolve_entity(sdg, item);
    if (!e) {
      policy.note("suggest: dropped '" + describe(item) + "' (not in the graph)");
      continue;
    }
    if (std::find(out.begin(), out.end(), *e) != out.end()) continue;
    if (static_cast<int>(out.size()) == k) {
      policy.note("suggest: truncated to " + std::to_string(k) + " entities");
      break;
    }
    out.push_back(*e);
  }
  return out;
}

RcaReport summarize(Policy& policy, const InvestigationNarrative& narrative,
                    const std::string& scenario_id) {
  if (narrative.findings.empty()) {
    throw PreconditionError("narrative has no entity findings");
  }
  std::vector<EntityRef> investigated;
  std::set<EntityRef> primary;
  for (const auto& f : narrative.findings) {
    investigated.push_back(f.entity);
    if (f.judgment.label == JudgmentLabel::kPrimaryFailure) primary.insert(f.entity);
  }
  Json labels = Json::array();
  for (const auto& e : investigated) labels.push_back(e.label());

  QuerySpec spec;
  spec.kind = QueryKind::kSummary;
  spec.payload = Json{{"narrative", narrative_to_json(narrative)},
                      {"investigated", labels}};
  Json reply = policy.ask(spec, [&](const Json& doc) {
    Json roots = Json::array();
    std::set<EntityRef> seen;
    for (const auto& item : doc["root_causes"]) {
      auto e = resolve_among(investigated, item);
      if (!e || !primary.contains(*e)) {
        throw Retryable("root cause '" + describe(item) +
                        "' was not judged PrimaryFailure");
      }
      if (seen.insert(*e).second) roots.push_back(e->label());
    }
    Json chain = Json::array();
    for (const auto& item : doc["propagation_chain"]) {
      auto e = resolve_among(investigated, item);
      if (!e) {
        throw Retryable("propagation chain entity '" + describe(item) +
                        "' was not investigated");
      }
      chain.push_back(e->label());
    }
    Json out = doc;
    out["root_causes"] = roots;
    out["propagation_chain"] = chain;
    return out;
  });

  RcaReport report;
  report.scenario_id = scenario_id;
  for (const auto& label : reply["root_causes"]) {
    report.root_cause_entities.push_back(*resolve_among(investigated, label));
  }
  for (const auto& label : reply["propagation_chain"]) {
    report.propagation_chain.push_back(*resolve_among(investigated, label));
  }
  report.root_cause_reasoning = reply["reasoning"].get<std::string>();
  if (auto it = reply.find("remediation"); it != reply.end() && it->is_string()) {
    report.remediation_hint = it->get<std::string>();
  }
  report.inconclusive = report.root_cause_entities.empty();
  for (const auto& f : narrative.findings) {
    report.per_entity[f.entity] =
        EntityVerdict{f.judgment.label, f.judgment.reasoning, f.judgment.cited_evidence};
  }
  return report;
}

}  // namespace graphrca
