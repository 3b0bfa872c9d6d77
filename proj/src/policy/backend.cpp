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

#include "graphrca/policy/backend.hpp"

#include <httplib.h>

#include <chrono>
#include <cstdlib>
#include <regex>
#include <set>

#include "graphrca/common/error.hpp"

namespace graphrca {
namespace {

const Json kEmptyObject = Json::object();

const Json& payload_of(const BackendRequest& request) {
  return request.payload ? *request.payload : kEmptyObject;
}

std::string entity_label(const Json& value) {
  if (value.is_string()) return "microservice/" + value.get<std::string>();
  return value.value("kind", std::string("microservice")) + "/" +
         value.value("name", std::string());
}

bool entity_matches(const std::string& wanted, const std::string& label) {
  if (wanted == label) return true;
  auto slash = label.find('/');
  return slash != std::string::npos && label.substr(slash + 1) == wanted;
}

bool rule_matches(const Json& rule, const BackendRequest& request) {
  const Json& payload = payload_of(request);
  if (rule.value("kind", std::string()) != to_string(request.kind)) return false;
  if (auto it = rule.find("entity");
      it != rule.end() && !entity_matches(it->get<std::string>(), request.entity)) {
    return false;
  }
  if (auto it = rule.find("block");
      it != rule.end() && it->get<std::string>() != request.block) {
    return false;
  }
  if (auto it = rule.find("step"); it != rule.end() && it->get<int>() != request.step) {
    return false;
  }
  if (auto it = rule.find("attempt");
      it != rule.end() && it->get<int>() != request.attempt) {
    return false;
  }
  const Json current = payload.value("current", Json::object());
  if (auto it = rule.find("block_name"); it != rule.end()) {
    auto name = current.find("name");
    if (name == current.end() || !name->is_string() || *name != *it) return false;
  }
  if (auto it = rule.find("code_contains"); it != rule.end()) {
    std::string code = current.value("code_text", std::string());
    if (code.find(it->get<std::string>()) == std::string::npos) return false;
  }
  return true;
}

std::vector<std::string> history_blocks(const Json& payload) {
  std::vector<std::string> ids;
  std::set<std::string> seen;
  for (const auto& record : payload.value("history", Json::array())) {
    std::string id = record.value("block", std::string());
    if (seen.insert(id).second) ids.push_back(id);
  }
  return ids;
}

// "$history" in a synthesis reply stands for every visited block.
Json expand_placeholders(Json reply, const BackendRequest& request) {
  if (request.kind == QueryKind::kSynthesize) {
    auto it = reply.find("cited_blocks");
    if (it != reply.end() && it->is_string() && *it == "$history") {
      *it = history_blocks(payload_of(request));
    }
  }
  return reply;
}

Json default_select(const Json& payload) {
  Json candidates = Json::array();
  std::set<std::string> seen;
  std::string names;
  for (const auto& alert : payload.value("incident", Json::object())
                               .value("alerts", Json::array())) {
    std::string label = entity_label(alert.value("entity", Json()));
    if (seen.insert(label).second) {
      candidates.push_back(label);
      names += (names.empty() ? "" : ", ") + label;
    }
  }
  return Json{{"candidates", candidates},
              {"narrative", "Sustained alerts fire on " + names + "."}};
}

Json default_match(const Json& payload) {
  std::string signals;
  const Json obs = payload.value("observability", Json::object());
  for (const auto& log : obs.value("logs", Json::array())) {
    signals += log.value("message", std::string()) + "\n";
    for (const auto& frame : log.value("exception_frames", Json::array())) {
      signals += frame.value("symbol", std::string()) + "\n";
    }
  }
  for (const auto& event : obs.value("events", Json::array())) {
    signals += event.value("message", std::string()) + "\n";
  }
  Json matches = Json::array();
  for (const auto& block : payload.value("blocks", Json::array())) {
    for (const auto& literal : block.value("string_literals", Json::array())) {
      const std::string text = literal.get<std::string>();
      if (text.size() >= 3 && signals.find(text) != std::string::npos) {
        matches.push_back(block.value("id", std::string()));
        break;
      }
    }
  }
  return Json{{"matches", matches}, {"reason", "string literal correlation"}};
}

Json default_summary(const Json& payload) {
  Json roots = Json::array();
  Json chain = Json::array();
  std::string reasoning;
  const Json findings =
      payload.value("narrative", Json::object()).value("findings", Json::array());
  for (const auto& f : findings) {
    const Json judgment = f.value("judgment", Json::object());
    std::string label = judgment.value("label", std::string());
    std::string entity = entity_label(f.value("entity", Json()));
    if (label == "PrimaryFailure") {
      roots.push_back(entity);
      reasoning += entity + ": " + judgment.value("reasoning", std::string()) + " ";
    }
  }
  chain = roots;
  for (const auto& f : findings) {
    if (f.value("judgment", Json::object()).value("label", std::string()) ==
        "SymptomOnly") {
      chain.push_back(entity_label(f.value("entity", Json())));
    }
  }
  if (roots.empty()) {
    chain = Json::array();
    reasoning = "No investigated entity was identified as a primary failure.";
  } else {
    reasoning.pop_back();
  }
  return Json{{"root_causes", roots},
              {"propagation_chain", chain},
              {"reasoning", reasoning},
              {"remediation", nullptr}};
}

Json default_reply(const BackendRequest& request) {
  const Json& payload = payload_of(request);
  switch (request.kind) {
    case QueryKind::kSelect: return default_select(payload);
    case QueryKind::kMatch: return default_match(payload);
    case QueryKind::kStep:
      return Json{{"action", "Complete"},
                  {"target", nullptr},
                  {"insight", "No dependency from this block explains the signals."}};
    case QueryKind::kSynthesize:
      return Json{{"summary", "Traversed code shows no fault linked to the signals."},
                  {"cited_blocks", history_blocks(payload)},
                  {"dependencies", Json::array()}};
    case QueryKind::kJudge:
      return Json{{"label", "Unrelated"},
                  {"reasoning", "insufficient signal to attribute any fault to this entity"},
                  {"cited_evidence", Json::array()}};
    case QueryKind::kSuggest: return Json{{"entities", Json::array()}};
    case QueryKind::kSummary: return default_summary(payload);
  }
  return Json::object();
}

}  // namespace

std::string_view to_string(QueryKind kind) {
  switch (kind) {
    case QueryKind::kSelect: return "select";
    case QueryKind::kMatch: return "match";
    case QueryKind::kStep: return "step";
    case QueryKind::kSynthesize: return "synthesize";
    case QueryKind::kJudge: return "judge";
    case QueryKind::kSuggest: return "suggest";
    case QueryKind::kSummary: return "summary";
  }
  return "?";
}

std::optional<QueryKind> parse_query_kind(std::string_view text) {
  for (QueryKind k : {QueryKind::kSelect, QueryKind::kMatch, QueryKind::kStep,
                      QueryKind::kSynthesize, QueryKind::kJudge, QueryKind::kSuggest,
                      QueryKind::kSummary}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

std::int64_t estimate_tokens(std::string_view text) {
  return static_cast<std::int64_t>((text.size() + 3) / 4);
}

std::string fence_payload(const Json& payload) {
  return "```rca-json\n" + payload.dump(2) + "\n```\n";
}

void ScriptedBackend::add_rules(const std::string& scenario_id, const Json& rules) {
  if (!rules.is_array()) throw SchemaViolation("scripted rules must be an array");
  for (const auto& rule : rules) {
    if (!rule.is_object() || !rule.contains("kind")) {
      throw SchemaViolation("scripted rule without kind in " + scenario_id);
    }
    if (!parse_query_kind(rule["kind"].get<std::string>())) {
      throw SchemaViolation("scripted rule with unknown kind '" +
                            rule["kind"].get<std::string>() + "'");
    }
    if (!rule.contains("reply") && !rule.contains("raw")) {
      throw SchemaViolation("scripted rule without reply in " + scenario_id);
    }
  }
  std::lock_guard lock(mu_);
  auto& bucket = rules_[scenario_id];
  bucket.insert(bucket.end(), rules.begin(), rules.end());
}

void ScriptedBackend::add_bundle(const std::filesystem::path& bundle_root,
                                 const std::string& scenario_id) {
  auto path = bundle_root / "policy" / "scripted.json";
  if (!std::filesystem::exists(path)) return;
  add_rules(scenario_id, parse_json(read_file(path), "policy/scripted.json"));
}

BackendReply ScriptedBackend::complete(const BackendRequest& request) {
  std::optional<Json> chosen;
  {
    std::lock_guard lock(mu_);
    ++calls_;
    if (auto it = rules_.find(request.scenario_id); it != rules_.end()) {
      for (const auto& rule : it->second) {
        if (rule_matches(rule, request)) {
          chosen = rule;
          break;
        }
      }
    }
  }
  BackendReply reply;
  if (chosen && chosen->contains("raw")) {
    reply.text = (*chosen)["raw"].get<std::string>();
  } else if (chosen) {
    reply.text = fence_payload(expand_placeholders((*chosen)["reply"], request));
  } else {
    reply.text = fence_payload(default_reply(request));
  }
  reply.usage.prompt_tokens =
      estimate_tokens(request.system_prompt) + estimate_tokens(request.prompt);
  reply.usage.completion_tokens = estimate_tokens(reply.text);
  // Simulated latency: fixed overhead plus per-token costs.
  reply.latency_ms = 40.0 + 0.05 * static_cast<double>(reply.usage.prompt_tokens) +
                     2.0 * static_cast<double>(reply.usage.completion_tokens);
  return reply;
}

std::int64_t ScriptedBackend::call_count() const {
  std::lock_guard lock(mu_);
  return calls_;
}

RemoteConfig remote_config_from_json(const Json& doc) {
  RemoteConfig config;
  config.endpoint = require_string(doc, "endpoint", "remote config");
  config.model = require_string(doc, "model", "remote config");
  config.temperature = doc.value("temperature", config.temperature);
  config.max_tokens = doc.value("max_tokens", config.max_tokens);
  config.token_env = doc.value("token_env", config.token_env);
  config.timeout_s = doc.value("timeout_s", config.timeout_s);
  return config;
}

RemoteBackend::RemoteBackend(RemoteConfig config) : config_(std::move(config)) {
  static const std::regex url(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(config_.endpoint, m, url)) {
    throw PreconditionError("remote endpoint must be an http(s) URL: " +
                            config_.endpoint);
  }
  scheme_host_port_ = m[1].str();
  path_ = m[2].matched ? m[2].str() : "/v1/chat/completions";
  if (config_.model.empty()) throw PreconditionError("remote model name is empty");
}

BackendReply RemoteBackend::complete(const BackendRequest& request) {
  Json body{{"model", config_.model},
            {"messages", Json::array({Json{{"role", "system"},
                                           {"content", request.system_prompt}},
                                      Json{{"role", "user"}, {"content", request.prompt}}})},
            {"temperature", config_.temperature},
            {"max_tokens", config_.max_tokens}};

  httplib::Client client(scheme_host_port_);
  client.set_connection_timeout(config_.timeout_s, 0);
  client.set_read_timeout(config_.timeout_s, 0);
  httplib::Headers headers;
  if (const char* token = std::getenv(config_.token_env.c_str()); token && *token) {
    headers.emplace("Authorization", std::string("Bearer ") + token);
  }

  auto started = std::chrono::steady_clock::now();
  auto result = client.Post(path_, headers, body.dump(), "application/json");
  auto elapsed = std::chrono::steady_clock::now() - started;
  if (!result) {
    throw PolicyUnavailable("request to " + config_.endpoint +
                            " failed: " + httplib::to_string(result.error()));
  }
  if (result->status != 200) {
    throw PolicyUnavailable("backend returned HTTP " + std::to_string(result->status));
  }

  BackendReply reply;
  try {
    Json doc = Json::parse(result->body);
    reply.text = doc.at("choices").at(0).at("message").at("content").get<std::string>();
    const Json& usage = doc.at("usage");
    reply.usage.prompt_tokens = usage.at("prompt_tokens").get<std::int64_t>();
    reply.usage.completion_tokens = usage.at("completion_tokens").get<std::int64_t>();
  } catch (const Json::exception& e) {
    throw PolicyUnavailable(std::string("malformed chat-completion response: ") +
                            e.what());
  }
  reply.latency_ms =
      std::chrono::duration<double, std::milli>(elapsed).count();
  return reply;
}

}  // namespace graphrca
