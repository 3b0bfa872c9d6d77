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

// Model backends. A backend turns one rendered prompt into one raw reply;
// it knows nothing about retries or schemas. Both variants are safe for
// concurrent use by independent runs.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "graphrca/common/json_util.hpp"

namespace graphrca {

enum class QueryKind { kSelect, kMatch, kStep, kSynthesize, kJudge, kSuggest, kSummary };

std::string_view to_string(QueryKind kind);
std::optional<QueryKind> parse_query_kind(std::string_view text);

struct TokenUsage {
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;

  std::int64_t total() const { return prompt_tokens + completion_tokens; }
};

struct BackendRequest {
  QueryKind kind = QueryKind::kSelect;
  std::string scenario_id;
  std::string entity;  // label, or empty
  std::string block;   // current block id, or empty
  int step = -1;       // traversal step index for kStep
  int attempt = 0;     // 0 for the first try
  std::string system_prompt;
  std::string prompt;
  // The structured inputs behind `prompt`. Scripted rules match against it;
  // the remote backend ignores it.
  const Json* payload = nullptr;
};

struct BackendReply {
  std::string text;
  TokenUsage usage;
  double latency_ms = 0;
};

class PolicyBackend {
 public:
  virtual ~PolicyBackend() = default;

  // Throws PolicyUnavailable on transport failure.
  virtual BackendReply complete(const BackendRequest& request) = 0;
  virtual std::string name() const = 0;
  // True when latencies are simulated, so wall time is reproducible.
  virtual bool simulated_clock() const = 0;
};

// Canned replies keyed by (query kind, scenario, entity/block). Rules are
// tried in order; the first whose matchers all hold wins, and a built-in
// default per kind makes the rule set total.
//
// Rule fields: kind (required), entity, block, block_name, code_contains,
// step, attempt (optional matchers), and either `reply` (a JSON payload
// wrapped into a fenced block) or `raw` (verbatim reply text).
class ScriptedBackend : public PolicyBackend {
 public:
  ScriptedBackend() = default;

  void add_rules(const std::string& scenario_id, const Json& rules);
  // Loads `<bundle>/policy/scripted.json` if present.
  void add_bundle(const std::filesystem::path& bundle_root,
                  const std::string& scenario_id);

  BackendReply complete(const BackendRequest& request) override;
  std::string name() const override { return "scripted"; }
  bool simulated_clock() const override { return true; }

  std::int64_t call_count() const;

 private:
  std::map<std::string, std::vector<Json>> rules_;
  mutable std::mutex mu_;
  std::int64_t calls_ = 0;
};

struct RemoteConfig {
  // Full URL of the chat-completion route, e.g.
  // "http://127.0.0.1:8080/v1/chat/completions".
  std::string endpoint;
  std::string model;
  double temperature = 0.0;
  int max_tokens = 2048;
  std::string token_env = "GRAPHRCA_API_TOKEN";
  int timeout_s = 120;
};

// Reads {endpoint, model, temperature, max_tokens, token_env, timeout_s}.
RemoteConfig remote_config_from_json(const Json& doc);

class RemoteBackend : public PolicyBackend {
 public:
  explicit RemoteBackend(RemoteConfig config);

  BackendReply complete(const BackendRequest& request) override;
  std::string name() const override { return "remote:" + config_.model; }
  bool simulated_clock() const override { return false; }

  const RemoteConfig& config() const { return config_; }

 private:
  RemoteConfig config_;
  std::string scheme_host_port_;
  std::string path_;
};

// ceil(chars / 4); the scripted backend's token estimate.
std::int64_t estimate_tokens(std::string_view text);

// Wraps a payload into the reply format the parser expects.
std::string fence_payload(const Json& payload);

}  // namespace graphrca
