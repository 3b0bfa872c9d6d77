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
//
// Scenario bundle fixtures: alerts, error traces, logs, events, metrics,
// configmap status and infrastructure attributes. A bundle is loaded once
// and is read-only afterwards, so contexts can be built concurrently.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "graphrca/common/json_util.hpp"
#include "graphrca/graph/sdg.hpp"

namespace graphrca {

enum class Severity { kWarning, kCritical };

struct Alert {
  std::string name;
  EntityRef entity;
  Severity severity = Severity::kWarning;
  std::int64_t started_at = 0;  // ms since epoch
  bool sustained = false;
  std::string description;
};

struct TraceSpan {
  std::string service;
  std::string endpoint;
  std::string status_code;
  double latency_ms = 0;
  std::optional<int> parent;  // index into the trace's span list
};

struct ErrorTrace {
  std::string trace_id;
  std::vector<TraceSpan> spans;
};

struct ExceptionFrame {
  std::string file;
  int line = 0;
  std::string symbol;
};

struct LogEntry {
  EntityRef entity;
  std::int64_t timestamp = 0;
  std::string level;
  std::string message;
  std::vector<ExceptionFrame> exception_frames;
};

struct KubeEvent {
  EntityRef entity;
  std::int64_t timestamp = 0;
  std::string reason;
  std::string message;
};

struct MetricPoint {
  EntityRef entity;
  std::string metric;
  std::int64_t timestamp = 0;
  double value = 0;
  std::string unit;
  bool anomalous = false;  // precomputed by the fixture author
};

struct IncidentContext {
  std::vector<Alert> alerts;  // sustained only, never empty
  std::vector<ErrorTrace> error_traces;
  std::int64_t incident_time = 0;
};

struct ObservabilityContext {
  EntityRef entity;
  std::vector<LogEntry> logs;  // most recent K, oldest first
  std::vector<MetricPoint> metrics;
  std::vector<KubeEvent> events;
  std::vector<EntityRef> inbound_calls;
  std::vector<EntityRef> outbound_calls;
  std::map<std::string, std::string> infra;
  std::optional<Json> config_status;  // configmaps only

  // No logs, metrics, events or config content.
  bool signal_free() const;
};

bool is_error_status(const std::string& status_code);

// A scenario directory. Layout:
//   scenario.json sdg.json groundtruth.json
//   obs/{alerts.json,traces.json,logs.jsonl,events.jsonl,metrics.jsonl,infra.json}
//   config/<name>.json  pdg/<service>.json | src/<service>/*.mini
//   policy/scripted.json
class ScenarioBundle {
 public:
  // Throws MissingFixture when scenario.json is absent and
  // MalformedDocument/SchemaViolation on corrupt streams.
  static ScenarioBundle open(const std::filesystem::path& root);

  const std::filesystem::path& root() const { return root_; }
  const std::string& id() const { return id_; }
  const std::string& description() const { return description_; }
  const std::string& template_tag() const { return template_tag_; }

  bool has_alert_fixture() const { return has_alerts_; }
  const std::vector<Alert>& alerts() const { return alerts_; }
  const std::vector<ErrorTrace>& traces() const { return traces_; }
  const std::vector<LogEntry>& logs() const { return logs_; }
  const std::vector<KubeEvent>& events() const { return events_; }
  const std::vector<MetricPoint>& metrics() const { return metrics_; }
  const std::map<std::string, std::map<std::string, std::string>>& infra() const {
    return infra_;
  }
  std::optional<Json> config_document(const std::string& name) const;

  Sdg load_sdg() const;

 private:
  std::filesystem::path root_;
  std::string id_;
  std::string description_;
  std::string template_tag_;
  bool has_alerts_ = false;
  std::vector<Alert> alerts_;
  std::vector<ErrorTrace> traces_;
  std::vector<LogEntry> logs_;
  std::vector<KubeEvent> events_;
  std::vector<MetricPoint> metrics_;
  std::map<std::string, std::map<std::string, std::string>> infra_;
};

// Sustained alerts plus error traces; incident_time is the latest alert
// start. Throws MissingFixture when no sustained alert exists.
IncidentContext load_incident_context(const ScenarioBundle& bundle);

// Throws UnknownEntity. Missing per-entity data yields empty sections.
ObservabilityContext build_observability_context(const ScenarioBundle& bundle,
                                                 const EntityRef& entity,
                                                 const Sdg& sdg, int log_cap);

Json incident_to_json(const IncidentContext& incident);
Json observability_to_json(const ObservabilityContext& context);

}  // namespace graphrca
