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

#include "graphrca/observability/observability.hpp"

#include <algorithm>
#include <sstream>

#include "graphrca/common/error.hpp"

namespace graphrca {
namespace {

namespace fs = std::filesystem;

EntityRef read_entity(const Json& item, std::string_view context) {
  const Json& value = require(item, "entity", context);
  if (value.is_string()) {
    return EntityRef{EntityKind::kMicroservice, value.get<std::string>()};
  }
  return entity_from_json(value, context);
}

double read_number(const Json& item, std::string_view key,
                   std::string_view context) {
  const Json& value = require(item, key, context);
  if (!value.is_number()) {
    throw SchemaViolation(std::string(context) + ": field '" + std::string(key) +
                          "' must be a number");
  }
  return value.get<double>();
}

std::vector<Json> read_jsonl(const fs::path& path) {
  std::vector<Json> rows;
  if (!fs::exists(path)) return rows;
  std::istringstream in(read_file(path));
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    rows.push_back(parse_json(line, path.filename().string() + ":" +
                                        std::to_string(number)));
  }
  return rows;
}

template <typename T>
void check_monotone(const std::vector<T>& stream, std::string_view what) {
  std::map<EntityRef, std::int64_t> last;
  for (const auto& row : stream) {
    auto it = last.find(row.entity);
    if (it != last.end() && row.timestamp < it->second) {
      throw SchemaViolation(std::string(what) + ": timestamps for " +
                            row.entity.label() + " are not monotone");
    }
    last[row.entity] = row.timestamp;
  }
}

Alert parse_alert(const Json& item) {
  const std::string ctx = "alerts";
  Alert alert;
  alert.name = require_string(item, "name", ctx);
  alert.entity = read_entity(item, ctx);
  std::string severity = optional_string(item, "severity", "warning");
  if (severity == "critical") {
    alert.severity = Severity::kCritical;
  } else if (severity == "warning") {
    alert.severity = Severity::kWarning;
  } else {
    throw SchemaViolation(ctx + ": unknown severity '" + severity + "'");
  }
  alert.started_at = require_int(item, "started_at", ctx);
  const Json& sustained = require(item, "sustained", ctx);
  if (!sustained.is_boolean()) {
    throw SchemaViolation(ctx + ": 'sustained' must be a boolean");
  }
  alert.sustained = sustained.get<bool>();
  alert.description = optional_string(item, "description");
  return alert;
}

ErrorTrace parse_trace(const Json& item) {
  const std::string ctx = "traces";
  ErrorTrace trace;
  trace.trace_id = require_string(item, "trace_id", ctx);
  bool has_error = false;
  for (const auto& s : require_array(item, "spans", ctx)) {
    TraceSpan span;
    span.service = require_string(s, "service", ctx + ".spans");
    span.endpoint = optional_string(s, "endpoint");
    const Json& status = require(s, "status_code", ctx + ".spans");
    span.status_code = status.is_string() ? status.get<std::string>()
                                          : status.dump();
    span.latency_ms = read_number(s, "latency_ms", ctx + ".spans");
    if (span.latency_ms < 0) {
      throw SchemaViolation(ctx + ": negative latency in " + trace.trace_id);
    }
    if (auto it = s.find("parent"); it != s.end() && !it->is_null()) {
      if (!it->is_number_integer()) {
        throw SchemaViolation(ctx + ": parent must be a span index");
      }
      int parent = it->get<int>();
      // Parents must precede children, which keeps the tree acyclic.
      if (parent < 0 || parent >= static_cast<int>(trace.spans.size())) {
        throw SchemaViolation(ctx + ": bad parent index in " + trace.trace_id);
      }
      span.parent = parent;
    }
    has_error = has_error || is_error_status(span.status_code);
    trace.spans.push_back(std::move(span));
  }
  if (!has_error) {
    throw SchemaViolation(ctx + ": trace " + trace.trace_id +
                          " carries no error status");
  }
  return trace;
}

Json entity_list(const std::vector<EntityRef>& entities) {
  Json out = Json::array();
  for (const auto& e : entities) out.push_back(entity_to_json(e));
  return out;
}

}  // namespace

bool is_error_status(const std::string& status_code) {
  if (status_code.empty() || status_code == "OK" || status_code == "0" ||
      status_code == "STATUS_CODE_OK" || status_code == "UNSET") {
    return false;
  }
  // HTTP 1xx-3xx are not errors.
  if (status_code.size() == 3 && status_code[0] >= '1' && status_code[0] <= '3' &&
      std::all_of(status_code.begin(), status_code.end(), ::isdigit)) {
    return false;
  }
  return true;
}

bool ObservabilityContext::signal_free() const {
  bool empty_config = !config_status || config_status->empty();
  return logs.empty() && metrics.empty() && events.empty() && empty_config;
}

ScenarioBundle ScenarioBundle::open(const fs::path& root) {
  ScenarioBundle bundle;
  bundle.root_ = root;
  Json scenario = parse_json(read_file(root / "scenario.json"), "scenario.json");
  bundle.id_ = require_string(scenario, "id", "scenario.json");
  bundle.description_ = optional_string(scenario, "description");
  bundle.template_tag_ = optional_string(scenario, "template");

  const fs::path obs = root / "obs";
  if (fs::exists(obs / "alerts.json")) {
    bundle.has_alerts_ = true;
    Json alerts = parse_json(read_file(obs / "alerts.json"), "alerts.json");
    if (!alerts.is_array()) throw SchemaViolation("alerts.json must be an array");
    for (const auto& item : alerts) bundle.alerts_.push_back(parse_alert(item));
  }
  if (fs::exists(obs / "traces.json")) {
    Json traces = parse_json(read_file(obs / "traces.json"), "traces.json");
    if (!traces.is_array()) throw SchemaViolation("traces.json must be an array");
    for (const auto& item : traces) bundle.traces_.push_back(parse_trace(item));
  }
  for (const auto& row : read_jsonl(obs / "logs.jsonl")) {
    LogEntry log;
    log.entity = read_entity(row, "logs");
    log.timestamp = require_int(row, "timestamp", "logs");
    log.level = optional_string(row, "level", "info");
    log.message = require_string(row, "message", "logs");
    if (auto it = row.find("exception_frames"); it != row.end() && it->is_array()) {
      for (const auto& f : *it) {
        log.exception_frames.push_back(
            ExceptionFrame{require_string(f, "file", "logs.exception_frames"),
                           static_cast<int>(require_int(f, "line", "logs.exception_frames")),
                           optional_string(f, "symbol")});
      }
    }
    bundle.logs_.push_back(std::move(log));
  }
  for (const auto& row : read_jsonl(obs / "events.jsonl")) {
    bundle.events_.push_back(KubeEvent{read_entity(row, "events"),
                                       require_int(row, "timestamp", "events"),
                                       require_string(row, "reason", "events"),
                                       optional_string(row, "message")});
  }
  for (const auto& row : read_jsonl(obs / "metrics.jsonl")) {
    MetricPoint point;
    point.entity = read_entity(row, "metrics");
    point.metric = require_string(row, "metric", "metrics");
    point.timestamp = require_int(row, "timestamp", "metrics");
    point.value = read_number(row, "value", "metrics");
    point.unit = optional_string(row, "unit");
    if (auto it = row.find("anomalous"); it != row.end() && it->is_boolean()) {
      point.anomalous = it->get<bool>();
    }
    bundle.metrics_.push_back(std::move(point));
  }
  check_monotone(bundle.logs_, "logs.jsonl");
  check_monotone(bundle.events_, "events.jsonl");
  check_monotone(bundle.metrics_, "metrics.jsonl");

  if (fs::exists(obs / "infra.json")) {
    Json infra = parse_json(read_file(obs / "infra.json"), "infra.json");
    for (const auto& [name, attrs] : infra.items()) {
      for (const auto& [key, value] : attrs.items()) {
        bundle.infra_[name][key] = value.is_string() ? value.get<std::string>()
                                                     : value.dump();
      }
    }
  }
  return bundle;
}

std::optional<Json> ScenarioBundle::config_document(const std::string& name) const {
  fs::path path = root_ / "config" / (name + ".json");
  if (!fs::exists(path)) return std::nullopt;
  return parse_json(read_file(path), path.filename().string());
}

Sdg ScenarioBundle::load_sdg() const {
  return sdg_from_json(read_file(root_ / "sdg.json"));
}

IncidentContext load_incident_context(const ScenarioBundle& bundle) {
  if (!bundle.has_alert_fixture()) throw MissingFixture("obs/alerts.json");
  IncidentContext incident;
  for (const auto& alert : bundle.alerts()) {
    if (alert.sustained) incident.alerts.push_back(alert);
  }
  if (incident.alerts.empty()) throw MissingFixture("no sustained alerts");
  incident.error_traces = bundle.traces();
  for (const auto& alert : incident.alerts) {
    incident.incident_time = std::max(incident.incident_time, alert.started_at);
  }
  return incident;
}

ObservabilityContext build_observability_context(const ScenarioBundle& bundle,
                                                 const EntityRef& entity,
                                                 const Sdg& sdg, int log_cap) {
  if (log_cap < 1) throw PreconditionError("log cap must be positive");
  if (!sdg.contains(entity)) throw UnknownEntity(entity.label());
  ObservabilityContext ctx;
  ctx.entity = entity;

  for (const auto& v : sdg.dependees(entity)) {
    if (v.kind == EntityKind::kMicroservice) ctx.outbound_calls.push_back(v);
  }
  if (entity.kind == EntityKind::kMicroservice) {
    for (const auto& u : sdg.dependents(entity)) {
      if (u.kind == EntityKind::kMicroservice) ctx.inbound_calls.push_back(u);
    }
  }

  for (const auto& event : bundle.events()) {
    if (event.entity == entity) ctx.events.push_back(event);
  }
  if (entity.kind == EntityKind::kConfigmap) {
    ctx.config_status = bundle.config_document(entity.name).value_or(Json::object());
    return ctx;
  }

  std::vector<LogEntry> logs;
  for (const auto& log : bundle.logs()) {
    if (log.entity == entity) logs.push_back(log);
  }
  std::stable_sort(logs.begin(), logs.end(),
                   [](const LogEntry& a, const LogEntry& b) {
                     return a.timestamp < b.timestamp;
                   });
  std::size_t cap = static_cast<std::size_t>(log_cap);
  if (logs.size() > cap) {
    logs.erase(logs.begin(), logs.end() - static_cast<std::ptrdiff_t>(cap));
  }
  ctx.logs = std::move(logs);
  for (const auto& point : bundle.metrics()) {
    if (point.entity == entity) ctx.metrics.push_back(point);
  }
  if (entity.kind == EntityKind::kMicroservice) {
    if (auto it = bundle.infra().find(entity.name); it != bundle.infra().end()) {
      ctx.infra = it->second;
    }
  }
  return ctx;
}

Json incident_to_json(const IncidentContext& incident) {
  Json alerts = Json::array();
  for (const auto& a : incident.alerts) {
    alerts.push_back(Json{{"name", a.name},
                          {"entity", entity_to_json(a.entity)},
                          {"severity", a.severity == Severity::kCritical ? "critical"
                                                                         : "warning"},
                          {"started_at", a.started_at},
                          {"description", a.description}});
  }
  Json traces = Json::array();
  for (const auto& t : incident.error_traces) {
    Json spans = Json::array();
    for (const auto& s : t.spans) {
      spans.push_back(Json{{"service", s.service},
                           {"endpoint", s.endpoint},
                           {"status_code", s.status_code},
                           {"latency_ms", s.latency_ms},
                           {"parent", s.parent ? Json(*s.parent) : Json(nullptr)}});
    }
    traces.push_back(Json{{"trace_id", t.trace_id}, {"spans", std::move(spans)}});
  }
  return Json{{"alerts", std::move(alerts)},
              {"error_traces", std::move(traces)},
              {"incident_time", incident.incident_time}};
}

Json observability_to_json(const ObservabilityContext& ctx) {
  Json logs = Json::array();
  for (const auto& l : ctx.logs) {
    Json row{{"timestamp", l.timestamp}, {"level", l.level}, {"message", l.message}};
    if (!l.exception_frames.empty()) {
      Json frames = Json::array();
      for (const auto& f : l.exception_frames) {
        frames.push_back(Json{{"file", f.file}, {"line", f.line}, {"symbol", f.symbol}});
      }
      row["exception_frames"] = std::move(frames);
    }
    logs.push_back(std::move(row));
  }
  Json metrics = Json::array();
  for (const auto& m : ctx.metrics) {
    metrics.push_back(Json{{"metric", m.metric},
                           {"timestamp", m.timestamp},
                           {"value", m.value},
                           {"unit", m.unit},
                           {"anomalous", m.anomalous}});
  }
  Json events = Json::array();
  for (const auto& e : ctx.events) {
    events.push_back(
        Json{{"timestamp", e.timestamp}, {"reason", e.reason}, {"message", e.message}});
  }
  Json infra = Json::object();
  for (const auto& [k, v] : ctx.infra) infra[k] = v;
  Json doc{{"entity", entity_to_json(ctx.entity)},
           {"logs", std::move(logs)},
           {"metrics", std::move(metrics)},
           {"events", std::move(events)},
           {"inbound_calls", entity_list(ctx.inbound_calls)},
           {"outbound_calls", entity_list(ctx.outbound_calls)},
           {"infra", std::move(infra)}};
  if (ctx.config_status) doc["config_status"] = *ctx.config_status;
  return doc;
}

}  // namespace graphrca
