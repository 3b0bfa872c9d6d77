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

#include "graphrca/graph/sdg.hpp"

#include <algorithm>

#include "graphrca/common/error.hpp"

namespace graphrca {

std::string_view to_string(EntityKind kind) {
  switch (kind) {
    case EntityKind::kMicroservice:
      return "microservice";
    case EntityKind::kPod:
      return "pod";
    case EntityKind::kConfigmap:
      return "configmap";
  }
  return "microservice";
}

std::optional<EntityKind> parse_entity_kind(std::string_view text) {
  if (text == "microservice") return EntityKind::kMicroservice;
  if (text == "pod") return EntityKind::kPod;
  if (text == "configmap") return EntityKind::kConfigmap;
  return std::nullopt;
}

std::strong_ordering EntityRef::operator<=>(const EntityRef& other) const {
  if (auto c = to_string(kind) <=> to_string(other.kind); c != 0) return c;
  return name <=> other.name;
}

std::string EntityRef::label() const {
  return std::string(to_string(kind)) + "/" + name;
}

Json entity_to_json(const EntityRef& entity) {
  return Json{{"kind", std::string(to_string(entity.kind))},
              {"name", entity.name}};
}

EntityRef entity_from_json(const Json& value, std::string_view context) {
  std::string kind_text = require_string(value, "kind", context);
  auto kind = parse_entity_kind(kind_text);
  if (!kind) {
    throw SchemaViolation(std::string(context) + ": unknown entity kind '" +
                          kind_text + "'");
  }
  std::string name = require_string(value, "name", context);
  if (name.empty()) {
    throw SchemaViolation(std::string(context) + ": empty entity name");
  }
  return EntityRef{*kind, std::move(name)};
}

Sdg::Sdg(std::set<EntityRef> nodes, std::set<SdgEdge> edges,
         std::int64_t snapshot_time,
         std::map<std::string, std::string> pdg_attachments)
    : nodes_(std::move(nodes)),
      edges_(std::move(edges)),
      snapshot_time_(snapshot_time),
      pdg_attachments_(std::move(pdg_attachments)) {
  for (const auto& node : nodes_) {
    if (node.name.empty()) throw SchemaViolation("node with empty name");
    out_[node];
    in_[node];
  }
  for (const auto& edge : edges_) {
    for (const EntityRef* end : {&edge.from, &edge.to}) {
      if (!nodes_.contains(*end)) {
        throw SchemaViolation("edge " + edge.from.label() + " -> " +
                              edge.to.label() + " references undeclared node " +
                              end->name);
      }
    }
    if (edge.from.kind != EntityKind::kMicroservice) {
      throw SchemaViolation("non-microservice node " + edge.from.label() +
                            " must not have outgoing edges");
    }
    out_[edge.from].push_back(edge.to);
    in_[edge.to].push_back(edge.from);
  }
  // The edge set is ordered by (from, to), so adjacency lists come out
  // sorted already; in-lists need an explicit sort.
  for (auto& [_, list] : in_) std::sort(list.begin(), list.end());
  for (const auto& [service, locator] : pdg_attachments_) {
    if (!nodes_.contains(EntityRef{EntityKind::kMicroservice, service})) {
      throw SchemaViolation("pdg attachment for '" + service +
                            "' which is not a microservice node");
    }
    if (locator.empty()) {
      throw SchemaViolation("empty pdg locator for '" + service + "'");
    }
  }
}

bool Sdg::contains(const EntityRef& entity) const {
  return nodes_.contains(entity);
}

std::vector<EntityRef> Sdg::dependees(const EntityRef& entity) const {
  auto it = out_.find(entity);
  if (it == out_.end()) throw UnknownEntity(entity.label());
  return it->second;
}

std::vector<EntityRef> Sdg::dependents(const EntityRef& entity) const {
  auto it = in_.find(entity);
  if (it == in_.end()) throw UnknownEntity(entity.label());
  return it->second;
}

std::vector<EntityRef> Sdg::find_by_name(std::string_view name) const {
  std::vector<EntityRef> found;
  for (const auto& node : nodes_) {
    if (node.name == name) found.push_back(node);
  }
  return found;
}

std::optional<std::string> Sdg::pdg_locator(const EntityRef& entity) const {
  if (entity.kind != EntityKind::kMicroservice) return std::nullopt;
  auto it = pdg_attachments_.find(entity.name);
  if (it == pdg_attachments_.end()) return std::nullopt;
  return it->second;
}

bool Sdg::operator==(const Sdg& other) const {
  return nodes_ == other.nodes_ && edges_ == other.edges_ &&
         snapshot_time_ == other.snapshot_time_ &&
         pdg_attachments_ == other.pdg_attachments_;
}

Sdg sdg_from_json(std::string_view bytes) {
  Json doc = parse_json(bytes, "sdg");
  if (!doc.is_object()) throw SchemaViolation("sdg: top level must be object");
  if (doc.contains("version") && doc["version"] != 1) {
    throw SchemaViolation("sdg: unsupported version");
  }
  std::int64_t snapshot = 0;
  if (doc.contains("snapshot_time")) {
    snapshot = require_int(doc, "snapshot_time", "sdg");
  }

  std::set<EntityRef> nodes;
  for (const auto& item : require_array(doc, "nodes", "sdg")) {
    EntityRef node = entity_from_json(item, "sdg.nodes");
    if (!nodes.insert(node).second) {
      throw SchemaViolation("sdg: duplicate node " + node.label());
    }
  }
  std::set<SdgEdge> edges;
  for (const auto& item : require_array(doc, "edges", "sdg")) {
    edges.insert(SdgEdge{entity_from_json(require(item, "from", "sdg.edges"),
                                          "sdg.edges.from"),
                         entity_from_json(require(item, "to", "sdg.edges"),
                                          "sdg.edges.to")});
  }
  std::map<std::string, std::string> attachments;
  if (doc.contains("pdg_attachments")) {
    const Json& att = doc["pdg_attachments"];
    if (!att.is_object()) {
      throw SchemaViolation("sdg: pdg_attachments must be an object");
    }
    for (const auto& [name, locator] : att.items()) {
      if (!locator.is_string()) {
        throw SchemaViolation("sdg: pdg locator for '" + name +
                              "' must be a string");
      }
      attachments[name] = locator.get<std::string>();
    }
  }
  return Sdg(std::move(nodes), std::move(edges), snapshot,
             std::move(attachments));
}

std::string sdg_to_json(const Sdg& sdg) {
  Json nodes = Json::array();
  for (const auto& node : sdg.nodes()) nodes.push_back(entity_to_json(node));
  Json edges = Json::array();
  for (const auto& edge : sdg.edges()) {
    edges.push_back(
        Json{{"from", entity_to_json(edge.from)}, {"to", entity_to_json(edge.to)}});
  }
  Json attachments = Json::object();
  for (const auto& [name, locator] : sdg.pdg_attachments()) {
    attachments[name] = locator;
  }
  Json doc{{"version", 1},
           {"snapshot_time", sdg.snapshot_time()},
           {"nodes", std::move(nodes)},
           {"edges", std::move(edges)},
           {"pdg_attachments", std::move(attachments)}};
  return canonical_dump(doc);
}

std::vector<EntityRef> sdg_dependees(const Sdg& sdg, const EntityRef& entity) {
  return sdg.dependees(entity);
}

}  // namespace graphrca
