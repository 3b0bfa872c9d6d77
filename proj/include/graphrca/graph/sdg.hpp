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
// Service dependency graph: cloud entities (microservices and their pods
// and configmaps) connected by "depends on" edges. An edge (u, v) means u
// depends on v, so the dependees of u are its out-neighbors.

#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "graphrca/common/json_util.hpp"

namespace graphrca {

enum class EntityKind { kMicroservice, kPod, kConfigmap };

std::string_view to_string(EntityKind kind);
std::optional<EntityKind> parse_entity_kind(std::string_view text);

struct EntityRef {
  EntityKind kind = EntityKind::kMicroservice;
  std::string name;

  // Lexicographic by kind name, then entity name.
  std::strong_ordering operator<=>(const EntityRef& other) const;
  bool operator==(const EntityRef& other) const = default;

  // "microservice/recommendation"
  std::string label() const;
};

Json entity_to_json(const EntityRef& entity);
EntityRef entity_from_json(const Json& value, std::string_view context);

struct SdgEdge {
  EntityRef from;
  EntityRef to;

  auto operator<=>(const SdgEdge&) const = default;
};

// Immutable once constructed; the constructor enforces every invariant.
class Sdg {
 public:
  Sdg() = default;
  Sdg(std::set<EntityRef> nodes, std::set<SdgEdge> edges,
      std::int64_t snapshot_time,
      std::map<std::string, std::string> pdg_attachments);

  const std::set<EntityRef>& nodes() const { return nodes_; }
  const std::set<SdgEdge>& edges() const { return edges_; }
  std::int64_t snapshot_time() const { return snapshot_time_; }
  const std::map<std::string, std::string>& pdg_attachments() const {
    return pdg_attachments_;
  }

  bool contains(const EntityRef& entity) const;

  // Out-neighbors of `entity` ((entity, v) edges), sorted. Throws
  // UnknownEntity.
  std::vector<EntityRef> dependees(const EntityRef& entity) const;
  // In-neighbors, sorted.
  std::vector<EntityRef> dependents(const EntityRef& entity) const;

  // All nodes with this name, across kinds.
  std::vector<EntityRef> find_by_name(std::string_view name) const;

  std::optional<std::string> pdg_locator(const EntityRef& entity) const;

  bool operator==(const Sdg& other) const;

 private:
  std::set<EntityRef> nodes_;
  std::set<SdgEdge> edges_;
  std::int64_t snapshot_time_ = 0;
  std::map<std::string, std::string> pdg_attachments_;
  std::map<EntityRef, std::vector<EntityRef>> out_;
  std::map<EntityRef, std::vector<EntityRef>> in_;
};

Sdg sdg_from_json(std::string_view bytes);
std::string sdg_to_json(const Sdg& sdg);

// Free-function spellings of the neighbourhood queries.
std::vector<EntityRef> sdg_dependees(const Sdg& sdg, const EntityRef& entity);

}  // namespace graphrca
