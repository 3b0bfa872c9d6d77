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
// Program dependence graph over hammock blocks. Nodes are single-entry
// single-exit code regions at module, class, function or statement
// granularity; edges carry control, data and call dependence; a containment
// map records which block syntactically encloses which.

#pragma once

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "graphrca/common/json_util.hpp"

namespace graphrca {

// Format "<file>:<start_line>-<end_line>#<ordinal>".
struct BlockId {
  std::string value;

  auto operator<=>(const BlockId&) const = default;
};

enum class Granularity { kModule, kClass, kFunction, kStatement };
enum class BlockKind {
  kExp,
  kBranch,
  kLoop,
  kTry,
  kFunctionDef,
  kClassDef,
  kModule
};
enum class EdgeKind { kCtl, kData, kCall };
enum class Direction { kOut, kIn };

std::string_view to_string(Granularity g);
std::string_view to_string(BlockKind k);
std::string_view to_string(EdgeKind k);
std::string_view to_string(Direction d);
std::optional<Granularity> parse_granularity(std::string_view text);
std::optional<BlockKind> parse_block_kind(std::string_view text);
std::optional<EdgeKind> parse_edge_kind(std::string_view text);

struct Span {
  std::string file;
  int start = 0;
  int end = 0;

  auto operator<=>(const Span&) const = default;

  bool encloses(const Span& inner) const {
    return file == inner.file && start <= inner.start && inner.end <= end;
  }
  // Line spans may share a boundary line because several statements can sit
  // on one line; only a strict interleaving counts as overlap.
  bool overlaps(const Span& other) const {
    return file == other.file && start < other.end && other.start < end;
  }
};

struct HammockBlock {
  BlockId id;
  Granularity granularity = Granularity::kStatement;
  BlockKind kind = BlockKind::kExp;
  Span span;
  std::string code_text;
  std::optional<std::string> name;
  std::vector<std::string> string_literals;

  bool operator==(const HammockBlock&) const = default;
};

struct PdgEdge {
  BlockId from;
  BlockId to;
  EdgeKind kind = EdgeKind::kCtl;
  std::optional<std::string> label;

  auto operator<=>(const PdgEdge&) const = default;
};

struct Neighbor {
  HammockBlock block;
  PdgEdge edge;
  Direction direction = Direction::kOut;

  bool operator==(const Neighbor&) const = default;
};

using EdgeKindSet = std::set<EdgeKind>;
inline const EdgeKindSet kAllEdgeKinds{EdgeKind::kCtl, EdgeKind::kData,
                                       EdgeKind::kCall};

// Value type. Construction indexes but does not validate; pdg_validate
// reports invariant breaches and pdg_from_json rejects them.
class Pdg {
 public:
  Pdg() = default;
  Pdg(std::string service, std::map<BlockId, HammockBlock> blocks,
      std::set<PdgEdge> edges, std::map<BlockId, BlockId> containment);

  const std::string& service() const { return service_; }
  const std::map<BlockId, HammockBlock>& blocks() const { return blocks_; }
  const std::set<PdgEdge>& edges() const { return edges_; }
  const std::map<BlockId, BlockId>& containment() const { return containment_; }

  bool empty() const { return blocks_.empty(); }
  bool contains(const BlockId& id) const { return blocks_.contains(id); }
  // Throws UnknownBlock.
  const HammockBlock& block(const BlockId& id) const;

  // Both directions, filtered by kind, ordered by (kind, direction, id).
  std::vector<Neighbor> neighbors(const BlockId& id,
                                  const EdgeKindSet& kinds) const;
  std::optional<HammockBlock> parent(const BlockId& id) const;
  // Immediate children in block-id order.
  std::vector<BlockId> children(const BlockId& id) const;
  std::vector<BlockId> roots() const;

  bool operator==(const Pdg& other) const {
    return service_ == other.service_ && blocks_ == other.blocks_ &&
           edges_ == other.edges_ && containment_ == other.containment_;
  }

 private:
  std::string service_;
  std::map<BlockId, HammockBlock> blocks_;
  std::set<PdgEdge> edges_;
  std::map<BlockId, BlockId> containment_;
  std::map<BlockId, std::vector<PdgEdge>> out_;
  std::map<BlockId, std::vector<PdgEdge>> in_;
  std::map<BlockId, std::vector<BlockId>> children_;
};

struct Violation {
  std::string code;  // e.g. "dangling_edge", "containment_cycle"
  std::string message;
  std::vector<std::string> subjects;  // block ids or edge descriptions

  bool operator==(const Violation&) const = default;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool has(std::string_view code) const;
};

ValidationReport pdg_validate(const Pdg& pdg);

// Throws MalformedDocument or SchemaViolation (with the first violation).
Pdg pdg_from_json(std::string_view bytes);
// Canonical: sorted blocks, adjacency and containment lists.
std::string pdg_to_json(const Pdg& pdg);

Json block_to_json(const HammockBlock& block);

std::vector<Neighbor> pdg_neighbors(const Pdg& pdg, const BlockId& id,
                                    const EdgeKindSet& kinds);
std::optional<HammockBlock> pdg_parent(const Pdg& pdg, const BlockId& id);

}  // namespace graphrca
