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

#include "graphrca/graph/pdg.hpp"

#include <algorithm>
#include <cctype>

#include "graphrca/common/error.hpp"

namespace graphrca {

std::string_view to_string(Granularity g) {
  switch (g) {
    case Granularity::kModule:
      return "module";
    case Granularity::kClass:
      return "class";
    case Granularity::kFunction:
      return "function";
    case Granularity::kStatement:
      return "statement";
  }
  return "statement";
}

std::string_view to_string(BlockKind k) {
  switch (k) {
    case BlockKind::kExp:
      return "exp";
    case BlockKind::kBranch:
      return "branch";
    case BlockKind::kLoop:
      return "loop";
    case BlockKind::kTry:
      return "try";
    case BlockKind::kFunctionDef:
      return "function_def";
    case BlockKind::kClassDef:
      return "class_def";
    case BlockKind::kModule:
      return "module";
  }
  return "exp";
}

std::string_view to_string(EdgeKind k) {
  switch (k) {
    case EdgeKind::kCtl:
      return "ctl";
    case EdgeKind::kData:
      return "data";
    case EdgeKind::kCall:
      return "call";
  }
  return "ctl";
}

std::string_view to_string(Direction d) {
  return d == Direction::kOut ? "out" : "in";
}

std::optional<Granularity> parse_granularity(std::string_view text) {
  for (auto g : {Granularity::kModule, Granularity::kClass,
                 Granularity::kFunction, Granularity::kStatement}) {
    if (to_string(g) == text) return g;
  }
  return std::nullopt;
}

std::optional<BlockKind> parse_block_kind(std::string_view text) {
  for (auto k : {BlockKind::kExp, BlockKind::kBranch, BlockKind::kLoop,
                 BlockKind::kTry, BlockKind::kFunctionDef, BlockKind::kClassDef,
                 BlockKind::kModule}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

std::optional<EdgeKind> parse_edge_kind(std::string_view text) {
  for (auto k : {EdgeKind::kCtl, EdgeKind::kData, EdgeKind::kCall}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

Pdg::Pdg(std::string service, std::map<BlockId, HammockBlock> blocks,
         std::set<PdgEdge> edges, std::map<BlockId, BlockId> containment)
    : service_(std::move(service)),
      blocks_(std::move(blocks)),
      edges_(std::move(edges)),
      containment_(std::move(containment)) {
  for (const auto& edge : edges_) {
    out_[edge.from].push_back(edge);
    in_[edge.to].push_back(edge);
  }
  for (const auto& [child, parent] : containment_) {
    children_[parent].push_back(child);
  }
}

const HammockBlock& Pdg::block(const BlockId& id) const {
  auto it = blocks_.find(id);
  if (it == blocks_.end()) throw UnknownBlock(id.value);
  return it->second;
}

std::vector<Neighbor> Pdg::neighbors(const BlockId& id,
                                     const EdgeKindSet& kinds) const {
  if (!contains(id)) throw UnknownBlock(id.value);
  std::vector<Neighbor> result;
  auto collect = [&](const auto& index, Direction direction) {
    auto it = index.find(id);
    if (it == index.end()) return;
    for (const PdgEdge& edge : it->second) {
      if (!kinds.contains(edge.kind)) continue;
      const BlockId& other = direction == Direction::kOut ? edge.to : edge.from;
      auto block_it = blocks_.find(other);
      if (block_it == blocks_.end()) continue;  // dangling; validate reports it
      result.push_back(Neighbor{block_it->second, edge, direction});
    }
  };
  collect(out_, Direction::kOut);
  collect(in_, Direction::kIn);
  std::stable_sort(result.begin(), result.end(),
                   [](const Neighbor& a, const Neighbor& b) {
                     if (a.edge.kind != b.edge.kind) {
                       return a.edge.kind < b.edge.kind;
                     }
                     if (a.direction != b.direction) {
                       return a.direction < b.direction;
                     }
                     if (a.block.id != b.block.id) return a.block.id < b.block.id;
                     return a.edge.label < b.edge.label;
                   });
  return result;
}

std::optional<HammockBlock> Pdg::parent(const BlockId& id) const {
  if (!contains(id)) throw UnknownBlock(id.value);
  auto it = containment_.find(id);
  if (it == containment_.end()) return std::nullopt;
  auto parent_it = blocks_.find(it->second);
  if (parent_it == blocks_.end()) return std::nullopt;
  return parent_it->second;
}

std::vector<BlockId> Pdg::children(const BlockId& id) const {
  auto it = children_.find(id);
  if (it == children_.end()) return {};
  return it->second;
}

std::vector<BlockId> Pdg::roots() const {
  std::vector<BlockId> roots;
  for (const auto& [id, _] : blocks_) {
    if (!containment_.contains(id)) roots.push_back(id);
  }
  return roots;
}

bool ValidationReport::has(std::string_view code) const {
  return std::any_of(violations.begin(), violations.end(),
                     [&](const Violation& v) { return v.code == code; });
}

namespace {

// True if the text, with string literals and comments removed, contains a
// branching keyword of the mini-language.
bool contains_branching(std::string_view text) {
  static const std::set<std::string> kKeywords{"if", "else", "while", "try",
                                               "catch"};
  std::string word;
  bool in_string = false;
  bool in_comment = false;
  auto flush = [&]() {
    bool hit = kKeywords.contains(word);
    word.clear();
    return hit;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (in_comment) {
      if (c == '\n') in_comment = false;
      continue;
    }
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      if (flush()) return true;
      in_string = true;
    } else if (c == '#') {
      if (flush()) return true;
      in_comment = true;
    } else if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
      word.push_back(c);
    } else if (flush()) {
      return true;
    }
  }
  return flush();
}

std::string describe(const PdgEdge& edge) {
  return edge.from.value + " -" + std::string(to_string(edge.kind)) + "-> " +
         edge.to.value;
}

}  // namespace

ValidationReport pdg_validate(const Pdg& pdg) {
  ValidationReport report;
  auto add = [&](std::string code, std::string message,
                 std::vector<std::string> subjects) {
    report.violations.push_back(
        Violation{std::move(code), std::move(message), std::move(subjects)});
  };
  const auto& blocks = pdg.blocks();
  const auto& containment = pdg.containment();

  for (const auto& [key, block] : blocks) {
    if (key.value.empty()) {
      add("empty_block_id", "block with empty id", {});
    }
    if (key != block.id) {
      add("block_key_mismatch",
          "block stored under '" + key.value + "' has id '" + block.id.value +
              "'",
          {key.value, block.id.value});
    }
    if (block.span.start > block.span.end) {
      add("bad_span", "span start after end in " + key.value, {key.value});
    }
    if (block.kind == BlockKind::kExp) {
      if (block.granularity != Granularity::kStatement) {
        add("exp_granularity",
            "exp block " + key.value + " must have statement granularity",
            {key.value});
      }
      if (contains_branching(block.code_text)) {
        add("exp_branching",
            "exp block " + key.value + " contains a branching construct",
            {key.value});
      }
    }
  }

  for (const auto& edge : pdg.edges()) {
    for (const BlockId* end : {&edge.from, &edge.to}) {
      if (!blocks.contains(*end)) {
        add("dangling_edge",
            "edge " + describe(edge) + " references unknown block " +
                end->value,
            {describe(edge), end->value});
      }
    }
    if (edge.kind == EdgeKind::kCall && edge.from == edge.to) {
      add("call_self_loop", "call edge from " + edge.from.value + " to itself",
          {edge.from.value});
    }
  }

  // Containment endpoints and cycles.
  for (const auto& [child, parent] : containment) {
    if (!blocks.contains(child)) {
      add("containment_unknown_child",
          "containment entry for unknown block " + child.value, {child.value});
    }
    if (!blocks.contains(parent)) {
      add("containment_unknown_parent",
          "block " + child.value + " has unknown parent " + parent.value,
          {child.value, parent.value});
    }
    if (child == parent) {
      add("containment_cycle",
          "containment not a forest: " + child.value + " contains itself",
          {child.value});
    }
  }
  std::set<BlockId> reported_cycle;
  for (const auto& [start, _] : containment) {
    std::vector<BlockId> chain;
    std::set<BlockId> seen;
    BlockId cursor = start;
    while (true) {
      if (seen.contains(cursor)) {
        // cursor is on a cycle; collect its members.
        std::vector<std::string> members;
        BlockId walk = cursor;
        bool fresh = !reported_cycle.contains(cursor);
        do {
          members.push_back(walk.value);
          reported_cycle.insert(walk);
          walk = containment.at(walk);
        } while (walk != cursor);
        if (fresh && members.size() > 1) {
          std::sort(members.begin(), members.end());
          std::string joined;
          for (const auto& m : members) joined += (joined.empty() ? "" : ", ") + m;
          add("containment_cycle", "containment not a forest: cycle through " + joined,
              members);
        }
        break;
      }
      seen.insert(cursor);
      auto it = containment.find(cursor);
      if (it == containment.end()) break;
      cursor = it->second;
    }
  }

  // Span nesting against the parent, and root granularity.
  for (const auto& [child, parent] : containment) {
    auto c = blocks.find(child);
    auto p = blocks.find(parent);
    if (c == blocks.end() || p == blocks.end() || child == parent) continue;
    if (!p->second.span.encloses(c->second.span)) {
      add("span_not_nested",
          "span of " + child.value + " is not inside its parent " + parent.value,
          {child.value, parent.value});
    }
  }
  std::map<std::string, std::vector<const HammockBlock*>> modules_by_file;
  for (const auto& [id, block] : blocks) {
    if (block.kind == BlockKind::kModule) {
      modules_by_file[block.span.file].push_back(&block);
    }
  }
  for (const auto& [id, block] : blocks) {
    if (containment.contains(id)) continue;
    if (block.granularity != Granularity::kModule &&
        block.granularity != Granularity::kFunction) {
      add("root_granularity",
          "root block " + id.value + " has granularity " +
              std::string(to_string(block.granularity)),
          {id.value});
    }
    if (block.kind == BlockKind::kModule) continue;
    auto mods = modules_by_file.find(block.span.file);
    if (mods == modules_by_file.end()) continue;
    for (const HammockBlock* module : mods->second) {
      if (module->span.encloses(block.span)) {
        add("orphan_block",
            "block " + id.value + " lies inside module " + module->id.value +
                " but has no containment parent",
            {id.value, module->id.value});
        break;
      }
    }
  }

  // Sibling spans.
  std::map<BlockId, std::vector<BlockId>> siblings;
  for (const auto& [child, parent] : containment) {
    if (blocks.contains(child)) siblings[parent].push_back(child);
  }
  for (const auto& [parent, kids] : siblings) {
    for (std::size_t i = 0; i < kids.size(); ++i) {
      for (std::size_t j = i + 1; j < kids.size(); ++j) {
        const Span& a = blocks.at(kids[i]).span;
        const Span& b = blocks.at(kids[j]).span;
        if (a.overlaps(b)) {
          add("sibling_overlap",
              "sibling blocks " + kids[i].value + " and " + kids[j].value +
                  " overlap",
              {kids[i].value, kids[j].value});
        }
      }
    }
  }
  return report;
}

Json block_to_json(const HammockBlock& block) {
  Json literals = Json::array();
  for (const auto& lit : block.string_literals) literals.push_back(lit);
  return Json{{"id", block.id.value},
              {"granularity", std::string(to_string(block.granularity))},
              {"kind", std::string(to_string(block.kind))},
              {"span",
               Json{{"file", block.span.file},
                    {"start", block.span.start},
                    {"end", block.span.end}}},
              {"code_text", block.code_text},
              {"name", block.name ? Json(*block.name) : Json(nullptr)},
              {"string_literals", std::move(literals)}};
}

std::string pdg_to_json(const Pdg& pdg) {
  Json blocks = Json::array();
  for (const auto& [_, block] : pdg.blocks()) {
    blocks.push_back(block_to_json(block));
  }
  // Sorted edge set groups naturally by source.
  Json adjacency = Json::array();
  for (const auto& edge : pdg.edges()) {
    if (adjacency.empty() || adjacency.back()["from"] != edge.from.value) {
      adjacency.push_back(Json{{"from", edge.from.value}, {"out", Json::array()}});
    }
    adjacency.back()["out"].push_back(
        Json{{"to", edge.to.value},
             {"kind", std::string(to_string(edge.kind))},
             {"label", edge.label ? Json(*edge.label) : Json(nullptr)}});
  }
  Json containment = Json::array();
  for (const auto& [child, parent] : pdg.containment()) {
    containment.push_back(Json{{"child", child.value}, {"parent", parent.value}});
  }
  Json doc{{"version", 1},
           {"service", pdg.service()},
           {"blocks", std::move(blocks)},
           {"adjacency", std::move(adjacency)},
           {"containment", std::move(containment)}};
  return canonical_dump(doc);
}

namespace {

std::optional<std::string> optional_text(const Json& object,
                                         std::string_view key,
                                         std::string_view context) {
  auto it = object.find(key);
  if (it == object.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) {
    throw SchemaViolation(std::string(context) + ": field '" +
                          std::string(key) + "' must be a string or null");
  }
  return it->get<std::string>();
}

HammockBlock block_from_json(const Json& item) {
  const std::string ctx = "pdg.blocks";
  HammockBlock block;
  block.id = BlockId{require_string(item, "id", ctx)};
  if (block.id.value.empty()) throw SchemaViolation(ctx + ": empty block id");
  std::string gran = require_string(item, "granularity", ctx);
  auto g = parse_granularity(gran);
  if (!g) throw SchemaViolation(ctx + ": unknown granularity '" + gran + "'");
  block.granularity = *g;
  std::string kind = require_string(item, "kind", ctx);
  auto k = parse_block_kind(kind);
  if (!k) throw SchemaViolation(ctx + ": unknown block kind '" + kind + "'");
  block.kind = *k;
  const Json& span = require(item, "span", ctx);
  block.span.file = require_string(span, "file", ctx + ".span");
  block.span.start = static_cast<int>(require_int(span, "start", ctx + ".span"));
  block.span.end = static_cast<int>(require_int(span, "end", ctx + ".span"));
  block.code_text = optional_string(item, "code_text");
  block.name = optional_text(item, "name", ctx);
  if (item.contains("string_literals")) {
    for (const auto& lit : require_array(item, "string_literals", ctx)) {
      if (!lit.is_string()) {
        throw SchemaViolation(ctx + ": string_literals must hold strings");
      }
      block.string_literals.push_back(lit.get<std::string>());
    }
  }
  return block;
}

}  // namespace

Pdg pdg_from_json(std::string_view bytes) {
  Json doc = parse_json(bytes, "pdg");
  if (!doc.is_object()) throw SchemaViolation("pdg: top level must be object");
  if (doc.contains("version") && doc["version"] != 1) {
    throw SchemaViolation("pdg: unsupported version");
  }
  std::string service = require_string(doc, "service", "pdg");

  std::map<BlockId, HammockBlock> blocks;
  for (const auto& item : require_array(doc, "blocks", "pdg")) {
    HammockBlock block = block_from_json(item);
    BlockId id = block.id;
    if (!blocks.emplace(id, std::move(block)).second) {
      throw SchemaViolation("pdg: duplicate block id " + id.value);
    }
  }
  std::set<PdgEdge> edges;
  if (doc.contains("adjacency")) {
    for (const auto& entry : require_array(doc, "adjacency", "pdg")) {
      BlockId from{require_string(entry, "from", "pdg.adjacency")};
      for (const auto& out : require_array(entry, "out", "pdg.adjacency")) {
        std::string kind = require_string(out, "kind", "pdg.adjacency.out");
        auto k = parse_edge_kind(kind);
        if (!k) {
          throw SchemaViolation("pdg.adjacency.out: unknown edge kind '" + kind +
                                "'");
        }
        edges.insert(PdgEdge{from,
                             BlockId{require_string(out, "to", "pdg.adjacency.out")},
                             *k, optional_text(out, "label", "pdg.adjacency.out")});
      }
    }
  }
  std::map<BlockId, BlockId> containment;
  if (doc.contains("containment")) {
    for (const auto& entry : require_array(doc, "containment", "pdg")) {
      BlockId child{require_string(entry, "child", "pdg.containment")};
      BlockId parent{require_string(entry, "parent", "pdg.containment")};
      auto [it, inserted] = containment.emplace(child, parent);
      if (!inserted && it->second != parent) {
        throw SchemaViolation("containment not a forest: " + child.value +
                              " has more than one parent");
      }
    }
  }
  Pdg pdg(std::move(service), std::move(blocks), std::move(edges),
          std::move(containment));
  ValidationReport report = pdg_validate(pdg);
  if (!report.ok()) {
    // Forest breaches are the most fundamental, report them first.
    for (const auto& v : report.violations) {
      if (v.code == "containment_cycle") throw SchemaViolation(v.message);
    }
    throw SchemaViolation(report.violations.front().message);
  }
  return pdg;
}

std::vector<Neighbor> pdg_neighbors(const Pdg& pdg, const BlockId& id,
                                    const EdgeKindSet& kinds) {
  return pdg.neighbors(id, kinds);
}

std::optional<HammockBlock> pdg_parent(const Pdg& pdg, const BlockId& id) {
  return pdg.parent(id);
}

}  // namespace graphrca
