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

#include "graphrca/builder/program_facts.hpp"

#include "graphrca/common/error.hpp"

namespace graphrca {

std::string_view to_string(RegionKind kind) {
  switch (kind) {
    case RegionKind::kModule:
      return "module";
    case RegionKind::kClass:
      return "class";
    case RegionKind::kFunction:
      return "function";
    case RegionKind::kStatement:
      return "statement";
    case RegionKind::kBranch:
      return "branch";
    case RegionKind::kLoop:
      return "loop";
    case RegionKind::kTry:
      return "try";
  }
  return "statement";
}

std::optional<RegionKind> parse_region_kind(std::string_view text) {
  for (auto k : {RegionKind::kModule, RegionKind::kClass, RegionKind::kFunction,
                 RegionKind::kStatement, RegionKind::kBranch, RegionKind::kLoop,
                 RegionKind::kTry}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

std::string_view to_string(Arm arm) {
  switch (arm) {
    case Arm::kNone:
      return "";
    case Arm::kThen:
      return "then";
    case Arm::kElse:
      return "else";
    case Arm::kBody:
      return "body";
    case Arm::kCatch:
      return "catch";
  }
  return "";
}

std::optional<Arm> parse_arm(std::string_view text) {
  for (auto a : {Arm::kNone, Arm::kThen, Arm::kElse, Arm::kBody, Arm::kCatch}) {
    if (to_string(a) == text) return a;
  }
  return std::nullopt;
}

namespace {

Json string_list(const std::vector<std::string>& items) {
  Json out = Json::array();
  for (const auto& item : items) out.push_back(item);
  return out;
}

std::vector<std::string> read_list(const Json& region, std::string_view key) {
  std::vector<std::string> out;
  auto it = region.find(key);
  if (it == region.end() || it->is_null()) return out;
  if (!it->is_array()) {
    throw SchemaViolation("facts.regions: '" + std::string(key) +
                          "' must be an array");
  }
  for (const auto& item : *it) {
    if (!item.is_string()) {
      throw SchemaViolation("facts.regions: '" + std::string(key) +
                            "' must hold strings");
    }
    out.push_back(item.get<std::string>());
  }
  return out;
}

}  // namespace

Json facts_to_json(const ProgramFacts& facts) {
  Json regions = Json::array();
  for (const auto& r : facts.regions) {
    Json item{{"region_id", r.region_id},
              {"syntactic_kind", std::string(to_string(r.kind))},
              {"span", Json{{"start", r.start}, {"end", r.end}}},
              {"text", r.text},
              {"defs", string_list(r.defs)},
              {"uses", string_list(r.uses)},
              {"calls", string_list(r.calls)},
              {"string_literals", string_list(r.string_literals)},
              {"parent_region_id",
               r.parent_region_id ? Json(*r.parent_region_id) : Json(nullptr)}};
    if (r.arm != Arm::kNone) item["arm"] = std::string(to_string(r.arm));
    if (r.name) item["name"] = *r.name;
    regions.push_back(std::move(item));
  }
  return Json{{"version", 1}, {"file", facts.file}, {"regions", std::move(regions)}};
}

ProgramFacts facts_from_json(std::string_view bytes) {
  Json doc = parse_json(bytes, "facts");
  ProgramFacts facts;
  facts.file = require_string(doc, "file", "facts");
  for (const auto& item : require_array(doc, "regions", "facts")) {
    const std::string ctx = "facts.regions";
    Region r;
    r.region_id = require_string(item, "region_id", ctx);
    std::string kind = require_string(item, "syntactic_kind", ctx);
    auto k = parse_region_kind(kind);
    if (!k) throw SchemaViolation(ctx + ": unknown syntactic_kind '" + kind + "'");
    r.kind = *k;
    const Json& span = require(item, "span", ctx);
    r.start = static_cast<int>(require_int(span, "start", ctx + ".span"));
    r.end = static_cast<int>(require_int(span, "end", ctx + ".span"));
    r.text = optional_string(item, "text");
    r.defs = read_list(item, "defs");
    r.uses = read_list(item, "uses");
    r.calls = read_list(item, "calls");
    r.string_literals = read_list(item, "string_literals");
    if (auto it = item.find("parent_region_id");
        it != item.end() && !it->is_null()) {
      if (!it->is_string()) {
        throw SchemaViolation(ctx + ": parent_region_id must be a string");
      }
      r.parent_region_id = it->get<std::string>();
    }
    std::string arm = optional_string(item, "arm");
    auto a = parse_arm(arm);
    if (!a) throw SchemaViolation(ctx + ": unknown arm '" + arm + "'");
    r.arm = *a;
    if (item.contains("name") && item["name"].is_string()) {
      r.name = item["name"].get<std::string>();
    }
    facts.regions.push_back(std::move(r));
  }
  return facts;
}

}  // namespace graphrca
