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
// Neutral per-file program facts: a region tree with lexical def/use/call
// sets. Any frontend that can produce this shape can feed the PDG builder.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "graphrca/common/json_util.hpp"

namespace graphrca {

enum class RegionKind {
  kModule,
  kClass,
  kFunction,
  kStatement,
  kBranch,
  kLoop,
  kTry
};

// Which arm of a branch/loop/try region a child belongs to.
enum class Arm { kNone, kThen, kElse, kBody, kCatch };

std::string_view to_string(RegionKind kind);
std::optional<RegionKind> parse_region_kind(std::string_view text);
std::string_view to_string(Arm arm);
std::optional<Arm> parse_arm(std::string_view text);

struct Region {
  std::string region_id;
  RegionKind kind = RegionKind::kStatement;
  int start = 0;
  int end = 0;
  std::string text;
  // For a function: its parameters. For branch/loop: the condition's
  // uses. For try: the catch variable.
  std::vector<std::string> defs;
  std::vector<std::string> uses;
  std::vector<std::string> calls;
  std::vector<std::string> string_literals;
  std::optional<std::string> parent_region_id;
  Arm arm = Arm::kNone;
  std::optional<std::string> name;  // function or class name

  bool operator==(const Region&) const = default;
};

// Regions are listed in source pre-order.
struct ProgramFacts {
  std::string file;
  std::vector<Region> regions;

  bool operator==(const ProgramFacts&) const = default;
};

Json facts_to_json(const ProgramFacts& facts);
ProgramFacts facts_from_json(std::string_view bytes);

}  // namespace graphrca
