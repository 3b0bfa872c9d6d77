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

#include "test_support.hpp"

#include <atomic>

#include "graphrca/builder/hammock_builder.hpp"
#include "graphrca/builder/mini_lang.hpp"
#include "random_program.hpp"

namespace graphrca::testing {
namespace fs = std::filesystem;

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  std::random_device rd;
  path_ = fs::temp_directory_path() /
          ("graphrca-" + tag + "-" + std::to_string(rd()) + "-" +
           std::to_string(counter++));
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

void copy_suite_with_broken_rule(const fs::path& dest, const std::string& broken) {
  fs::copy(source_dir() / "scenarios" / "positive", dest, fs::copy_options::recursive);
  const fs::path rules_path = dest / broken / "policy" / "scripted.json";
  Json rules = Json::parse(read_file(rules_path));
  for (auto& rule : rules) {
    if (rule.value("kind", "") == "judge" && rule["reply"].value("label", "") == "PrimaryFailure") {
      rule["reply"]["cited_evidence"] = Json::array({"HTTP 500 errors observed"});
    }
  }
  write_file(rules_path, rules.dump(2));
}

Pdg random_pdg(std::mt19937_64& rng, int max_blocks) {
  oracle::ProgramShape shape;
  if (max_blocks > 0) {
    shape.max_functions = 3;
    shape.max_statements = 3;
    shape.max_depth = 2;
  }
  while (true) {
    ProgramFacts facts = parse_mini_source(oracle::random_program(rng, shape), "gen.mini");
    Pdg pdg = build_pdg(facts, "gen");
    if (max_blocks <= 0 || static_cast<int>(pdg.blocks().size()) <= max_blocks) {
      return pdg;
    }
  }
}

Pdg synthetic_pdg(std::mt19937_64& rng, int blocks) {
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  std::map<BlockId, HammockBlock> nodes;
  std::map<BlockId, BlockId> containment;
  int ordinal = 0;
  int line = 1;
  auto make = [&](Granularity g, BlockKind k, int start, int end, std::string name) {
    HammockBlock b;
    b.id = BlockId{"syn.mini:" + std::to_string(start) + "-" + std::to_string(end) + "#" +
                   std::to_string(ordinal++)};
    b.granularity = g;
    b.kind = k;
    b.span = Span{"syn.mini", start, end};
    b.code_text = k == BlockKind::kExp ? "x = f(y);" : name + " { ... }";
    if (k == BlockKind::kFunctionDef || k == BlockKind::kModule) b.name = name;
    if (pick(0, 3) == 0) b.string_literals.push_back("lit" + std::to_string(pick(0, 5)));
    nodes.emplace(b.id, b);
    return b.id;
  };
  // Each function gets a run of one-line statement blocks, some wrapped in a
  // branch or loop two lines wide.
  const int total_lines = blocks * 3 + 2;
  BlockId module = make(Granularity::kModule, BlockKind::kModule, 1, total_lines, "syn.mini");
  int remaining = blocks - 1;
  int fn_index = 0;
  while (remaining > 0) {
    int body = std::min(remaining - 1, pick(0, 5));
    int fn_start = ++line;
    int fn_end = fn_start + body * 3 + 1;
    BlockId fn = make(Granularity::kFunction, BlockKind::kFunctionDef, fn_start, fn_end,
                      "fn" + std::to_string(fn_index++));
    containment[fn] = module;
    --remaining;
    int cursor = fn_start + 1;
    for (int i = 0; i < body; ++i) {
      if (pick(0, 2) == 0 && i + 1 < body) {
        BlockId guard = make(Granularity::kStatement,
                             pick(0, 1) ? BlockKind::kBranch : BlockKind::kLoop, cursor,
                             cursor + 2, "guard");
        containment[guard] = fn;
        BlockId inner = make(Granularity::kStatement, BlockKind::kExp, cursor + 1, cursor + 1, "");
        containment[inner] = guard;
        ++i;
        remaining -= 2;
      } else {
        BlockId exp = make(Granularity::kStatement, BlockKind::kExp, cursor, cursor, "");
        containment[exp] = fn;
        --remaining;
      }
      cursor += 3;
    }
    line = fn_end;
  }
  std::vector<BlockId> ids;
  for (const auto& [id, b] : nodes) ids.push_back(id);
  std::set<PdgEdge> edges;
  const int edge_count = pick(0, blocks * 2);
  static const char* kLabels[] = {"x", "y", "items", "rows"};
  for (int i = 0; i < edge_count; ++i) {
    const BlockId& a = ids[static_cast<std::size_t>(pick(0, static_cast<int>(ids.size()) - 1))];
    const BlockId& b = ids[static_cast<std::size_t>(pick(0, static_cast<int>(ids.size()) - 1))];
    EdgeKind kind = static_cast<EdgeKind>(pick(0, 2));
    if (kind == EdgeKind::kCall && a == b) continue;
    std::optional<std::string> label;
    if (kind != EdgeKind::kCtl || pick(0, 1)) label = kLabels[pick(0, 3)];
    edges.insert(PdgEdge{a, b, kind, label});
  }
  return Pdg("syn", std::move(nodes), std::move(edges), std::move(containment));
}

}  // namespace graphrca::testing
