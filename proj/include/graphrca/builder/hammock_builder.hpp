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
// Hammock-block PDG construction from program facts.
//
// extract_hammocks turns the region tree into blocks: module, class and
// function regions map one to one, each branch/loop/try region becomes its
// own statement-level block, and every maximal run of adjacent statement
// regions inside the same arm collapses into one `exp` block.
//
// derive_edges adds
//   ctl  from each branch/loop/try block to the blocks it guards, and from
//        a function (or module) entry to its top-level statement blocks;
//   data from a defining block to a using block along a def-clear path
//        (intraprocedural reaching definitions; module-level definitions
//        also reach functions that never bind the name locally);
//   call from the block holding a call site to the callee's function block,
//        resolved by name inside the service.

#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "graphrca/builder/program_facts.hpp"
#include "graphrca/graph/pdg.hpp"

namespace graphrca {

struct Hammocks {
  std::map<BlockId, HammockBlock> blocks;
  std::map<BlockId, BlockId> containment;
  // Facts regions folded into each block (one, or a run of statements).
  std::map<BlockId, std::vector<std::string>> members;
  // file -> region id -> owning block
  std::map<std::string, std::map<std::string, BlockId>> block_of_region;
  // Arm of the enclosing branch/loop/try a block sits in, if any.
  std::map<BlockId, Arm> arm_of;
};

struct EdgeDerivation {
  std::set<PdgEdge> edges;
  // Call sites whose callee could not be resolved, "<block>: <callee>".
  std::vector<std::string> unresolved_calls;
};

// Throws InconsistentFacts when the region tree is malformed.
void check_facts(const ProgramFacts& facts);

Hammocks extract_hammocks(const ProgramFacts& facts);
// Multi-file form; ids stay per-file.
Hammocks extract_hammocks(const std::vector<ProgramFacts>& files);

EdgeDerivation derive_edges(const std::vector<ProgramFacts>& files,
                            const Hammocks& hammocks);
EdgeDerivation derive_edges(const ProgramFacts& facts, const Hammocks& hammocks);

Pdg build_pdg(const ProgramFacts& facts, const std::string& service);
Pdg build_pdg(const std::vector<ProgramFacts>& files, const std::string& service,
              std::vector<std::string>* diagnostics = nullptr);

// Parses every *.mini file under `dir` (sorted by relative path) and builds
// one service PDG. Files are parsed concurrently unless `parallel` is false;
// both paths produce the same Pdg. Fails the whole build on any parse error.
Pdg build_service_pdg_from_sources(const std::filesystem::path& dir,
                                   const std::string& service,
                                   std::vector<std::string>* diagnostics = nullptr,
                                   bool parallel = true);

// Loads every facts JSON document under `dir`.
std::vector<ProgramFacts> load_facts_dir(const std::filesystem::path& dir);

}  // namespace graphrca
