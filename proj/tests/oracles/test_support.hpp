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

// Small helpers shared by the test binaries.

#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "graphrca/graph/pdg.hpp"

namespace graphrca::testing {

inline std::filesystem::path source_dir() { return GRAPHRCA_SOURCE_DIR; }
inline std::filesystem::path scenario_dir(const std::string& group, const std::string& id) {
  return source_dir() / "scenarios" / group / id;
}

// A fresh directory under the system temp dir, removed by the destructor.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// A valid PDG built from a random program, with at most `max_blocks`
// blocks when max_blocks > 0.
Pdg random_pdg(std::mt19937_64& rng, int max_blocks = 0);

// A valid PDG made directly (module, functions, nested statement blocks and
// random dependence edges), without going through the builder.
Pdg synthetic_pdg(std::mt19937_64& rng, int blocks);

// Copies the positive scenario suite into `dest` and, in the bundle named
// `broken`, replaces the evidence of every PrimaryFailure judgment with a
// symptom-level citation. The entity stays correct, the reasoning does not.
void copy_suite_with_broken_rule(const std::filesystem::path& dest, const std::string& broken);

}  // namespace graphrca::testing
