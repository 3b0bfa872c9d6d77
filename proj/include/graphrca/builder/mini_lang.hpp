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
// Frontend for the bundled mini-language. The grammar is documented in
// docs/mini-language.md. Returns are only allowed as the final statement of
// a function body, so every function has a single exit.

#pragma once

#include <string>
#include <string_view>

#include "graphrca/builder/program_facts.hpp"

namespace graphrca {

// Throws ParseError with line/column.
ProgramFacts parse_mini_source(std::string_view text, std::string file);

}  // namespace graphrca
