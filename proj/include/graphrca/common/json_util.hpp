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

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"

namespace graphrca {

// nlohmann::json keeps object keys in a std::map, so dump() is already
// key-sorted. Arrays are canonicalized by the writers themselves.
using Json = nlohmann::json;

// Parses text, mapping syntax errors to MalformedDocument. `what` names the
// document in the error message.
Json parse_json(std::string_view text, std::string_view what);

// Two-space indented dump terminated by a newline.
std::string canonical_dump(const Json& value);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

// Field accessors that raise SchemaViolation with the field path on
// mismatch.
const Json& require(const Json& object, std::string_view key,
                    std::string_view context);
std::string require_string(const Json& object, std::string_view key,
                           std::string_view context);
std::int64_t require_int(const Json& object, std::string_view key,
                         std::string_view context);
const Json& require_array(const Json& object, std::string_view key,
                          std::string_view context);
std::string optional_string(const Json& object, std::string_view key,
                            std::string_view fallback = {});

// 64-bit FNV-1a, hex encoded. Used for short content digests.
std::string fnv1a_hex(std::string_view data);

}  // namespace graphrca
