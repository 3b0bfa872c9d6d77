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

#include "graphrca/common/json_util.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "graphrca/common/error.hpp"

namespace graphrca {

Json parse_json(std::string_view text, std::string_view what) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw MalformedDocument(std::string(what) + ": " + e.what());
  }
}

std::string canonical_dump(const Json& value) {
  return value.dump(2, ' ', false, Json::error_handler_t::replace) + "\n";
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingFixture("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
}

const Json& require(const Json& object, std::string_view key,
                    std::string_view context) {
  if (!object.is_object()) {
    throw SchemaViolation(std::string(context) + ": expected an object");
  }
  auto it = object.find(key);
  if (it == object.end()) {
    throw SchemaViolation(std::string(context) + ": missing field '" +
                          std::string(key) + "'");
  }
  return *it;
}

std::string require_string(const Json& object, std::string_view key,
                           std::string_view context) {
  const Json& value = require(object, key, context);
  if (!value.is_string()) {
    throw SchemaViolation(std::string(context) + ": field '" +
                          std::string(key) + "' must be a string");
  }
  return value.get<std::string>();
}

std::int64_t require_int(const Json& object, std::string_view key,
                         std::string_view context) {
  const Json& value = require(object, key, context);
  if (!value.is_number_integer()) {
    throw SchemaViolation(std::string(context) + ": field '" +
                          std::string(key) + "' must be an integer");
  }
  return value.get<std::int64_t>();
}

const Json& require_array(const Json& object, std::string_view key,
                          std::string_view context) {
  const Json& value = require(object, key, context);
  if (!value.is_array()) {
    throw SchemaViolation(std::string(context) + ": field '" +
                          std::string(key) + "' must be an array");
  }
  return value;
}

std::string optional_string(const Json& object, std::string_view key,
                            std::string_view fallback) {
  if (!object.is_object()) return std::string(fallback);
  auto it = object.find(key);
  if (it == object.end() || !it->is_string()) return std::string(fallback);
  return it->get<std::string>();
}

std::string fnv1a_hex(std::string_view data) {
  std::uint64_t hash = 1469598103934665603ULL;
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(hash));
  return buf;
}

}  // namespace graphrca
