// Copyright 2026 The chronoscope Authors
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

#include "chronoscope/aot.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace chronoscope {

using json = nlohmann::json;

// Invalid configuration; line is 0 when no source position is known.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line = 0) : std::runtime_error(what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Line of each object key and array element of a JSON text, by JSON pointer.
class JsonLocator {
 public:
  JsonLocator() = default;
  explicit JsonLocator(std::string_view text);
  // Line of the nearest located ancestor of pointer; 0 when unknown.
  int line(const std::string& pointer) const;

 private:
  std::map<std::string, int> lines_;
};

// Parses text, mapping syntax errors to ConfigError with a line.
json parse_config_text(const std::string& text);

const std::string& config_schema_text();
const json& config_schema();

// Validates doc against the subset of JSON Schema used by the published
// schema: type, enum, properties, required, additionalProperties, items,
// minItems, maxItems, minimum, maximum, exclusiveMinimum, exclusiveMaximum,
// minLength, pattern and local $ref.
void validate_schema(const json& doc, const json& schema, const JsonLocator& where = {});

// Field serialization: one record per lattice point with the eight neighbor
// CI values in neighbor order, null where the neighbor is outside the lattice.
json field_json(const AotField& field);
std::string entropy_csv(const AotField& field);

struct SvgRendering {
  std::string svg;
  double arrow_scale = 0.0;  // drawn length per unit of field magnitude, cell units
};
SvgRendering field_svg(const AotField& field, const std::string& title);

std::string dump(const json& j);

// Files are written as <name>.partial and renamed on commit; uncommitted
// files are removed on destruction.
class StagedOutput {
 public:
  explicit StagedOutput(std::filesystem::path dir);
  ~StagedOutput();
  StagedOutput(const StagedOutput&) = delete;
  StagedOutput& operator=(const StagedOutput&) = delete;

  void write(const std::string& name, const std::string& contents);
  std::vector<std::filesystem::path> commit();

 private:
  std::filesystem::path dir_;
  std::vector<std::filesystem::path> staged_;
  bool committed_ = false;
};

}  // namespace chronoscope
