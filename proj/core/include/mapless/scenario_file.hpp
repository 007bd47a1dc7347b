// Copyright 2026 Mapless Drive Contributors
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

#ifndef MAPLESS_SCENARIO_FILE_HPP
#define MAPLESS_SCENARIO_FILE_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include "mapless/simulator.hpp"

namespace mapless {

/// Configuration error; the message names the offending file, key, and line.
class ScenarioError : public std::runtime_error {
 public:
  explicit ScenarioError(const std::string& what) : std::runtime_error(what) {}
};

/// Parsed scenario text: ordered section/key/value entries with source
/// locations. `#` starts a comment; sections are [track], [sensors],
/// [controller], [fsm], [run].
struct ScenarioDoc {
  struct Entry {
    std::string section;
    std::string key;
    std::string value;
    int line = 0;
  };
  std::string source;  // file path or synthetic name, for diagnostics
  std::vector<Entry> entries;
};

ScenarioDoc parse_scenario_file(const std::string& path);
ScenarioDoc parse_scenario_text(const std::string& text,
                                const std::string& source_name);

/// Replaces (or appends) the entry addressed by "section.key".
/// Throws ScenarioError for a malformed address or unknown section.
void set_value(ScenarioDoc& doc, const std::string& dotted_key,
               const std::string& value);

/// Builds and validates a Scenario. Throws ScenarioError for unknown keys,
/// unparseable values, or invariant violations; messages cite key and line.
Scenario build_scenario(const ScenarioDoc& doc);

}  // namespace mapless

#endif  // MAPLESS_SCENARIO_FILE_HPP
