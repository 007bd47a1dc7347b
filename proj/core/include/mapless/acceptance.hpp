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

#ifndef MAPLESS_ACCEPTANCE_HPP
#define MAPLESS_ACCEPTANCE_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "mapless/simulator.hpp"

namespace mapless {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;  // measured values
};

/// Canonical scenarios used by the acceptance suite (and reusable in tests).
Scenario make_paper_track_scenario();
Scenario make_stop_scenario(std::uint64_t seed);
Scenario make_obstacle_scenario();

/// Runs every acceptance criterion, printing one pass/fail line per
/// criterion to `out` as results arrive.
std::vector<CriterionResult> run_acceptance(std::ostream& out);

/// 0 iff every criterion passed.
int acceptance_exit_code(const std::vector<CriterionResult>& results);

}  // namespace mapless

#endif  // MAPLESS_ACCEPTANCE_HPP
