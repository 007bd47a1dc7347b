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

#ifndef MAPLESS_REPORT_HPP
#define MAPLESS_REPORT_HPP

#include <string>

#include "mapless/simulator.hpp"

namespace mapless {

/// Per-run output bundle written into one directory:
///   metrics.txt        key=value metrics
///   steps.csv          fixed-order step log
///   error_vs_index.csv waypoint index, arc position, lateral error
///   velocity.csv       distance traveled, speed
///   path_overlay.csv   driven x,y plus track centerline x,y
/// Files are written to a temp name and renamed, so readers never observe a
/// partial file. Byte-reproducible given the same run.
struct ReportPaths {
  std::string metrics;
  std::string step_log;
  std::string error_vs_index;
  std::string velocity;
  std::string path_overlay;
};

ReportPaths write_report_bundle(const RunResult& result,
                                const TrackDefinition& track,
                                const std::string& out_dir);

/// metrics.txt body for a run (key=value, fixed key order).
std::string format_metrics(const RunMetrics& metrics);

}  // namespace mapless

#endif  // MAPLESS_REPORT_HPP
