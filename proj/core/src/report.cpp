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

#include "mapless/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mapless {

namespace {

namespace fs = std::filesystem;

void write_atomic(const std::string& path, const std::string& body) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary);
    if (!f) throw std::runtime_error("report: cannot open " + tmp);
    f << body;
  }
  fs::rename(tmp, path);
}

std::string csv_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string format_metrics(const RunMetrics& m) {
  std::ostringstream out;
  out.precision(17);
  out << "rms_lateral=" << m.rms_lateral << "\n"
      << "max_lateral=" << m.max_lateral << "\n"
      << "rms_straight=" << m.rms_straight << "\n"
      << "rms_turn=" << m.rms_turn << "\n"
      << "max_turn=" << m.max_turn << "\n"
      << "max_lateral_accel=" << m.max_lateral_accel << "\n"
      << "completed=" << (m.completed ? 1 : 0) << "\n"
      << "failed=" << (m.failed ? 1 : 0) << "\n"
      << "stop_count=" << m.stops.size() << "\n";
  for (std::size_t i = 0; i < m.stops.size(); ++i)
    out << "stop_error_" << i << "=" << m.stops[i].error << "\n";
  out << "lane_change_count=" << m.lane_changes.size() << "\n";
  for (std::size_t i = 0; i < m.lane_changes.size(); ++i)
    out << "lane_change_max_lat_accel_" << i << "="
        << m.lane_changes[i].max_lat_accel << "\n";
  if (m.obstacle_detection_range)
    out << "obstacle_detection_range=" << *m.obstacle_detection_range << "\n";
  if (m.recovery_distance)
    out << "recovery_distance=" << *m.recovery_distance << "\n";
  return out.str();
}

ReportPaths write_report_bundle(const RunResult& result,
                                const TrackDefinition& track,
                                const std::string& out_dir) {
  fs::create_directories(out_dir);
  ReportPaths paths;
  paths.metrics = out_dir + "/metrics.txt";
  paths.step_log = out_dir + "/steps.csv";
  paths.error_vs_index = out_dir + "/error_vs_index.csv";
  paths.velocity = out_dir + "/velocity.csv";
  paths.path_overlay = out_dir + "/path_overlay.csv";

  write_atomic(paths.metrics, format_metrics(result.metrics));

  {
    const std::string tmp = paths.step_log + ".tmp";
    write_step_log_csv(result.log, tmp);
    fs::rename(tmp, paths.step_log);
  }

  {
    std::ostringstream out;
    out << "index,arc_position,lateral_error\n";
    for (std::size_t i = 0; i < result.log.size(); ++i) {
      const auto& r = result.log[i];
      const double lat =
          track.signed_lateral({r.x, r.y}, r.ref_lane_offset);
      out << i << "," << csv_double(r.arc_position) << "," << csv_double(lat)
          << "\n";
    }
    write_atomic(paths.error_vs_index, out.str());
  }

  {
    std::ostringstream out;
    out << "distance,speed\n";
    double dist = 0.0;
    for (std::size_t i = 0; i < result.log.size(); ++i) {
      if (i > 0) {
        const auto& a = result.log[i - 1];
        const auto& b = result.log[i];
        dist += std::hypot(b.x - a.x, b.y - a.y);
      }
      out << csv_double(dist) << "," << csv_double(result.log[i].v) << "\n";
    }
    write_atomic(paths.velocity, out.str());
  }

  {
    std::ostringstream out;
    out << "kind,x,y\n";
    for (const auto& p : track.points)
      out << "track," << csv_double(p.x()) << "," << csv_double(p.y()) << "\n";
    for (const auto& r : result.log)
      out << "driven," << csv_double(r.x) << "," << csv_double(r.y) << "\n";
    write_atomic(paths.path_overlay, out.str());
  }

  return paths;
}

}  // namespace mapless
