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

#include "mapless/scenario_file.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace mapless {

namespace {

const std::set<std::string> kSections = {"track", "sensors", "controller",
                                         "fsm", "run"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const ScenarioDoc& doc, const ScenarioDoc::Entry& e,
                       const std::string& reason) {
  std::ostringstream msg;
  msg << doc.source << ":" << e.line << ": key '" << e.section << "."
      << e.key << "': " << reason;
  throw ScenarioError(msg.str());
}

double to_double(const ScenarioDoc& doc, const ScenarioDoc::Entry& e) {
  try {
    std::size_t used = 0;
    const double v = std::stod(e.value, &used);
    if (used != e.value.size()) throw std::invalid_argument("trailing text");
    return v;
  } catch (const std::exception&) {
    fail(doc, e, "expected a number, got '" + e.value + "'");
  }
}

std::uint64_t to_u64(const ScenarioDoc& doc, const ScenarioDoc::Entry& e) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(e.value, &used);
    if (used != e.value.size()) throw std::invalid_argument("trailing text");
    return v;
  } catch (const std::exception&) {
    fail(doc, e, "expected a non-negative integer, got '" + e.value + "'");
  }
}

bool to_bool(const ScenarioDoc& doc, const ScenarioDoc::Entry& e) {
  if (e.value == "true" || e.value == "1") return true;
  if (e.value == "false" || e.value == "0") return false;
  fail(doc, e, "expected true or false, got '" + e.value + "'");
}

std::vector<double> to_doubles(const ScenarioDoc& doc,
                               const ScenarioDoc::Entry& e,
                               std::size_t expect = 0) {
  std::vector<double> out;
  std::stringstream ss(e.value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument("trailing text");
    } catch (const std::exception&) {
      fail(doc, e, "expected comma-separated numbers, got '" + e.value + "'");
    }
  }
  if (expect > 0 && out.size() != expect) {
    std::ostringstream msg;
    msg << "expected " << expect << " comma-separated numbers, got "
        << out.size();
    fail(doc, e, msg.str());
  }
  return out;
}

struct TrackSpec {
  std::string generator = "paper_track";
  double length = 200.0;
  double turn_radius = 3.0;
  double lane_width = 3.0;
  double spacing = 0.25;
  std::vector<double> stop_lines;
  std::vector<TrackObstacle> obstacles;
  std::vector<Eigen::Vector2d> waypoints;
};

TrackDefinition build_track(const TrackSpec& spec, const ScenarioDoc& doc,
                            const ScenarioDoc::Entry& origin) {
  TrackDefinition track;
  if (spec.generator == "paper_track") {
    track = make_loop_track(spec.length, spec.turn_radius, spec.lane_width,
                            spec.spacing);
  } else if (spec.generator == "straight") {
    track = make_straight_track(spec.length, spec.lane_width, spec.spacing);
  } else if (spec.generator == "waypoints") {
    if (spec.waypoints.size() < 2)
      fail(doc, origin, "waypoint tracks need at least two 'waypoint' keys");
    track.lane_width = spec.lane_width;
    track.points = spec.waypoints;
    track.arc.push_back(0.0);
    for (std::size_t i = 1; i < track.points.size(); ++i) {
      const double d = (track.points[i] - track.points[i - 1]).norm();
      track.arc.push_back(track.arc.back() + d);
    }
    // Finite-difference curvature from heading changes.
    track.curvature.assign(track.points.size(), 0.0);
    for (std::size_t i = 1; i + 1 < track.points.size(); ++i) {
      const Eigen::Vector2d d0 = track.points[i] - track.points[i - 1];
      const Eigen::Vector2d d1 = track.points[i + 1] - track.points[i];
      const double dth = normalize_angle(std::atan2(d1.y(), d1.x()) -
                                         std::atan2(d0.y(), d0.x()));
      const double ds = 0.5 * (track.arc[i + 1] - track.arc[i - 1]);
      track.curvature[i] = ds > 0.0 ? dth / ds : 0.0;
    }
  } else {
    fail(doc, origin,
         "unknown generator '" + spec.generator +
             "' (expected paper_track, straight, or waypoints)");
  }
  track.stop_lines = spec.stop_lines;
  track.obstacles = spec.obstacles;
  return track;
}

}  // namespace

ScenarioDoc parse_scenario_text(const std::string& text,
                                const std::string& source_name) {
  ScenarioDoc doc;
  doc.source = source_name;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') {
        std::ostringstream msg;
        msg << source_name << ":" << line_no << ": unterminated section header '"
            << line << "'";
        throw ScenarioError(msg.str());
      }
      section = trim(line.substr(1, line.size() - 2));
      if (!kSections.count(section)) {
        std::ostringstream msg;
        msg << source_name << ":" << line_no << ": unknown section '["
            << section << "]'";
        throw ScenarioError(msg.str());
      }
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      std::ostringstream msg;
      msg << source_name << ":" << line_no
          << ": expected 'key = value', got '" << line << "'";
      throw ScenarioError(msg.str());
    }
    if (section.empty()) {
      std::ostringstream msg;
      msg << source_name << ":" << line_no << ": key '"
          << trim(line.substr(0, eq)) << "' appears before any section";
      throw ScenarioError(msg.str());
    }
    ScenarioDoc::Entry e;
    e.section = section;
    e.key = trim(line.substr(0, eq));
    e.value = trim(line.substr(eq + 1));
    e.line = line_no;
    if (e.key.empty()) {
      std::ostringstream msg;
      msg << source_name << ":" << line_no << ": empty key";
      throw ScenarioError(msg.str());
    }
    doc.entries.push_back(std::move(e));
  }
  return doc;
}

ScenarioDoc parse_scenario_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ScenarioError("cannot open scenario file '" + path + "'");
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_scenario_text(buf.str(), path);
}

void set_value(ScenarioDoc& doc, const std::string& dotted_key,
               const std::string& value) {
  const auto dot = dotted_key.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == dotted_key.size())
    throw ScenarioError("parameter '" + dotted_key +
                        "' must have the form section.key");
  const std::string section = dotted_key.substr(0, dot);
  const std::string key = dotted_key.substr(dot + 1);
  if (!kSections.count(section))
    throw ScenarioError("parameter '" + dotted_key +
                        "' names unknown section '" + section + "'");
  for (auto& e : doc.entries) {
    if (e.section == section && e.key == key) {
      e.value = value;
      return;
    }
  }
  ScenarioDoc::Entry e;
  e.section = section;
  e.key = key;
  e.value = value;
  e.line = 0;  // synthetic override, no source line
  doc.entries.push_back(std::move(e));
}

Scenario build_scenario(const ScenarioDoc& doc) {
  Scenario sc;
  TrackSpec track_spec;
  ScenarioDoc::Entry track_origin{"track", "generator", "paper_track", 0};

  for (const auto& e : doc.entries) {
    const std::string& k = e.key;
    if (e.section == "track") {
      if (k == "generator") {
        track_spec.generator = e.value;
        track_origin = e;
      } else if (k == "length") {
        track_spec.length = to_double(doc, e);
      } else if (k == "turn_radius") {
        track_spec.turn_radius = to_double(doc, e);
      } else if (k == "lane_width") {
        track_spec.lane_width = to_double(doc, e);
      } else if (k == "spacing") {
        track_spec.spacing = to_double(doc, e);
      } else if (k == "stop_lines") {
        track_spec.stop_lines = to_doubles(doc, e);
      } else if (k == "waypoint") {
        const auto v = to_doubles(doc, e, 2);
        track_spec.waypoints.emplace_back(v[0], v[1]);
      } else if (k == "obstacle") {
        // arc, lateral offset, width, depth, height
        const auto v = to_doubles(doc, e, 5);
        track_spec.obstacles.push_back({v[0], v[1], v[2], v[3], v[4]});
      } else {
        fail(doc, e, "unknown key");
      }
    } else if (e.section == "sensors") {
      if (k == "perfect") {
        sc.sensors.perfect = to_bool(doc, e);
      } else if (k == "steerable_rate") {
        sc.sensors.steerable_rate = to_double(doc, e);
      } else if (k == "lidar_rate") {
        sc.sensors.lidar_rate = to_double(doc, e);
      } else if (k == "dropout") {
        sc.sensors.dropout = to_double(doc, e);
      } else if (k == "fit_horizon") {
        sc.sensors.fit_horizon = to_double(doc, e);
      } else if (k == "corridor_tolerance") {
        sc.sensors.corridor_tolerance = to_double(doc, e);
      } else if (k == "steerable_sigma") {
        const auto v = to_doubles(doc, e, 3);
        sc.sensors.steerable_sigma = Eigen::Vector3d(v[0], v[1], v[2]);
      } else if (k == "lidar_sigma") {
        const auto v = to_doubles(doc, e, 3);
        sc.sensors.lidar_sigma = Eigen::Vector3d(v[0], v[1], v[2]);
      } else {
        fail(doc, e, "unknown key");
      }
    } else if (e.section == "controller") {
      if (k == "gamma1") {
        sc.gains.gamma1 = to_double(doc, e);
      } else if (k == "gamma2") {
        sc.gains.gamma2 = to_double(doc, e);
      } else if (k == "lookahead") {
        sc.gains.lookahead = to_double(doc, e);
      } else if (k == "preset") {
        bool found = false;
        for (const auto& p : shipped_gain_presets()) {
          if (p.name == e.value) {
            sc.gains = p.gains;
            found = true;
          }
        }
        if (!found) fail(doc, e, "unknown gain preset '" + e.value + "'");
      } else if (k == "pi_kp") {
        sc.pi_kp = to_double(doc, e);
      } else if (k == "pi_ki") {
        sc.pi_ki = to_double(doc, e);
      } else if (k == "wheelbase") {
        sc.vehicle.wheelbase = to_double(doc, e);
      } else if (k == "max_steer") {
        sc.vehicle.max_steer = to_double(doc, e);
      } else if (k == "steer_rate") {
        sc.vehicle.steer_rate = to_double(doc, e);
      } else if (k == "accel_limit") {
        sc.vehicle.accel_limit = to_double(doc, e);
      } else {
        fail(doc, e, "unknown key");
      }
    } else if (e.section == "fsm") {
      if (k == "lane_change_trigger") {
        sc.fsm.lane_change_trigger = to_double(doc, e);
      } else if (k == "stop_margin") {
        sc.fsm.stop_margin = to_double(doc, e);
      } else if (k == "max_decel") {
        sc.fsm.max_decel = to_double(doc, e);
      } else if (k == "dwell") {
        sc.fsm.dwell = to_double(doc, e);
      } else if (k == "stop_speed_eps") {
        sc.fsm.stop_speed_eps = to_double(doc, e);
      } else if (k == "lat_accel_limit") {
        sc.fsm.lat_accel_limit = to_double(doc, e);
      } else if (k == "lane_change_length") {
        sc.fsm.lane_change_length = to_double(doc, e);
      } else if (k == "reference_speed") {
        sc.fsm.reference_speed = to_double(doc, e);
      } else {
        fail(doc, e, "unknown key");
      }
    } else if (e.section == "run") {
      if (k == "name") {
        sc.name = e.value;
      } else if (k == "seed") {
        sc.seed = to_u64(doc, e);
      } else if (k == "duration") {
        sc.duration = to_double(doc, e);
      } else if (k == "mode") {
        if (e.value == "fast")
          sc.sensors.mode = SensorConfig::Mode::kFast;
        else if (e.value == "full")
          sc.sensors.mode = SensorConfig::Mode::kFull;
        else
          fail(doc, e, "expected fast or full, got '" + e.value + "'");
      } else if (k == "v_cruise") {
        sc.v_cruise = to_double(doc, e);
      } else if (k == "start_speed") {
        sc.start_speed = to_double(doc, e);
      } else if (k == "start_arc") {
        sc.start_arc = to_double(doc, e);
      } else if (k == "stop_aim_offset") {
        sc.stop_aim_offset = to_double(doc, e);
      } else {
        fail(doc, e, "unknown key");
      }
    } else {
      fail(doc, e, "unknown section");
    }
  }

  sc.track = build_track(track_spec, doc, track_origin);

  auto invariant = [&](bool ok, const std::string& what) {
    if (!ok)
      throw ScenarioError(doc.source + ": invalid configuration: " + what);
  };
  invariant(sc.gains.valid(),
            "controller gains require gamma1 > 0, gamma2 > 0, lookahead >= 0");
  invariant(sc.sensors.steerable_rate > 0.0 && sc.sensors.lidar_rate > 0.0,
            "sensor rates must be positive");
  invariant(sc.sensors.dropout >= 0.0 && sc.sensors.dropout < 1.0,
            "dropout must be in [0, 1)");
  invariant(sc.duration > 0.0, "run.duration must be positive");
  invariant(sc.v_cruise > 0.0, "run.v_cruise must be positive");
  invariant(sc.vehicle.wheelbase > 0.0 && sc.vehicle.max_steer > 0.0 &&
                sc.vehicle.steer_rate > 0.0 && sc.vehicle.accel_limit > 0.0,
            "vehicle parameters must be positive");
  invariant(sc.fsm.max_decel > 0.0 && sc.fsm.lat_accel_limit > 0.0 &&
                sc.fsm.lane_change_length > 0.0 &&
                sc.fsm.reference_speed > 0.0,
            "fsm parameters must be positive");
  try {
    sc.track.validate(sc.vehicle.width);
  } catch (const std::exception& ex) {
    throw ScenarioError(doc.source + ": invalid configuration: " +
                        std::string(ex.what()));
  }
  return sc;
}

}  // namespace mapless
