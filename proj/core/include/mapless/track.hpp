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

#ifndef MAPLESS_TRACK_HPP
#define MAPLESS_TRACK_HPP

#include <vector>

#include <Eigen/Core>

#include "mapless/geometry.hpp"

namespace mapless {

struct TrackObstacle {
  double arc_position = 0.0;   // m along the centerline
  double lateral_offset = 0.0; // m, left-positive from the centerline
  double width = 0.75;         // m footprint
  double depth = 0.75;         // m footprint along the lane
  double height = 1.0;         // m
};

/// Ground-truth course: ordered world-frame centerline points with
/// cumulative arc length, plus lane geometry and scenario fixtures.
struct TrackDefinition {
  std::vector<Eigen::Vector2d> points;   // world frame
  std::vector<double> arc;               // cumulative, strictly increasing
  std::vector<double> curvature;         // per point, signed
  bool closed = false;
  double lane_width = 3.0;               // m
  std::vector<double> stop_lines;        // arc positions
  std::vector<TrackObstacle> obstacles;

  double length() const { return arc.empty() ? 0.0 : arc.back(); }
  double wrap(double s) const;

  Eigen::Vector2d point_at(double s) const;
  double heading_at(double s) const;
  double curvature_at(double s) const;
  /// Centerline of the lane offset `lane_offset` meters to the left.
  Eigen::Vector2d lane_point_at(double s, double lane_offset) const;

  /// Arc position of the closest centerline point (linear search).
  double nearest_arc(const Eigen::Vector2d& p) const;
  /// Signed (left-positive) distance from a point to the lane centerline
  /// offset by `lane_offset`.
  double signed_lateral(const Eigen::Vector2d& p, double lane_offset = 0.0) const;

  /// True where the local |curvature| marks a turn; a short settling band
  /// after each turn is labeled as turn as well.
  bool in_turn(double s, double buffer_after = 3.0, double buffer_before = 2.0) const;

  /// Throws std::invalid_argument when arc lengths are not strictly
  /// increasing or the lane is narrower than the vehicle.
  void validate(double vehicle_width = 1.0) const;
};

/// Straight east-heading track starting at the origin.
TrackDefinition make_straight_track(double length, double lane_width = 3.0,
                                    double spacing = 0.25);

/// Closed course matching the lateral-challenge geometry: roughly 200 m
/// with four tight turns of the given radius.
TrackDefinition make_loop_track(double total_length = 200.0,
                                double turn_radius = 3.0,
                                double lane_width = 3.0,
                                double spacing = 0.25);

}  // namespace mapless

#endif  // MAPLESS_TRACK_HPP
