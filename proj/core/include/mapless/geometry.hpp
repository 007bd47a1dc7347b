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

#ifndef MAPLESS_GEOMETRY_HPP
#define MAPLESS_GEOMETRY_HPP

#include <cstddef>
#include <vector>

#include <Eigen/Core>

namespace mapless {

/// Wraps an angle into (-pi, pi].
double normalize_angle(double rad);

/// Planar pose. Vehicle poses use the rear axle as reference point.
/// World frame: fixed planar metric, x east-ish, y north-ish, heading CCW.
struct Pose2D {
  double x = 0.0;        // m
  double y = 0.0;        // m
  double heading = 0.0;  // rad, normalized to (-pi, pi]

  Pose2D() = default;
  Pose2D(double x_, double y_, double heading_)
      : x(x_), y(y_), heading(normalize_angle(heading_)) {}

  Eigen::Vector2d position() const { return {x, y}; }

  /// Maps a point given in this pose's local frame into the parent frame.
  Eigen::Vector2d to_world(const Eigen::Vector2d& local) const;
  /// Maps a parent-frame point into this pose's local frame.
  Eigen::Vector2d to_local(const Eigen::Vector2d& world) const;
};

/// Ego-lane centerline model y = a*x^2 + b*x + c in the vehicle BEV frame
/// (x forward, y left-positive).
struct QuadraticCenterline {
  double a = 0.0;  // 1/m
  double b = 0.0;  // slope
  double c = 0.0;  // m lateral offset

  bool finite() const;
  /// Sanity check against the configured concavity bound.
  bool sane(double a_max = 0.1) const;
};

double eval_centerline(const QuadraticCenterline& c, double x);
double centerline_slope(const QuadraticCenterline& c, double x);
/// Exact curvature f'' / (1 + f'^2)^(3/2).
double centerline_curvature(const QuadraticCenterline& c, double x);

struct Waypoint {
  Pose2D position;
  double curvature = 0.0;  // 1/m
  double speed = 0.0;      // m/s, >= 0
};

/// Discretizes a centerline into waypoints at longitudinal steps of
/// `spacing` up to `horizon` (both in meters, spacing > 0).
std::vector<Waypoint> sample_waypoints(const QuadraticCenterline& c,
                                       double spacing, double horizon,
                                       double speed = 0.0);

/// Signed lateral (left-positive) and heading deviation of a pose relative
/// to a tracking point on a path.
struct TrackingError {
  double e_lateral = 0.0;  // m, left-positive
  double e_heading = 0.0;  // rad, (-pi, pi]
};

/// Projects the pose onto the path and walks `lookahead` meters of arc
/// length ahead of the projection, interpolating between waypoints. The
/// walk saturates at the last waypoint. Throws std::invalid_argument on an
/// empty path.
Waypoint tracking_point(const Pose2D& pose, const std::vector<Waypoint>& path,
                        double lookahead);

/// Signed lateral offset and heading difference of the pose relative to its
/// tracking point.
TrackingError tracking_errors(const Pose2D& pose,
                              const std::vector<Waypoint>& path,
                              double lookahead);

/// Geometry of a metric raster: row index advances along vehicle-frame x
/// (forward), column index along y (left).
struct RasterGeometry {
  int rows = 0;
  int cols = 0;
  double resolution = 0.0;  // m / cell
  double origin_x = 0.0;    // m, vehicle frame, row 0 edge
  double origin_y = 0.0;    // m, vehicle frame, col 0 edge

  std::size_t size() const { return static_cast<std::size_t>(rows) * cols; }
  bool contains(int row, int col) const {
    return row >= 0 && row < rows && col >= 0 && col < cols;
  }
  bool operator==(const RasterGeometry&) const = default;
};

/// Cell-center affine mapping from raster indices to metric vehicle-frame
/// coordinates. Throws std::out_of_range for out-of-bounds pixels.
Eigen::Vector2d bev_project(int row, int col, const RasterGeometry& geom);

}  // namespace mapless

#endif  // MAPLESS_GEOMETRY_HPP
