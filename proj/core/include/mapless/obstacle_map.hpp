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

#ifndef MAPLESS_OBSTACLE_MAP_HPP
#define MAPLESS_OBSTACLE_MAP_HPP

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mapless/geometry.hpp"

namespace mapless {

/// 2.5D elevation grid ahead of the vehicle (vehicle frame, x forward from
/// the rear axle, y left). Cell heights are the max z of binned points.
struct ElevationGrid {
  RasterGeometry geom;          // origin_x = 0, origin_y = -extent/2
  std::vector<double> height;   // m, valid where count > 0
  std::vector<int> count;

  bool known(int row, int col) const {
    return count[row * geom.cols + col] > 0;
  }
  double height_at(int row, int col) const {
    return height[row * geom.cols + col];
  }
};

struct ElevationParams {
  double extent_forward = 35.0;  // m
  double extent_lateral = 35.0;  // m, centered on the x axis
  double resolution = 0.25;      // m
  double fov_deg = 120.0;        // forward horizontal field of view
};

/// Bins world-frame 3D points into the vehicle-frame grid, discarding
/// points outside the forward FOV sector or the grid extent.
ElevationGrid build_elevation(const std::vector<Eigen::Vector3d>& points,
                              const Pose2D& pose,
                              const ElevationParams& params = {});

/// Per-cell traversability score in [0, 1]; 1 is fully traversable,
/// unknown cells stay unknown.
struct TraversabilityGrid {
  RasterGeometry geom;
  std::vector<double> score;
  std::vector<std::uint8_t> known;

  bool is_known(int row, int col) const {
    return known[row * geom.cols + col] != 0;
  }
  double score_at(int row, int col) const {
    return score[row * geom.cols + col];
  }
};

struct TraversabilityParams {
  double w_slope = 0.7;
  double w_rough = 0.3;
  double slope_crit = 0.4;  // rise/run
  double rough_crit = 0.1;  // m
};

/// score = 1 - clamp(ws*min(1, slope/s_crit) + wr*min(1, rough/r_crit)),
/// with slope the max 4-neighbor height difference over resolution and
/// roughness the stddev of heights in the 3x3 window, followed by 3x3 mean
/// smoothing over known cells.
TraversabilityGrid traversability(const ElevationGrid& grid,
                                  const TraversabilityParams& params = {});

struct ObstacleCluster {
  std::vector<std::pair<int, int>> cells;  // (row, col)
  Eigen::Vector2d centroid = Eigen::Vector2d::Zero();  // m, vehicle frame
  double range = 0.0;          // m, centroid distance from the vehicle
  Eigen::Vector2d extent = Eigen::Vector2d::Zero();  // m bounding size
};

/// Occupied cells (known score < threshold) restricted to the corridor
/// polygon, grouped into 8-connected clusters of at least
/// `min_cluster_size` cells. Clusters are sorted by range.
std::vector<ObstacleCluster> detect_obstacles(
    const TraversabilityGrid& trav,
    const std::vector<Eigen::Vector2d>& corridor, double threshold,
    int min_cluster_size = 3);

/// Lane corridor polygon (CCW) around a centerline out to `length` meters
/// ahead, `half_width` to each side.
std::vector<Eigen::Vector2d> lane_corridor(const QuadraticCenterline& center,
                                           double half_width, double length,
                                           double step = 1.0);

struct PlaneFit {
  Eigen::Vector3d normal = Eigen::Vector3d::UnitX();  // unit length
  double offset = 0.0;        // plane n . x = offset
  double rms_residual = 0.0;  // m
};

/// Least-squares plane through >= 3 non-collinear points (centroid +
/// smallest principal direction) and its distance from the vehicle origin.
/// Throws std::invalid_argument on degenerate input.
std::pair<PlaneFit, double> fit_plane_distance(
    const std::vector<Eigen::Vector3d>& points);

// Debug dumps.
void write_grid_csv(const ElevationGrid& grid, const std::string& path);
void write_grid_csv(const TraversabilityGrid& grid, const std::string& path);
void write_grid_pgm(const TraversabilityGrid& grid, const std::string& path);

}  // namespace mapless

#endif  // MAPLESS_OBSTACLE_MAP_HPP
