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

#include "mapless/obstacle_map.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <stdexcept>

#include <Eigen/Dense>

namespace mapless {

ElevationGrid build_elevation(const std::vector<Eigen::Vector3d>& points,
                              const Pose2D& pose,
                              const ElevationParams& params) {
  if (params.resolution <= 0.0)
    throw std::invalid_argument("build_elevation: resolution must be > 0");
  ElevationGrid grid;
  grid.geom.resolution = params.resolution;
  grid.geom.rows =
      static_cast<int>(std::ceil(params.extent_forward / params.resolution));
  grid.geom.cols =
      static_cast<int>(std::ceil(params.extent_lateral / params.resolution));
  grid.geom.origin_x = 0.0;
  grid.geom.origin_y = -0.5 * params.extent_lateral;
  grid.height.assign(grid.geom.size(), 0.0);
  grid.count.assign(grid.geom.size(), 0);

  const double half_fov = 0.5 * params.fov_deg * M_PI / 180.0;
  for (const auto& p : points) {
    const Eigen::Vector2d local = pose.to_local({p.x(), p.y()});
    if (local.x() <= 0.0) continue;
    if (std::abs(std::atan2(local.y(), local.x())) > half_fov) continue;
    const int row = static_cast<int>(
        std::floor((local.x() - grid.geom.origin_x) / params.resolution));
    const int col = static_cast<int>(
        std::floor((local.y() - grid.geom.origin_y) / params.resolution));
    if (!grid.geom.contains(row, col)) continue;
    const std::size_t idx = row * grid.geom.cols + col;
    if (grid.count[idx] == 0 || p.z() > grid.height[idx])
      grid.height[idx] = p.z();
    ++grid.count[idx];
  }
  return grid;
}

TraversabilityGrid traversability(const ElevationGrid& grid,
                                  const TraversabilityParams& params) {
  const int rows = grid.geom.rows, cols = grid.geom.cols;
  TraversabilityGrid out;
  out.geom = grid.geom;
  out.score.assign(grid.geom.size(), 0.0);
  out.known.assign(grid.geom.size(), 0);

  std::vector<double> raw(grid.geom.size(), 0.0);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (!grid.known(r, c)) continue;
      const double h = grid.height_at(r, c);

      double slope = 0.0;
      const int dr[4] = {-1, 1, 0, 0};
      const int dc[4] = {0, 0, -1, 1};
      for (int k = 0; k < 4; ++k) {
        const int rr = r + dr[k], cc = c + dc[k];
        if (!grid.geom.contains(rr, cc) || !grid.known(rr, cc)) continue;
        slope = std::max(slope, std::abs(grid.height_at(rr, cc) - h) /
                                    grid.geom.resolution);
      }

      // Centered two-pass variance: immune to a large common height offset.
      double sum = 0.0;
      int n = 0;
      for (int rr = r - 1; rr <= r + 1; ++rr)
        for (int cc = c - 1; cc <= c + 1; ++cc) {
          if (!grid.geom.contains(rr, cc) || !grid.known(rr, cc)) continue;
          sum += grid.height_at(rr, cc);
          ++n;
        }
      const double mean = sum / n;
      double var = 0.0;
      for (int rr = r - 1; rr <= r + 1; ++rr)
        for (int cc = c - 1; cc <= c + 1; ++cc) {
          if (!grid.geom.contains(rr, cc) || !grid.known(rr, cc)) continue;
          const double d = grid.height_at(rr, cc) - mean;
          var += d * d;
        }
      const double rough = std::sqrt(var / n);

      const double cost = std::clamp(
          params.w_slope * std::min(1.0, slope / params.slope_crit) +
              params.w_rough * std::min(1.0, rough / params.rough_crit),
          0.0, 1.0);
      raw[r * cols + c] = 1.0 - cost;
      out.known[r * cols + c] = 1;
    }
  }

  // 3x3 mean smoothing over known cells.
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (!out.known[r * cols + c]) continue;
      double sum = 0.0;
      int n = 0;
      for (int rr = r - 1; rr <= r + 1; ++rr)
        for (int cc = c - 1; cc <= c + 1; ++cc) {
          if (!grid.geom.contains(rr, cc) || !out.known[rr * cols + cc])
            continue;
          sum += raw[rr * cols + cc];
          ++n;
        }
      out.score[r * cols + c] = sum / n;
    }
  }
  return out;
}

namespace {

// Even-odd rule point-in-polygon.
bool inside_polygon(const Eigen::Vector2d& p,
                    const std::vector<Eigen::Vector2d>& poly) {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const auto& a = poly[i];
    const auto& b = poly[j];
    if ((a.y() > p.y()) != (b.y() > p.y()) &&
        p.x() < (b.x() - a.x()) * (p.y() - a.y()) / (b.y() - a.y()) + a.x())
      in = !in;
  }
  return in;
}

}  // namespace

std::vector<ObstacleCluster> detect_obstacles(
    const TraversabilityGrid& trav,
    const std::vector<Eigen::Vector2d>& corridor, double threshold,
    int min_cluster_size) {
  if (threshold <= 0.0 || threshold >= 1.0)
    throw std::invalid_argument("detect_obstacles: threshold must be in (0,1)");
  const int rows = trav.geom.rows, cols = trav.geom.cols;

  std::vector<std::uint8_t> occupied(trav.geom.size(), 0);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      if (!trav.is_known(r, c) || trav.score_at(r, c) >= threshold) continue;
      const Eigen::Vector2d center = bev_project(r, c, trav.geom);
      if (corridor.size() >= 3 && !inside_polygon(center, corridor)) continue;
      occupied[r * cols + c] = 1;
    }

  std::vector<std::uint8_t> visited(trav.geom.size(), 0);
  std::vector<ObstacleCluster> clusters;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const std::size_t start = r * cols + c;
      if (!occupied[start] || visited[start]) continue;
      ObstacleCluster cl;
      std::deque<std::pair<int, int>> queue{{r, c}};
      visited[start] = 1;
      while (!queue.empty()) {
        const auto [cr, cc] = queue.front();
        queue.pop_front();
        cl.cells.emplace_back(cr, cc);
        for (int dr = -1; dr <= 1; ++dr)
          for (int dc = -1; dc <= 1; ++dc) {
            const int nr = cr + dr, nc = cc + dc;
            if ((dr == 0 && dc == 0) || !trav.geom.contains(nr, nc)) continue;
            const std::size_t idx = nr * cols + nc;
            if (occupied[idx] && !visited[idx]) {
              visited[idx] = 1;
              queue.emplace_back(nr, nc);
            }
          }
      }
      if (static_cast<int>(cl.cells.size()) < min_cluster_size) continue;
      Eigen::Vector2d lo(1e30, 1e30), hi(-1e30, -1e30);
      Eigen::Vector2d sum = Eigen::Vector2d::Zero();
      for (const auto& [cr, cc] : cl.cells) {
        const Eigen::Vector2d p = bev_project(cr, cc, trav.geom);
        sum += p;
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
      }
      cl.centroid = sum / static_cast<double>(cl.cells.size());
      cl.range = cl.centroid.norm();
      cl.extent = hi - lo + Eigen::Vector2d::Constant(trav.geom.resolution);
      clusters.push_back(std::move(cl));
    }
  }
  std::sort(clusters.begin(), clusters.end(),
            [](const ObstacleCluster& a, const ObstacleCluster& b) {
              return a.range < b.range;
            });
  return clusters;
}

std::vector<Eigen::Vector2d> lane_corridor(const QuadraticCenterline& center,
                                           double half_width, double length,
                                           double step) {
  std::vector<Eigen::Vector2d> left, right;
  for (double x = 0.0; x <= length + 1e-9; x += step) {
    const double y = eval_centerline(center, x);
    const double slope = centerline_slope(center, x);
    const Eigen::Vector2d normal =
        Eigen::Vector2d(-slope, 1.0).normalized() * half_width;
    left.emplace_back(Eigen::Vector2d(x, y) + normal);
    right.emplace_back(Eigen::Vector2d(x, y) - normal);
  }
  std::vector<Eigen::Vector2d> poly = right;
  poly.insert(poly.end(), left.rbegin(), left.rend());
  return poly;
}

std::pair<PlaneFit, double> fit_plane_distance(
    const std::vector<Eigen::Vector3d>& points) {
  if (points.size() < 3)
    throw std::invalid_argument("fit_plane_distance: need >= 3 points");
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (const auto& p : points) centroid += p;
  centroid /= static_cast<double>(points.size());

  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& p : points) {
    const Eigen::Vector3d d = p - centroid;
    cov += d * d.transpose();
  }
  cov /= static_cast<double>(points.size());

  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
  // Two vanishing principal spreads means the points are collinear.
  const double scale = std::max(1.0, eig.eigenvalues()(2));
  if (eig.eigenvalues()(1) <= 1e-12 * scale)
    throw std::invalid_argument("fit_plane_distance: rank-deficient spread");

  PlaneFit fit;
  fit.normal = eig.eigenvectors().col(0).normalized();
  fit.offset = fit.normal.dot(centroid);
  double sum2 = 0.0;
  for (const auto& p : points) {
    const double r = fit.normal.dot(p) - fit.offset;
    sum2 += r * r;
  }
  fit.rms_residual = std::sqrt(sum2 / static_cast<double>(points.size()));
  return {fit, std::abs(fit.offset)};
}

void write_grid_csv(const ElevationGrid& grid, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_grid_csv: cannot open " + path);
  for (int r = 0; r < grid.geom.rows; ++r) {
    for (int c = 0; c < grid.geom.cols; ++c) {
      if (c) f << ",";
      if (grid.known(r, c))
        f << grid.height_at(r, c);
      else
        f << "nan";
    }
    f << "\n";
  }
}

void write_grid_csv(const TraversabilityGrid& grid, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_grid_csv: cannot open " + path);
  for (int r = 0; r < grid.geom.rows; ++r) {
    for (int c = 0; c < grid.geom.cols; ++c) {
      if (c) f << ",";
      if (grid.is_known(r, c))
        f << grid.score_at(r, c);
      else
        f << "nan";
    }
    f << "\n";
  }
}

void write_grid_pgm(const TraversabilityGrid& grid, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("write_grid_pgm: cannot open " + path);
  f << "P5\n" << grid.geom.cols << " " << grid.geom.rows << "\n255\n";
  for (int r = 0; r < grid.geom.rows; ++r)
    for (int c = 0; c < grid.geom.cols; ++c) {
      const std::uint8_t v =
          grid.is_known(r, c)
              ? static_cast<std::uint8_t>(255.0 * grid.score_at(r, c) + 0.5)
              : 128;
      f.write(reinterpret_cast<const char*>(&v), 1);
    }
}

}  // namespace mapless
