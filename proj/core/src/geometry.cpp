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

#include "mapless/geometry.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mapless {

double normalize_angle(double rad) {
  double a = std::fmod(rad, 2.0 * M_PI);
  if (a <= -M_PI) a += 2.0 * M_PI;
  if (a > M_PI) a -= 2.0 * M_PI;
  return a;
}

Eigen::Vector2d Pose2D::to_world(const Eigen::Vector2d& local) const {
  const double c = std::cos(heading), s = std::sin(heading);
  return {x + c * local.x() - s * local.y(),
          y + s * local.x() + c * local.y()};
}

Eigen::Vector2d Pose2D::to_local(const Eigen::Vector2d& world) const {
  const double c = std::cos(heading), s = std::sin(heading);
  const double dx = world.x() - x, dy = world.y() - y;
  return {c * dx + s * dy, -s * dx + c * dy};
}

bool QuadraticCenterline::finite() const {
  return std::isfinite(a) && std::isfinite(b) && std::isfinite(c);
}

bool QuadraticCenterline::sane(double a_max) const {
  return finite() && std::abs(a) <= a_max;
}

double eval_centerline(const QuadraticCenterline& c, double x) {
  return (c.a * x + c.b) * x + c.c;
}

double centerline_slope(const QuadraticCenterline& c, double x) {
  return 2.0 * c.a * x + c.b;
}

double centerline_curvature(const QuadraticCenterline& c, double x) {
  const double d1 = centerline_slope(c, x);
  return 2.0 * c.a / std::pow(1.0 + d1 * d1, 1.5);
}

std::vector<Waypoint> sample_waypoints(const QuadraticCenterline& c,
                                       double spacing, double horizon,
                                       double speed) {
  if (spacing <= 0.0) throw std::invalid_argument("sample_waypoints: spacing must be > 0");
  std::vector<Waypoint> out;
  for (double x = 0.0; x <= horizon + 1e-12; x += spacing) {
    Waypoint w;
    w.position = Pose2D(x, eval_centerline(c, x),
                        std::atan(centerline_slope(c, x)));
    w.curvature = centerline_curvature(c, x);
    w.speed = speed;
    out.push_back(w);
  }
  if (out.empty()) {
    Waypoint w;
    w.position = Pose2D(0.0, c.c, std::atan(c.b));
    w.curvature = centerline_curvature(c, 0.0);
    w.speed = speed;
    out.push_back(w);
  }
  return out;
}

namespace {

// Interpolates between two waypoints at fraction t in [0, 1].
Waypoint lerp_waypoint(const Waypoint& w0, const Waypoint& w1, double t) {
  Waypoint w;
  w.position.x = w0.position.x + t * (w1.position.x - w0.position.x);
  w.position.y = w0.position.y + t * (w1.position.y - w0.position.y);
  const double dh = normalize_angle(w1.position.heading - w0.position.heading);
  w.position.heading = normalize_angle(w0.position.heading + t * dh);
  w.curvature = w0.curvature + t * (w1.curvature - w0.curvature);
  w.speed = w0.speed + t * (w1.speed - w0.speed);
  return w;
}

}  // namespace

Waypoint tracking_point(const Pose2D& pose, const std::vector<Waypoint>& path,
                        double lookahead) {
  if (path.empty()) throw std::invalid_argument("tracking_point: empty path");

  const Eigen::Vector2d p = pose.position();

  // Closest-point projection onto the waypoint polyline (linear search).
  std::size_t best_seg = 0;
  double best_t = 0.0;
  double best_d2 = std::numeric_limits<double>::infinity();
  if (path.size() == 1) {
    best_d2 = (p - path[0].position.position()).squaredNorm();
  } else {
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      const Eigen::Vector2d a = path[i].position.position();
      const Eigen::Vector2d b = path[i + 1].position.position();
      const Eigen::Vector2d ab = b - a;
      const double len2 = ab.squaredNorm();
      double t = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
      t = std::clamp(t, 0.0, 1.0);
      const double d2 = (p - (a + t * ab)).squaredNorm();
      if (d2 < best_d2) {
        best_d2 = d2;
        best_seg = i;
        best_t = t;
      }
    }
  }

  // Walk `lookahead` meters of arc ahead of the projection, saturating at
  // the last waypoint.
  Waypoint track_pt;
  if (path.size() == 1) {
    track_pt = path[0];
  } else {
    double remaining = lookahead;
    std::size_t seg = best_seg;
    double t = best_t;
    while (true) {
      const Eigen::Vector2d a = path[seg].position.position();
      const Eigen::Vector2d b = path[seg + 1].position.position();
      const double seg_len = (b - a).norm();
      const double left_in_seg = (1.0 - t) * seg_len;
      if (remaining <= left_in_seg || seg + 2 >= path.size()) {
        const double t_adv =
            seg_len > 0.0 ? std::min(1.0, t + remaining / seg_len) : 1.0;
        track_pt = lerp_waypoint(path[seg], path[seg + 1], t_adv);
        break;
      }
      remaining -= left_in_seg;
      ++seg;
      t = 0.0;
    }
  }
  return track_pt;
}

TrackingError tracking_errors(const Pose2D& pose,
                              const std::vector<Waypoint>& path,
                              double lookahead) {
  const Waypoint track_pt = tracking_point(pose, path, lookahead);
  const double th = track_pt.position.heading;
  const double dx = pose.x - track_pt.position.x;
  const double dy = pose.y - track_pt.position.y;
  TrackingError err;
  err.e_lateral = -std::sin(th) * dx + std::cos(th) * dy;
  err.e_heading = normalize_angle(pose.heading - th);
  return err;
}

Eigen::Vector2d bev_project(int row, int col, const RasterGeometry& geom) {
  if (!geom.contains(row, col))
    throw std::out_of_range("bev_project: pixel outside raster bounds");
  return {geom.origin_x + (row + 0.5) * geom.resolution,
          geom.origin_y + (col + 0.5) * geom.resolution};
}

}  // namespace mapless
