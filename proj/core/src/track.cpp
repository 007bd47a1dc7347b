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

#include "mapless/track.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mapless {

double TrackDefinition::wrap(double s) const {
  if (!closed) return std::clamp(s, 0.0, length());
  const double len = length();
  double w = std::fmod(s, len);
  if (w < 0.0) w += len;
  return w;
}

namespace {

// Segment index i with arc[i] <= s, plus interpolation fraction.
std::pair<std::size_t, double> locate(const std::vector<double>& arc,
                                      double s) {
  const auto it = std::upper_bound(arc.begin(), arc.end(), s);
  std::size_t i = it == arc.begin() ? 0 : (it - arc.begin()) - 1;
  if (i + 1 >= arc.size()) i = arc.size() - 2;
  const double seg = arc[i + 1] - arc[i];
  const double t = seg > 0.0 ? (s - arc[i]) / seg : 0.0;
  return {i, std::clamp(t, 0.0, 1.0)};
}

}  // namespace

Eigen::Vector2d TrackDefinition::point_at(double s) const {
  const auto [i, t] = locate(arc, wrap(s));
  return points[i] + t * (points[i + 1] - points[i]);
}

double TrackDefinition::heading_at(double s) const {
  const auto [i, t] = locate(arc, wrap(s));
  const Eigen::Vector2d d = points[i + 1] - points[i];
  (void)t;
  return std::atan2(d.y(), d.x());
}

double TrackDefinition::curvature_at(double s) const {
  const auto [i, t] = locate(arc, wrap(s));
  return curvature[i] + t * (curvature[i + 1] - curvature[i]);
}

Eigen::Vector2d TrackDefinition::lane_point_at(double s,
                                               double lane_offset) const {
  const double h = heading_at(s);
  const Eigen::Vector2d normal(-std::sin(h), std::cos(h));
  return point_at(s) + lane_offset * normal;
}

double TrackDefinition::nearest_arc(const Eigen::Vector2d& p) const {
  double best_s = 0.0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const Eigen::Vector2d a = points[i];
    const Eigen::Vector2d ab = points[i + 1] - a;
    const double len2 = ab.squaredNorm();
    double t = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double d2 = (p - (a + t * ab)).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best_s = arc[i] + t * (arc[i + 1] - arc[i]);
    }
  }
  return best_s;
}

double TrackDefinition::signed_lateral(const Eigen::Vector2d& p,
                                       double lane_offset) const {
  const double s = nearest_arc(p);
  const double h = heading_at(s);
  const Eigen::Vector2d ref = lane_point_at(s, lane_offset);
  const Eigen::Vector2d d = p - ref;
  return -std::sin(h) * d.x() + std::cos(h) * d.y();
}

bool TrackDefinition::in_turn(double s, double buffer_after,
                              double buffer_before) const {
  constexpr double kTurnCurvature = 0.05;
  const double sw = wrap(s);
  for (double ds = -buffer_after; ds <= buffer_before; ds += 0.5) {
    if (std::abs(curvature_at(wrap(sw + ds))) > kTurnCurvature) return true;
  }
  return false;
}

void TrackDefinition::validate(double vehicle_width) const {
  if (points.size() < 2 || points.size() != arc.size() ||
      curvature.size() != arc.size())
    throw std::invalid_argument("track: inconsistent arrays");
  for (std::size_t i = 1; i < arc.size(); ++i)
    if (arc[i] <= arc[i - 1])
      throw std::invalid_argument("track: arc length must be strictly increasing");
  if (lane_width <= vehicle_width)
    throw std::invalid_argument("track: lane narrower than the vehicle");
}

TrackDefinition make_straight_track(double length, double lane_width,
                                    double spacing) {
  TrackDefinition t;
  t.lane_width = lane_width;
  const int n = std::max(2, static_cast<int>(std::ceil(length / spacing)) + 1);
  for (int i = 0; i < n; ++i) {
    const double s = length * i / (n - 1);
    t.points.emplace_back(s, 0.0);
    t.arc.push_back(s);
    t.curvature.push_back(0.0);
  }
  return t;
}

TrackDefinition make_loop_track(double total_length, double turn_radius,
                                double lane_width, double spacing) {
  // Rounded rectangle: two long and two short straights joined by four
  // quarter-circle turns.
  const double turns = 2.0 * M_PI * turn_radius;  // all four turns
  const double straights = total_length - turns;
  if (straights <= 0.0)
    throw std::invalid_argument("make_loop_track: length too short for turns");
  const double long_side = straights / 3.0;        // two long, one split short
  const double short_side = straights / 6.0;

  TrackDefinition t;
  t.lane_width = lane_width;
  t.closed = true;

  Eigen::Vector2d pos(0.0, 0.0);
  double heading = 0.0;
  double s = 0.0;

  auto emit = [&](double kappa) {
    t.points.push_back(pos);
    t.arc.push_back(s);
    t.curvature.push_back(kappa);
  };

  auto straight = [&](double len) {
    const int n = std::max(1, static_cast<int>(std::round(len / spacing)));
    const Eigen::Vector2d dir(std::cos(heading), std::sin(heading));
    for (int i = 0; i < n; ++i) {
      emit(0.0);
      pos += dir * (len / n);
      s += len / n;
    }
  };

  auto turn = [&](double sweep_rad) {
    const double arc_len = std::abs(sweep_rad) * turn_radius;
    const int n = std::max(2, static_cast<int>(std::round(arc_len / spacing)));
    const double kappa = sweep_rad > 0.0 ? 1.0 / turn_radius : -1.0 / turn_radius;
    for (int i = 0; i < n; ++i) {
      emit(kappa);
      const double dth = sweep_rad / n;
      const Eigen::Vector2d dir(std::cos(heading + 0.5 * dth),
                                std::sin(heading + 0.5 * dth));
      const double chord = 2.0 * turn_radius * std::sin(std::abs(dth) / 2.0);
      pos += dir * chord;
      heading += dth;
      s += arc_len / n;
    }
  };

  straight(long_side);
  turn(M_PI / 2.0);
  straight(short_side);
  turn(M_PI / 2.0);
  straight(long_side);
  turn(M_PI / 2.0);
  straight(short_side);
  turn(M_PI / 2.0);

  // The generator lands back on the start point; emit it once to close the
  // polyline.
  t.points.push_back(t.points.front());
  t.arc.push_back(s);
  t.curvature.push_back(t.curvature.front());
  return t;
}

}  // namespace mapless
