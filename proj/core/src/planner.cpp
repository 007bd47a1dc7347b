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

#include "mapless/planner.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace mapless {

double QuinticSpline::eval(double s) const {
  const double u = s - s0;
  double acc = 0.0;
  for (int i = 5; i >= 0; --i) acc = acc * u + m[i];
  return acc;
}

double QuinticSpline::deriv1(double s) const {
  const double u = s - s0;
  double acc = 0.0;
  for (int i = 5; i >= 1; --i) acc = acc * u + i * m[i];
  return acc;
}

double QuinticSpline::deriv2(double s) const {
  const double u = s - s0;
  double acc = 0.0;
  for (int i = 5; i >= 2; --i) acc = acc * u + i * (i - 1) * m[i];
  return acc;
}

QuinticSpline solve_lane_change(const BoundaryConditions& bc) {
  const double T = bc.sF - bc.s0;
  if (T <= 0.0)
    throw std::invalid_argument("solve_lane_change: sF must be > s0");
  if (T < 1e-6)
    throw std::invalid_argument("solve_lane_change: interval too short");

  QuinticSpline q;
  q.s0 = bc.s0;
  q.sF = bc.sF;
  q.m[0] = bc.y0;
  q.m[1] = bc.y_dot0;
  q.m[2] = 0.5 * bc.y_ddot0;

  const double T2 = T * T, T3 = T2 * T, T4 = T3 * T, T5 = T4 * T;
  Eigen::Matrix3d A;
  A << T3, T4, T5,
       3.0 * T2, 4.0 * T3, 5.0 * T4,
       6.0 * T, 12.0 * T2, 20.0 * T3;
  Eigen::Vector3d rhs;
  rhs << bc.yF - (q.m[0] + q.m[1] * T + q.m[2] * T2),
         -(q.m[1] + 2.0 * q.m[2] * T),
         -2.0 * q.m[2];
  const Eigen::Vector3d tail = A.colPivHouseholderQr().solve(rhs);
  q.m[3] = tail(0);
  q.m[4] = tail(1);
  q.m[5] = tail(2);
  return q;
}

double max_lateral_accel(const QuinticSpline& spline, double v) {
  if (v < 0.0) throw std::invalid_argument("max_lateral_accel: v must be >= 0");
  const double span = spline.sF - spline.s0;
  const int n = std::max(1, static_cast<int>(std::ceil(span / 0.01)));
  double worst = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double s = spline.s0 + span * i / n;
    worst = std::max(worst, std::abs(spline.deriv2(s)));
  }
  return v * v * worst;
}

double decel_profile(double v0, double d_remaining, double a_max) {
  if (v0 < 0.0 || a_max <= 0.0)
    throw std::invalid_argument("decel_profile: need v0 >= 0 and a_max > 0");
  const double d = std::max(0.0, d_remaining);
  if (d >= v0 * v0 / (2.0 * a_max)) return v0;
  return std::sqrt(2.0 * a_max * d);
}

const char* to_string(FsmMode m) {
  switch (m) {
    case FsmMode::kLaneKeeping: return "lane-keeping";
    case FsmMode::kStopping: return "stopping";
    case FsmMode::kLaneChanging: return "lane-changing";
  }
  return "?";
}

FsmStep fsm_step(const FsmState& state, const FsmInputs& in,
                 const FsmParams& params) {
  if ((in.obstacle_range && *in.obstacle_range < 0.0) ||
      (in.stop_line_range && *in.stop_line_range < 0.0))
    throw std::invalid_argument("fsm_step: ranges must be >= 0");

  FsmStep out;
  out.state = state;

  switch (state.mode) {
    case FsmMode::kLaneKeeping: {
      const double stop_trigger =
          in.speed * in.speed / (2.0 * params.max_decel) + params.stop_margin;
      if (in.stop_line_range && *in.stop_line_range <= stop_trigger) {
        out.state.mode = FsmMode::kStopping;
        out.state.dwell_elapsed = 0.0;
        out.directive = Directive::kDecelerateToStop;
      } else if (in.obstacle_range &&
                 *in.obstacle_range <= params.lane_change_trigger) {
        out.state.mode = FsmMode::kLaneChanging;
        out.state.progress = 0.0;
        out.directive = Directive::kExecuteLaneChange;
      } else {
        out.directive = Directive::kFollowLane;
      }
      break;
    }
    case FsmMode::kStopping: {
      if (in.speed <= params.stop_speed_eps) {
        out.state.dwell_elapsed = state.dwell_elapsed + in.dt;
        if (out.state.dwell_elapsed >= params.dwell) {
          out.state.mode = FsmMode::kLaneKeeping;
          out.state.dwell_elapsed = 0.0;
          out.directive = Directive::kFollowLane;
        } else {
          out.directive = Directive::kHoldStop;
        }
      } else {
        out.directive = Directive::kDecelerateToStop;
      }
      break;
    }
    case FsmMode::kLaneChanging: {
      out.state.progress = state.progress + in.speed * in.dt;
      if (in.lane_change_done) {
        out.state.mode = FsmMode::kLaneKeeping;
        out.state.progress = 0.0;
        out.directive = Directive::kFollowLane;
      } else {
        out.directive = Directive::kExecuteLaneChange;
      }
      break;
    }
  }
  return out;
}

double lane_change_length(double speed, double adjacent_offset,
                          const FsmParams& params) {
  double length = params.lane_change_length *
                  std::max(0.5, speed / params.reference_speed);
  for (int i = 0; i < 32; ++i) {
    const QuinticSpline q = solve_lane_change(
        {0.0, length, 0.0, 0.0, 0.0, adjacent_offset});
    if (max_lateral_accel(q, speed) <= params.lat_accel_limit) break;
    length *= 1.25;
  }
  return length;
}

std::vector<Waypoint> plan(const FsmState& state,
                           const QuadraticCenterline& tracked,
                           double adjacent_offset,
                           const VelocityProfile& profile,
                           const PlanParams& params,
                           const std::optional<QuinticSpline>&
                               lane_change_path) {
  auto speed_at = [&](double s) {
    if (profile.mode == VelocityProfile::Mode::kConstant)
      return profile.v_cruise;
    return decel_profile(profile.v_cruise, profile.stop_point - s,
                         profile.a_decel);
  };

  std::vector<Waypoint> wps =
      sample_waypoints(tracked, params.spacing, params.horizon);

  if (state.mode == FsmMode::kLaneChanging) {
    QuinticSpline q;
    if (lane_change_path) {
      q = *lane_change_path;
    } else {
      FsmParams defaults;
      q = solve_lane_change({0.0,
                             lane_change_length(profile.v_cruise,
                                                adjacent_offset, defaults),
                             0.0, 0.0, 0.0, adjacent_offset});
    }
    const double span = q.sF - q.s0;
    for (auto& w : wps) {
      const double s = state.progress + w.position.x;  // arc consumed so far
      double off, slope;
      if (s >= span) {
        off = q.eval(q.sF);
        slope = 0.0;
      } else {
        off = q.eval(q.s0 + s);
        slope = q.deriv1(q.s0 + s);
      }
      // Small-slope lateral composition onto the centerline.
      w.position.y += off;
      w.position.heading =
          normalize_angle(std::atan(std::tan(w.position.heading) + slope));
    }
  }

  double s = 0.0;
  for (std::size_t i = 0; i < wps.size(); ++i) {
    if (i > 0)
      s += (wps[i].position.position() - wps[i - 1].position.position())
               .norm();
    wps[i].speed = speed_at(s);
  }
  return wps;
}

}  // namespace mapless
