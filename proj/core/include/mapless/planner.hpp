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

#ifndef MAPLESS_PLANNER_HPP
#define MAPLESS_PLANNER_HPP

#include <array>
#include <optional>
#include <vector>

#include "mapless/geometry.hpp"

namespace mapless {

/// Boundary conditions of a lane-change path over arc length [s0, sF].
/// y is the lateral offset from the current lane center; slopes are dy/ds.
struct BoundaryConditions {
  double s0 = 0.0;
  double sF = 1.0;
  double y0 = 0.0;
  double y_dot0 = 0.0;   // dy/ds
  double y_ddot0 = 0.0;  // 1/m
  double yF = 0.0;
};

/// f(s) = sum_i m[i] * (s - s0)^i on [s0, sF]. Coefficients are stored in
/// the shifted variable for conditioning.
struct QuinticSpline {
  std::array<double, 6> m{};
  double s0 = 0.0;
  double sF = 1.0;

  double eval(double s) const;
  double deriv1(double s) const;
  double deriv2(double s) const;
};

/// Solves the fully determined quintic for the six boundary constraints
/// f(s0)=y0, f'(s0)=y_dot0, f''(s0)=y_ddot0, f(sF)=yF, f'(sF)=0, f''(sF)=0.
/// Throws std::invalid_argument when sF <= s0 or sF - s0 < 1e-6.
QuinticSpline solve_lane_change(const BoundaryConditions& bc);

/// Max over dense samples (step <= 0.01 m) of v^2 * |f''(s)| — the
/// concavity approximation of lateral acceleration.
double max_lateral_accel(const QuinticSpline& spline, double v);

/// Commanded speed on a linearly decelerating approach: hold v0 until the
/// kinematic braking distance, then follow sqrt(2 * a_max * d). Negative
/// remaining distance means stop now.
double decel_profile(double v0, double d_remaining, double a_max);

struct VelocityProfile {
  enum class Mode { kConstant, kLinearDecel };
  Mode mode = Mode::kConstant;
  double v_cruise = 2.5;    // m/s
  double a_decel = 1.0;     // m/s^2, > 0 when decelerating
  double stop_point = 0.0;  // m arc length from the vehicle, decel mode
};

enum class FsmMode { kLaneKeeping, kStopping, kLaneChanging };

const char* to_string(FsmMode m);

struct FsmState {
  FsmMode mode = FsmMode::kLaneKeeping;
  double progress = 0.0;       // m traveled while lane changing
  double dwell_elapsed = 0.0;  // s at standstill while stopping
};

struct FsmInputs {
  std::optional<double> obstacle_range;  // m, in-lane obstacle
  std::optional<double> stop_line_range; // m
  bool lane_change_done = false;
  double speed = 0.0;  // m/s
  double dt = 0.0;     // s since last step
};

struct FsmParams {
  double lane_change_trigger = 25.0;  // m
  double stop_margin = 0.5;           // m beyond the braking distance
  double max_decel = 1.0;             // m/s^2
  double dwell = 3.0;                 // s full stop before resuming
  double stop_speed_eps = 0.02;       // m/s counts as stopped
  double lat_accel_limit = 2.0;       // m/s^2 for lane-change sizing
  double lane_change_length = 15.0;   // m at reference speed
  double reference_speed = 2.5;       // m/s
};

enum class Directive { kFollowLane, kDecelerateToStop, kHoldStop,
                       kExecuteLaneChange };

struct FsmStep {
  FsmState state;
  Directive directive = Directive::kFollowLane;
};

/// Deterministic transition step. Stop triggers take priority over lane
/// changes; the stop trigger range is the braking distance plus margin.
FsmStep fsm_step(const FsmState& state, const FsmInputs& in,
                 const FsmParams& params);

/// Lane-change arc length for the current speed: the reference length
/// scaled linearly with speed, then stretched until the planned quintic
/// respects the lateral-acceleration limit.
double lane_change_length(double speed, double adjacent_offset,
                          const FsmParams& params);

struct PlanParams {
  double spacing = 0.5;   // m between waypoints
  double horizon = 12.0;  // m
};

/// Waypoint plan in the vehicle frame for the current FSM state. While lane
/// changing, `lane_change_path` supplies the quintic offset from the
/// current lane center, consumed from state.progress onward.
std::vector<Waypoint> plan(const FsmState& state,
                           const QuadraticCenterline& tracked,
                           double adjacent_offset,
                           const VelocityProfile& profile,
                           const PlanParams& params,
                           const std::optional<QuinticSpline>&
                               lane_change_path = std::nullopt);

}  // namespace mapless

#endif  // MAPLESS_PLANNER_HPP
