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

#include <cmath>
#include <vector>

#include <doctest.h>

#include "mapless/planner.hpp"
#include "mapless/rng.hpp"

using namespace mapless;

namespace {

void check_boundary(const QuinticSpline& q, const BoundaryConditions& bc,
                    double tol) {
  CHECK(std::abs(q.eval(bc.s0) - bc.y0) < tol);
  CHECK(std::abs(q.deriv1(bc.s0) - bc.y_dot0) < tol);
  CHECK(std::abs(q.deriv2(bc.s0) - bc.y_ddot0) < tol);
  CHECK(std::abs(q.eval(bc.sF) - bc.yF) < tol);
  CHECK(std::abs(q.deriv1(bc.sF)) < tol);
  CHECK(std::abs(q.deriv2(bc.sF)) < tol);
}

}  // namespace

TEST_CASE("homogeneous boundary conditions give the zero polynomial") {
  const QuinticSpline q = solve_lane_change({0.0, 1.0, 0.0, 0.0, 0.0, 0.0});
  for (double m : q.m) CHECK(std::abs(m) < 1e-12);
}

TEST_CASE("canonical unit lane change is the minimum-jerk polynomial") {
  const QuinticSpline q = solve_lane_change({0.0, 1.0, 0.0, 0.0, 0.0, 1.0});
  const double expected[6] = {0.0, 0.0, 0.0, 10.0, -15.0, 6.0};
  for (int i = 0; i < 6; ++i) CHECK(std::abs(q.m[i] - expected[i]) < 1e-9);
}

TEST_CASE("domain scaling of the canonical solution") {
  const QuinticSpline unit = solve_lane_change({0.0, 1.0, 0.0, 0.0, 0.0, 1.0});
  const QuinticSpline two = solve_lane_change({0.0, 2.0, 0.0, 0.0, 0.0, 1.0});
  for (double s = 0.0; s <= 2.0; s += 0.125)
    CHECK(two.eval(s) == doctest::Approx(unit.eval(s / 2.0)).epsilon(1e-9));
}

TEST_CASE("solve_lane_change rejects bad intervals") {
  CHECK_THROWS_AS(solve_lane_change({1.0, 1.0, 0, 0, 0, 1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(solve_lane_change({2.0, 1.0, 0, 0, 0, 1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(solve_lane_change({0.0, 1e-9, 0, 0, 0, 1}),
                  std::invalid_argument);
}

TEST_CASE("1000 randomized boundary conditions satisfied to 1e-9") {
  Rng rng(123);
  for (int trial = 0; trial < 1000; ++trial) {
    BoundaryConditions bc;
    bc.s0 = rng.uniform(-10.0, 10.0);
    bc.sF = bc.s0 + rng.uniform(0.1, 100.0);
    bc.y0 = rng.uniform(-10.0, 10.0);
    bc.y_dot0 = rng.uniform(-10.0, 10.0);
    bc.y_ddot0 = rng.uniform(-10.0, 10.0);
    bc.yF = rng.uniform(-10.0, 10.0);
    check_boundary(solve_lane_change(bc), bc, 1e-9);
  }
}

TEST_CASE("quintic solution is fully determined") {
  const BoundaryConditions bc{0.0, 1.0, 0.0, 0.0, 0.0, 1.0};
  const QuinticSpline q = solve_lane_change(bc);
  // Perturbing any coefficient violates at least one boundary constraint.
  for (int i = 0; i < 6; ++i) {
    for (double d : {-1e-3, 1e-3}) {
      QuinticSpline p = q;
      p.m[i] += d;
      const double worst = std::max(
          {std::abs(p.eval(bc.s0) - bc.y0), std::abs(p.deriv1(bc.s0)),
           std::abs(p.deriv2(bc.s0)), std::abs(p.eval(bc.sF) - bc.yF),
           std::abs(p.deriv1(bc.sF)), std::abs(p.deriv2(bc.sF))});
      CHECK(worst > 1e-4);
    }
  }
}

TEST_CASE("max_lateral_accel") {
  SUBCASE("zero spline and zero speed give zero") {
    QuinticSpline zero;
    zero.s0 = 0.0;
    zero.sF = 1.0;
    CHECK(max_lateral_accel(zero, 2.5) == doctest::Approx(0.0));
    const QuinticSpline q =
        solve_lane_change({0.0, 1.0, 0.0, 0.0, 0.0, 1.0});
    CHECK(max_lateral_accel(q, 0.0) == doctest::Approx(0.0));
  }
  SUBCASE("canonical spline matches a brute-force sampling oracle") {
    const QuinticSpline q =
        solve_lane_change({0.0, 1.0, 0.0, 0.0, 0.0, 1.0});
    const double v = 2.5;
    double brute = 0.0;
    for (double s = 0.0; s <= 1.0; s += 1e-4)
      brute = std::max(brute, v * v * std::abs(q.deriv2(s)));
    CHECK(max_lateral_accel(q, v) == doctest::Approx(brute).epsilon(1e-4));
    // Analytic check: max |f''| of the min-jerk quintic is 10/sqrt(3).
    CHECK(brute ==
          doctest::Approx(v * v * 10.0 / std::sqrt(3.0)).epsilon(1e-4));
  }
}

TEST_CASE("decel_profile kinematics") {
  // Deceleration begins at v0^2 / (2 a) = 3.125 m.
  CHECK(decel_profile(2.5, 3.125, 1.0) == doctest::Approx(2.5));
  CHECK(decel_profile(2.5, 10.0, 1.0) == doctest::Approx(2.5));
  CHECK(decel_profile(2.5, 1e9, 1.0) == doctest::Approx(2.5));
  CHECK(decel_profile(2.5, 2.0, 1.0) == doctest::Approx(2.0));
  CHECK(decel_profile(2.5, 0.0, 1.0) == doctest::Approx(0.0));
  CHECK(decel_profile(2.5, -3.0, 1.0) == doctest::Approx(0.0));
  CHECK_THROWS_AS(decel_profile(2.5, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("fsm_step transitions") {
  FsmParams params;  // trigger 25 m, max_decel 1, dwell 3 s
  FsmState keeping;

  SUBCASE("no inputs stays in lane keeping") {
    FsmInputs in;
    in.speed = 2.5;
    in.dt = 0.1;
    const FsmStep out = fsm_step(keeping, in, params);
    CHECK(out.state.mode == FsmMode::kLaneKeeping);
    CHECK(out.directive == Directive::kFollowLane);
  }
  SUBCASE("obstacle inside the trigger range starts a lane change") {
    FsmInputs in;
    in.obstacle_range = 24.0;
    in.speed = 2.5;
    in.dt = 0.1;
    const FsmStep out = fsm_step(keeping, in, params);
    CHECK(out.state.mode == FsmMode::kLaneChanging);
    CHECK(out.directive == Directive::kExecuteLaneChange);
  }
  SUBCASE("distant stop line does not trigger, close one does") {
    FsmInputs in;
    in.speed = 2.5;
    in.dt = 0.1;
    in.stop_line_range = 30.0;  // braking distance 3.125 + 0.5 margin
    CHECK(fsm_step(keeping, in, params).state.mode == FsmMode::kLaneKeeping);
    in.stop_line_range = 3.5;
    const FsmStep out = fsm_step(keeping, in, params);
    CHECK(out.state.mode == FsmMode::kStopping);
    CHECK(out.directive == Directive::kDecelerateToStop);
  }
  SUBCASE("stop has priority over the lane change") {
    FsmInputs in;
    in.speed = 2.5;
    in.dt = 0.1;
    in.stop_line_range = 3.0;
    in.obstacle_range = 10.0;
    CHECK(fsm_step(keeping, in, params).state.mode == FsmMode::kStopping);
  }
  SUBCASE("negative ranges are rejected") {
    FsmInputs in;
    in.stop_line_range = -1.0;
    CHECK_THROWS_AS(fsm_step(keeping, in, params), std::invalid_argument);
  }
  SUBCASE("dwell at standstill then resume") {
    FsmState stopping;
    stopping.mode = FsmMode::kStopping;
    FsmInputs in;
    in.speed = 0.0;
    in.dt = 1.0;
    FsmState s = stopping;
    for (int i = 0; i < 2; ++i) {
      const FsmStep out = fsm_step(s, in, params);
      CHECK(out.directive == Directive::kHoldStop);
      s = out.state;
    }
    const FsmStep out = fsm_step(s, in, params);  // dwell reaches 3 s
    CHECK(out.state.mode == FsmMode::kLaneKeeping);
  }
  SUBCASE("lane change completes on done flag") {
    FsmState changing;
    changing.mode = FsmMode::kLaneChanging;
    changing.progress = 14.0;
    FsmInputs in;
    in.speed = 2.5;
    in.dt = 0.1;
    FsmStep out = fsm_step(changing, in, params);
    CHECK(out.state.mode == FsmMode::kLaneChanging);
    CHECK(out.state.progress == doctest::Approx(14.25));
    in.lane_change_done = true;
    out = fsm_step(changing, in, params);
    CHECK(out.state.mode == FsmMode::kLaneKeeping);
  }
}

TEST_CASE("fsm replay determinism") {
  FsmParams params;
  Rng rng(31);
  std::vector<FsmInputs> inputs;
  for (int i = 0; i < 300; ++i) {
    FsmInputs in;
    in.speed = rng.uniform(0.0, 3.0);
    in.dt = 1.0 / 26.0;
    if (rng.bernoulli(0.2)) in.obstacle_range = rng.uniform(0.0, 40.0);
    if (rng.bernoulli(0.2)) in.stop_line_range = rng.uniform(0.0, 40.0);
    in.lane_change_done = rng.bernoulli(0.3);
    inputs.push_back(in);
  }
  auto replay = [&] {
    std::vector<FsmMode> modes;
    FsmState s;
    for (const auto& in : inputs) {
      const FsmStep out = fsm_step(s, in, params);
      s = out.state;
      modes.push_back(s.mode);
    }
    return modes;
  };
  CHECK(replay() == replay());
}

TEST_CASE("lane_change_length respects the lateral-acceleration limit") {
  FsmParams params;
  const double len = lane_change_length(2.5, 3.0, params);
  const QuinticSpline q = solve_lane_change({0.0, len, 0.0, 0.0, 0.0, 3.0});
  CHECK(max_lateral_accel(q, 2.5) <= params.lat_accel_limit + 1e-9);
  // Faster approaches never shorten the maneuver.
  CHECK(lane_change_length(5.0, 3.0, params) >= len);
}

TEST_CASE("plan in lane keeping follows the centerline at cruise speed") {
  VelocityProfile profile;
  profile.v_cruise = 2.5;
  PlanParams params;
  params.spacing = 0.5;
  params.horizon = 12.0;
  const auto wps = plan(FsmState{}, {0, 0, 0}, 3.0, profile, params);
  REQUIRE(wps.size() == 25);
  for (const auto& w : wps) {
    CHECK(w.position.y == doctest::Approx(0.0));
    CHECK(w.speed == doctest::Approx(2.5));
  }
}

TEST_CASE("plan during a lane change ends on the adjacent centerline") {
  FsmState state;
  state.mode = FsmMode::kLaneChanging;
  state.progress = 0.0;
  VelocityProfile profile;
  profile.v_cruise = 2.5;
  PlanParams params;
  params.spacing = 0.5;
  params.horizon = 20.0;  // beyond the default 15 m maneuver
  const QuinticSpline q = solve_lane_change({0.0, 15.0, 0.0, 0.0, 0.0, 3.0});
  const auto wps = plan(state, {0, 0, 0}, 3.0, profile, params, q);
  REQUIRE(!wps.empty());
  CHECK(wps.front().position.y == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(wps.back().position.y == doctest::Approx(3.0).epsilon(1e-6));

  // The offset profile is C0: no jumps between consecutive waypoints.
  for (std::size_t i = 1; i < wps.size(); ++i)
    CHECK(std::abs(wps[i].position.y - wps[i - 1].position.y) < 0.25);
}

TEST_CASE("plan keep-to-change splice matches position and slope") {
  // Mid-maneuver, the first waypoint must sit on the quintic at the current
  // progress with matching slope (continuity across the splice).
  FsmState state;
  state.mode = FsmMode::kLaneChanging;
  state.progress = 5.0;
  VelocityProfile profile;
  PlanParams params;
  params.spacing = 0.1;
  params.horizon = 12.0;
  const QuinticSpline q = solve_lane_change({0.0, 15.0, 0.0, 0.0, 0.0, 3.0});
  const auto wps = plan(state, {0, 0, 0}, 3.0, profile, params, q);
  REQUIRE(wps.size() >= 2);
  CHECK(wps.front().position.y == doctest::Approx(q.eval(5.0)).epsilon(1e-9));
  const double fd_slope =
      (wps[1].position.y - wps[0].position.y) /
      (wps[1].position.x - wps[0].position.x);
  CHECK(fd_slope == doctest::Approx(q.deriv1(5.0)).epsilon(0.05));
}

TEST_CASE("plan while stopping follows the sqrt speed profile") {
  FsmState state;
  state.mode = FsmMode::kStopping;
  VelocityProfile profile;
  profile.mode = VelocityProfile::Mode::kLinearDecel;
  profile.v_cruise = 2.5;
  profile.a_decel = 1.0;
  profile.stop_point = 3.125;
  PlanParams params;
  params.spacing = 0.5;
  params.horizon = 12.0;
  const auto wps = plan(state, {0, 0, 0}, 3.0, profile, params);
  REQUIRE(!wps.empty());
  CHECK(wps.front().speed == doctest::Approx(2.5));
  // At s = 2.0 the remaining distance is 1.125 -> sqrt(2 * 1 * 1.125).
  CHECK(wps[4].speed == doctest::Approx(1.5));
  CHECK(wps.back().speed == doctest::Approx(0.0));
}
