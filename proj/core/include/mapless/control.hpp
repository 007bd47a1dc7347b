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

#ifndef MAPLESS_CONTROL_HPP
#define MAPLESS_CONTROL_HPP

#include <string>
#include <vector>

#include <Eigen/Core>

#include "mapless/geometry.hpp"

namespace mapless {

struct ControllerGains {
  double gamma1 = 5.0;    // 1/s^2, lateral-error gain, > 0
  double gamma2 = 3.0;    // 1/s, heading-rate gain, > 0
  double lookahead = 1.2; // m, >= 0

  bool valid() const { return gamma1 > 0.0 && gamma2 > 0.0 && lookahead >= 0.0; }
};

/// Named gain presets shipped with the simulator.
struct GainPreset {
  std::string name;
  ControllerGains gains;
};
const std::vector<GainPreset>& shipped_gain_presets();

struct BicycleParams {
  double wheelbase = 1.7;      // m
  double timestep = 1.0 / 26.0;  // s
  double max_steer = 0.55;     // rad
  double v_min = 0.5;          // m/s floor inside the steering law
};

/// Linearized tracking states p = [e_L, v*sin(e_H)].
struct LinearizedState {
  double p1 = 0.0;  // m
  double p2 = 0.0;  // m/s
};

/// Feedback-linearized steering law
///   delta = atan((-g1*eL - g2*v*sin(eH)) / (v^2*cos(eH))),
/// clamped to +-max_steer. Speeds below v_min are clamped; |e_heading| at or
/// beyond pi/2 falls back to saturated steering toward the path with the
/// sign of -e_lateral.
double fbl_steering(const TrackingError& err, double v,
                    const ControllerGains& gains, const BicycleParams& params);

struct ClosedLoop {
  Eigen::Matrix2d matrix;
  double spectral_radius = 0.0;
};

/// Discrete closed-loop map [[1, ts], [-ts*g1, 1 - ts*g2]] on p and its
/// spectral radius (analytic 2x2 eigenvalues).
ClosedLoop closed_loop_matrix(const ControllerGains& gains, double t_s);

/// PI speed controller with integral anti-windup (accumulator clamped to
/// the output limits).
class PiController {
 public:
  PiController(double kp, double ki, double output_limit)
      : kp_(kp), ki_(ki), limit_(output_limit) {}

  /// Acceleration command in m/s^2 for the current speed error.
  double step(double v_ref, double v, double dt);

  void reset() { integral_ = 0.0; }
  double integral() const { return integral_; }

 private:
  double kp_;
  double ki_;
  double limit_;
  double integral_ = 0.0;  // accumulated error * time
};

struct ControlCommand {
  double steer = 0.0;  // rad
  double accel = 0.0;  // m/s^2
};

/// One decoupled control step: tracking errors at the configured lookahead
/// feed the steering law; the PI controller tracks the tracking point's
/// speed.
ControlCommand control_step(const Pose2D& pose,
                            const std::vector<Waypoint>& path, double v,
                            const ControllerGains& gains,
                            const BicycleParams& params, PiController& pi,
                            double dt);

/// Tracking point speed at the configured lookahead (the PI reference).
double reference_speed(const Pose2D& pose, const std::vector<Waypoint>& path,
                       double lookahead);

}  // namespace mapless

#endif  // MAPLESS_CONTROL_HPP
