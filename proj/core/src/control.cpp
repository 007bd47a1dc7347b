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

#include "mapless/control.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace mapless {

const std::vector<GainPreset>& shipped_gain_presets() {
  static const std::vector<GainPreset> presets = {
      {"default", {5.0, 3.0, 1.2}},
      {"smooth", {2.0, 2.5, 2.0}},
      {"aggressive", {8.0, 4.0, 1.0}},
  };
  return presets;
}

double fbl_steering(const TrackingError& err, double v,
                    const ControllerGains& gains,
                    const BicycleParams& params) {
  if (!gains.valid())
    throw std::invalid_argument("fbl_steering: gains must be positive");
  const double vv = std::max(v, params.v_min);
  if (std::abs(err.e_heading) >= M_PI / 2.0) {
    // Facing away from the path; steer hard back toward it.
    const double sign = err.e_lateral > 0.0   ? -1.0
                        : err.e_lateral < 0.0 ? 1.0
                        : (err.e_heading > 0.0 ? -1.0 : 1.0);
    return sign * params.max_steer;
  }
  const double num =
      -gains.gamma1 * err.e_lateral - gains.gamma2 * vv * std::sin(err.e_heading);
  const double den = vv * vv * std::cos(err.e_heading);
  const double delta = std::atan(num / den);
  return std::clamp(delta, -params.max_steer, params.max_steer);
}

ClosedLoop closed_loop_matrix(const ControllerGains& gains, double t_s) {
  if (t_s <= 0.0)
    throw std::invalid_argument("closed_loop_matrix: t_s must be > 0");
  ClosedLoop cl;
  cl.matrix << 1.0, t_s, -t_s * gains.gamma1, 1.0 - t_s * gains.gamma2;
  // Analytic 2x2 eigenvalues.
  const double tr = cl.matrix.trace();
  const double det = cl.matrix.determinant();
  const double disc = tr * tr - 4.0 * det;
  if (disc >= 0.0) {
    const double r = std::sqrt(disc);
    cl.spectral_radius =
        std::max(std::abs(0.5 * (tr + r)), std::abs(0.5 * (tr - r)));
  } else {
    cl.spectral_radius = std::sqrt(det);
  }
  return cl;
}

double PiController::step(double v_ref, double v, double dt) {
  if (dt <= 0.0) throw std::invalid_argument("PiController: dt must be > 0");
  const double e = v_ref - v;
  integral_ += e * dt;
  if (ki_ > 0.0)
    integral_ = std::clamp(integral_, -limit_ / ki_, limit_ / ki_);
  const double out = kp_ * e + ki_ * integral_;
  return std::clamp(out, -limit_, limit_);
}

double reference_speed(const Pose2D& pose, const std::vector<Waypoint>& path,
                       double lookahead) {
  return tracking_point(pose, path, lookahead).speed;
}

ControlCommand control_step(const Pose2D& pose,
                            const std::vector<Waypoint>& path, double v,
                            const ControllerGains& gains,
                            const BicycleParams& params, PiController& pi,
                            double dt) {
  const Waypoint target = tracking_point(pose, path, gains.lookahead);
  const double th = target.position.heading;
  TrackingError err;
  err.e_lateral = -std::sin(th) * (pose.x - target.position.x) +
                  std::cos(th) * (pose.y - target.position.y);
  err.e_heading = normalize_angle(pose.heading - th);

  ControlCommand cmd;
  cmd.steer = fbl_steering(err, v, gains, params);
  cmd.accel = pi.step(target.speed, v, dt);
  return cmd;
}

}  // namespace mapless
