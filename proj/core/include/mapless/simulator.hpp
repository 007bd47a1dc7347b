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

#ifndef MAPLESS_SIMULATOR_HPP
#define MAPLESS_SIMULATOR_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mapless/control.hpp"
#include "mapless/geometry.hpp"
#include "mapless/obstacle_map.hpp"
#include "mapless/perception.hpp"
#include "mapless/planner.hpp"
#include "mapless/rng.hpp"
#include "mapless/track.hpp"
#include "mapless/tracker.hpp"

namespace mapless {

/// Kinematic bicycle plant state (rear-axle reference point).
struct VehicleState {
  Pose2D pose;
  double v = 0.0;      // m/s, >= 0
  double steer = 0.0;  // rad, |steer| <= max_steer
};

struct VehicleConfig {
  double wheelbase = 1.7;    // m
  double max_steer = 0.55;   // rad
  double steer_rate = 1.5;   // rad/s actuator slew limit
  double accel_limit = 2.5;  // m/s^2 |command| clamp
  double width = 1.0;        // m, for lane sanity checks
};

/// Forward-Euler bicycle step with steering slew toward the command.
VehicleState bicycle_step(const VehicleState& state, double steer_cmd,
                          double accel_cmd, const VehicleConfig& cfg,
                          double t_s);

struct SensorConfig {
  enum class Mode { kFast, kFull };
  Mode mode = Mode::kFast;
  bool perfect = false;          // track ground-truth waypoints directly
  double steerable_rate = 26.0;  // Hz
  double lidar_rate = 10.0;      // Hz
  // True measurement noise per source (stddev on a, b, c); the tracker's
  // Omega defaults are these squared.
  Eigen::Vector3d steerable_sigma{1e-3, 1e-2, 1e-1};
  Eigen::Vector3d lidar_sigma{1.4142135623730951e-3, 1.4142135623730951e-2,
                              1.4142135623730951e-1};
  double dropout = 0.0;          // per-measurement drop probability
  double fit_horizon = 10.0;     // m of centerline ahead used by the fit
  // Fits truncate where the lane heading has swung this far from the first
  // point; beyond that the quadratic y = f(x) model no longer applies.
  double max_heading_span = 0.7;    // rad
  double corridor_tolerance = 1.2;  // * lane_width before detection fails
};

/// Scenario default tracker noise: the module defaults with a 10x faster
/// process model. In tight turns the lane parameters change quickly, and
/// the stock process noise makes the filter lag the geometry.
inline NoiseModel scenario_tracker_noise() {
  NoiseModel noise;
  noise.system *= 10.0;
  return noise;
}

struct Scenario {
  std::string name = "scenario";
  TrackDefinition track;
  SensorConfig sensors;
  NoiseModel tracker_noise = scenario_tracker_noise();
  ControllerGains gains;
  double pi_kp = 4.0;
  double pi_ki = 0.4;
  VehicleConfig vehicle;
  FsmParams fsm;
  PlanParams plan;
  std::uint64_t seed = 1;
  double duration = 90.0;    // s
  double v_cruise = 2.5;     // m/s
  double start_speed = 2.5;  // m/s
  double start_arc = 0.0;    // m along the track
  double stop_aim_offset = 0.32;  // m short of the stop line to target
  double a_max_sanity = 0.3;      // concavity bound on accepted fits
};

struct StepRecord {
  double t = 0.0;
  double x = 0.0, y = 0.0, heading = 0.0;
  double v = 0.0;
  double steer_cmd = 0.0, accel_cmd = 0.0;
  double e_lateral = 0.0, e_heading = 0.0;  // controller-frame errors
  FsmMode fsm_mode = FsmMode::kLaneKeeping;
  QuadraticCenterline tracked;
  double ref_lane_offset = 0.0;  // m, which lane center is the reference
  double arc_position = 0.0;     // m along the track
  double lat_accel = 0.0;        // v^2 tan|steer| / L
};

struct StopEvent {
  double stop_line_arc = 0.0;
  double stopped_arc = 0.0;
  double error = 0.0;  // signed, positive = stopped short of the line
};

struct LaneChangeEvent {
  double start_arc = 0.0;
  double complete_arc = 0.0;
  double max_lat_accel = 0.0;
};

struct RunMetrics {
  double rms_lateral = 0.0;  // m, lane-change steps excluded
  double max_lateral = 0.0;
  double rms_straight = 0.0;
  double rms_turn = 0.0;
  double max_turn = 0.0;
  double max_lateral_accel = 0.0;
  std::vector<StopEvent> stops;
  std::vector<LaneChangeEvent> lane_changes;
  std::optional<double> obstacle_detection_range;  // m, first detection
  /// Travel after lane-change completion until |lateral| stays converged.
  std::optional<double> recovery_distance;
  bool completed = false;
  bool failed = false;  // left the corridor by more than a lane width
  double wall_time_s = 0.0;
};

struct RunResult {
  RunMetrics metrics;
  std::vector<StepRecord> log;
};

/// Ground-truth quadratic fit of the reference lane in the vehicle frame
/// plus per-source Gaussian noise; empty when the vehicle is off-corridor
/// or the measurement drops out.
std::optional<LaneMeasurement> synth_lane_measurement(
    const VehicleState& state, const TrackDefinition& track,
    double ref_lane_offset, LaneSource source, const SensorConfig& cfg,
    double timestamp, Rng& rng);

/// Painted lane lines rendered as bright ridges with speckle noise.
BevRaster synth_bev_raster(const VehicleState& state,
                           const TrackDefinition& track,
                           double ref_lane_offset, double noise, Rng& rng);

/// Ground rings with high-intensity paint returns.
LaserScanSim synth_scan(const VehicleState& state,
                        const TrackDefinition& track, double ref_lane_offset,
                        double timestamp, Rng& rng);

/// Folds lane-line evidence (points on either painted line) onto the lane
/// center using a prior centerline, then RANSAC-fits the result.
QuadraticFit fit_centerline_from_evidence(
    const std::vector<Eigen::Vector2d>& points,
    const QuadraticCenterline& prior, double lane_width, int ransac_iters,
    double inlier_tol, std::uint64_t seed);

/// Fixed-step (1/26 s) closed-loop run: sense, track, plan, control, step.
/// Deterministic given the scenario seed.
RunResult run_scenario(const Scenario& scenario);

/// Recomputes lateral-error statistics from a step log against the track.
RunMetrics rms_lateral_error(const std::vector<StepRecord>& log,
                             const TrackDefinition& track);

/// Step-log CSV with the fixed column order
/// t,x,y,heading,v,steer_cmd,accel_cmd,e_lateral,e_heading,fsm_state,
/// tracked_a,tracked_b,tracked_c.
void write_step_log_csv(const std::vector<StepRecord>& log,
                        const std::string& path);

constexpr double kSimTimestep = 1.0 / 26.0;

}  // namespace mapless

#endif  // MAPLESS_SIMULATOR_HPP
