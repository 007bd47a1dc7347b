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

#include "mapless/simulator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <fstream>
#include <stdexcept>

namespace mapless {

VehicleState bicycle_step(const VehicleState& state, double steer_cmd,
                          double accel_cmd, const VehicleConfig& cfg,
                          double t_s) {
  VehicleState next = state;
  const double target = std::clamp(steer_cmd, -cfg.max_steer, cfg.max_steer);
  const double max_delta = cfg.steer_rate * t_s;
  next.steer =
      state.steer + std::clamp(target - state.steer, -max_delta, max_delta);

  const double v = state.v;
  next.pose.x = state.pose.x + t_s * v * std::cos(state.pose.heading);
  next.pose.y = state.pose.y + t_s * v * std::sin(state.pose.heading);
  next.pose.heading = normalize_angle(
      state.pose.heading + t_s * (v / cfg.wheelbase) * std::tan(next.steer));
  next.v = std::max(
      0.0, v + t_s * std::clamp(accel_cmd, -cfg.accel_limit, cfg.accel_limit));
  return next;
}

namespace {

// True reference-lane points ahead of the vehicle, in the vehicle frame.
// Sampling stops where the lane doubles back (x no longer increasing), so
// the result always admits a quadratic-in-x model.
std::vector<Eigen::Vector2d> true_lane_points(const VehicleState& state,
                                              const TrackDefinition& track,
                                              double ref_lane_offset,
                                              double horizon, double step,
                                              double max_heading_span) {
  std::vector<Eigen::Vector2d> pts;
  const double s0 = track.nearest_arc(state.pose.position());
  const double h0 = track.heading_at(s0);
  double last_x = -1e30;
  for (double d = 0.0; d <= horizon + 1e-9; d += step) {
    const Eigen::Vector2d local =
        state.pose.to_local(track.lane_point_at(s0 + d, ref_lane_offset));
    if (local.x() <= last_x) break;
    if (std::abs(normalize_angle(track.heading_at(s0 + d) - h0)) >
        max_heading_span)
      break;
    last_x = local.x();
    pts.push_back(local);
  }
  return pts;
}

}  // namespace

std::optional<LaneMeasurement> synth_lane_measurement(
    const VehicleState& state, const TrackDefinition& track,
    double ref_lane_offset, LaneSource source, const SensorConfig& cfg,
    double timestamp, Rng& rng) {
  const double lat =
      track.signed_lateral(state.pose.position(), ref_lane_offset);
  if (std::abs(lat) > cfg.corridor_tolerance * track.lane_width)
    return std::nullopt;  // detection failure off-corridor

  const auto pts =
      true_lane_points(state, track, ref_lane_offset, cfg.fit_horizon, 0.5,
                       cfg.max_heading_span);
  if (pts.size() < 5) return std::nullopt;

  if (cfg.dropout > 0.0 && rng.bernoulli(cfg.dropout)) return std::nullopt;

  const QuadraticCenterline truth = least_squares_quadratic(pts);
  const Eigen::Vector3d sigma =
      source == LaneSource::kLidar ? cfg.lidar_sigma : cfg.steerable_sigma;
  LaneMeasurement m;
  m.source = source;
  m.timestamp = timestamp;
  m.y = Eigen::Vector3d(truth.a, truth.b, truth.c);
  for (int i = 0; i < 3; ++i) m.y(i) += sigma(i) * rng.gaussian();
  return m;
}

BevRaster synth_bev_raster(const VehicleState& state,
                           const TrackDefinition& track,
                           double ref_lane_offset, double noise, Rng& rng) {
  RasterGeometry geom;
  geom.resolution = 0.1;
  geom.origin_x = 0.5;  // the BEV starts just ahead of the bumper
  geom.origin_y = -5.0;
  geom.rows = 130;
  geom.cols = 100;
  BevRaster raster = make_raster(geom, 0.0);

  const auto center =
      true_lane_points(state, track, ref_lane_offset, 16.0, 0.25, 1.2);
  const double half_w = 0.5 * track.lane_width;

  for (int r = 0; r < geom.rows; ++r) {
    const double x = geom.origin_x + (r + 0.5) * geom.resolution;
    // Interpolated lane-center lateral at this range, if covered.
    double yc = 0.0;
    bool covered = false;
    for (std::size_t i = 0; i + 1 < center.size(); ++i) {
      if (center[i].x() <= x && x <= center[i + 1].x()) {
        const double t =
            (x - center[i].x()) / (center[i + 1].x() - center[i].x());
        yc = center[i].y() + t * (center[i + 1].y() - center[i].y());
        covered = true;
        break;
      }
    }
    for (int c = 0; c < geom.cols; ++c) {
      const double y = geom.origin_y + (c + 0.5) * geom.resolution;
      double v = 0.12 + noise * rng.uniform();
      if (covered) {
        const double d_left = y - (yc + half_w);
        const double d_right = y - (yc - half_w);
        const double d2 = std::min(d_left * d_left, d_right * d_right);
        v += 0.75 * std::exp(-d2 / (2.0 * 0.07 * 0.07));
      }
      raster.at(r, c) = std::clamp(v, 0.0, 1.0);
    }
  }
  return raster;
}

LaserScanSim synth_scan(const VehicleState& state,
                        const TrackDefinition& track, double ref_lane_offset,
                        double timestamp, Rng& rng) {
  LaserScanSim scan;
  scan.timestamp = timestamp;
  const double half_w = 0.5 * track.lane_width;
  constexpr double kRingRadii[] = {3.0, 4.5, 6.0, 7.5, 9.0, 10.5, 12.0, 13.5};
  for (const double radius : kRingRadii) {
    std::vector<LaserScanSim::Point> ring;
    for (double az = -60.0; az <= 60.0; az += 0.5) {
      const double rad = az * M_PI / 180.0;
      LaserScanSim::Point p;
      p.x = radius * std::cos(rad);
      p.y = radius * std::sin(rad);
      p.z = 0.0;
      const Eigen::Vector2d world = state.pose.to_world({p.x, p.y});
      const double lat = track.signed_lateral(world, ref_lane_offset);
      const bool on_paint = std::abs(std::abs(lat) - half_w) < 0.12;
      p.intensity = (on_paint ? 0.85 : 0.30) + 0.02 * rng.uniform();
      ring.push_back(p);
    }
    scan.rings.push_back(std::move(ring));
  }
  return scan;
}

QuadraticFit fit_centerline_from_evidence(
    const std::vector<Eigen::Vector2d>& points,
    const QuadraticCenterline& prior, double lane_width, int ransac_iters,
    double inlier_tol, std::uint64_t seed) {
  std::vector<Eigen::Vector2d> folded;
  folded.reserve(points.size());
  const double half_w = 0.5 * lane_width;
  for (const auto& p : points) {
    const double e = p.y() - eval_centerline(prior, p.x());
    folded.emplace_back(p.x(), e > 0.0 ? p.y() - half_w : p.y() + half_w);
  }
  return fit_quadratic(folded, ransac_iters, inlier_tol, seed);
}

namespace {

struct ObstacleSensing {
  std::optional<double> range;
};

// Synthetic LiDAR return cloud for occupancy mapping: coarse ground
// sampling plus obstacle surfaces, world frame.
std::vector<Eigen::Vector3d> synth_obstacle_cloud(const VehicleState& state,
                                                  const TrackDefinition& track,
                                                  Rng& rng) {
  std::vector<Eigen::Vector3d> cloud;
  for (double x = 1.0; x <= 35.0; x += 0.4) {
    for (double y = -7.0; y <= 7.0; y += 0.4) {
      const Eigen::Vector2d w = state.pose.to_world({x, y});
      cloud.emplace_back(w.x(), w.y(), 0.002 * rng.gaussian());
    }
  }
  for (const auto& obs : track.obstacles) {
    const Eigen::Vector2d center =
        track.lane_point_at(obs.arc_position, obs.lateral_offset);
    const double th = track.heading_at(obs.arc_position);
    const Eigen::Vector2d fwd(std::cos(th), std::sin(th));
    const Eigen::Vector2d left(-std::sin(th), std::cos(th));
    for (double u = -0.5 * obs.width; u <= 0.5 * obs.width; u += 0.06) {
      for (double z = 0.05; z <= obs.height; z += 0.08) {
        // Near face plus top edge give the mapper a solid return.
        const Eigen::Vector2d face =
            center - 0.5 * obs.depth * fwd + u * left;
        cloud.emplace_back(face.x(), face.y(), z + 0.002 * rng.gaussian());
      }
      for (double d = -0.5 * obs.depth; d <= 0.5 * obs.depth; d += 0.06) {
        const Eigen::Vector2d top = center + d * fwd + u * left;
        cloud.emplace_back(top.x(), top.y(),
                           obs.height + 0.002 * rng.gaussian());
      }
    }
  }
  return cloud;
}

ObstacleSensing sense_obstacles(const VehicleState& state,
                                const TrackDefinition& track,
                                const QuadraticCenterline& tracked,
                                double s_true, Rng& rng) {
  ObstacleSensing out;
  bool near = false;
  for (const auto& obs : track.obstacles) {
    const double ahead = track.wrap(obs.arc_position) - s_true;
    if (ahead > -2.0 && ahead < 40.0) near = true;
  }
  if (!near) return out;

  const auto cloud = synth_obstacle_cloud(state, track, rng);
  const ElevationGrid grid = build_elevation(cloud, state.pose);
  const TraversabilityGrid trav = traversability(grid);
  const auto corridor =
      lane_corridor(tracked, 0.5 * track.lane_width, 35.0, 1.0);
  const auto clusters = detect_obstacles(trav, corridor, 0.5, 3);
  if (!clusters.empty()) out.range = clusters.front().range;
  return out;
}

// Stop-target surface (sign face) points above the stop line, vehicle frame.
std::vector<Eigen::Vector3d> synth_stop_target(const VehicleState& state,
                                               const TrackDefinition& track,
                                               double stop_arc, Rng& rng) {
  std::vector<Eigen::Vector3d> pts;
  const double th = track.heading_at(stop_arc);
  const Eigen::Vector2d left(-std::sin(th), std::cos(th));
  const Eigen::Vector2d base = track.point_at(stop_arc);
  for (double u = -0.3; u <= 0.3; u += 0.1) {
    for (double z = 0.8; z <= 1.6; z += 0.1) {
      const Eigen::Vector2d w = base + u * left;
      const Eigen::Vector2d local = state.pose.to_local(w);
      pts.emplace_back(local.x() + 0.01 * rng.gaussian(),
                       local.y() + 0.01 * rng.gaussian(), z);
    }
  }
  return pts;
}

std::vector<Waypoint> perfect_path(const VehicleState& state,
                                   const TrackDefinition& track,
                                   double ref_lane_offset,
                                   const PlanParams& pp) {
  std::vector<Waypoint> wps;
  const double s0 = track.nearest_arc(state.pose.position());
  for (double d = 0.0; d <= pp.horizon + 1e-9; d += pp.spacing) {
    Waypoint w;
    const Eigen::Vector2d local =
        state.pose.to_local(track.lane_point_at(s0 + d, ref_lane_offset));
    const double h =
        normalize_angle(track.heading_at(s0 + d) - state.pose.heading);
    w.position = Pose2D(local.x(), local.y(), h);
    w.curvature = track.curvature_at(s0 + d);
    wps.push_back(w);
  }
  return wps;
}

}  // namespace

RunResult run_scenario(const Scenario& sc) {
  const auto wall_start = std::chrono::steady_clock::now();
  sc.track.validate(sc.vehicle.width);

  Rng rng(sc.seed);
  const double t_s = kSimTimestep;
  const TrackDefinition& track = sc.track;

  VehicleState veh;
  {
    const Eigen::Vector2d p = track.point_at(sc.start_arc);
    veh.pose = Pose2D(p.x(), p.y(), track.heading_at(sc.start_arc));
    veh.v = sc.start_speed;
  }

  LaneKalmanState kf;
  kf.covariance = Eigen::Vector3d(1e-4, 1e-2, 0.25).asDiagonal();

  FsmState fsm;
  PiController pi(sc.pi_kp, sc.pi_ki, sc.vehicle.accel_limit);
  BicycleParams bike{sc.vehicle.wheelbase, t_s, sc.vehicle.max_steer, 0.5};

  double ref_offset = 0.0;
  std::optional<QuinticSpline> lc_spline;
  double lc_start_arc = 0.0;
  double lc_max_lat_accel = 0.0;

  std::vector<bool> stop_consumed(track.stop_lines.size(), false);
  std::optional<double> latest_stop_range;
  int active_stop = -1;
  bool stop_event_recorded = false;

  std::optional<double> latest_obstacle_range;
  std::optional<double> first_detection_range;

  const int steer_div = std::max(
      1, static_cast<int>(std::round(26.0 / sc.sensors.steerable_rate)));
  const int lidar_div = std::max(
      1, static_cast<int>(std::round(26.0 / sc.sensors.lidar_rate)));

  std::deque<PosedEdgeSet> edge_history;
  const SteerableBank bank = make_steerable_bank(2.0);

  RunResult result;
  const int n_steps = static_cast<int>(std::round(sc.duration / t_s));
  result.log.reserve(n_steps);

  SensorConfig sensors = sc.sensors;

  for (int k = 0; k < n_steps; ++k) {
    const double t = k * t_s;
    const double s_true = track.nearest_arc(veh.pose.position());

    // --- lane tracking -------------------------------------------------
    kf = predict(kf, sc.tracker_noise);

    // Prior-gated association: keep evidence points near where the tracked
    // model predicts a lane line. Far-field points in tight turns fall
    // outside the quadratic's validity region and would poison the fit.
    auto gate_points = [&](std::vector<Eigen::Vector2d> pts, double x_max) {
      std::vector<Eigen::Vector2d> kept;
      const double half_w = 0.5 * track.lane_width;
      for (const auto& p : pts) {
        if (p.x() > x_max) continue;
        const double yc = eval_centerline(kf.estimate, p.x());
        const double resid = std::min(std::abs(p.y() - (yc + half_w)),
                                      std::abs(p.y() - (yc - half_w)));
        if (resid <= 0.75) kept.push_back(p);
      }
      return kept;
    };

    auto apply_meas = [&](const std::optional<LaneMeasurement>& m) {
      if (!m) return;
      QuadraticCenterline c{m->y(0), m->y(1), m->y(2)};
      if (!c.sane(sc.a_max_sanity) ||
          std::abs(c.c) > sensors.corridor_tolerance * track.lane_width)
        return;  // implausible fit, discard
      kf = update(kf, *m, sc.tracker_noise);
    };

    if (!sensors.perfect) {
      if (k % steer_div == 0) {
        if (sensors.mode == SensorConfig::Mode::kFast) {
          apply_meas(synth_lane_measurement(veh, track, ref_offset,
                                            LaneSource::kSteerable, sensors,
                                            t, rng));
        } else {
          const BevRaster raster =
              synth_bev_raster(veh, track, ref_offset, 0.1, rng);
          const double theta =
              std::atan(centerline_slope(kf.estimate, 7.0));
          const BevRaster resp = steer_response(raster, bank, theta);
          const PixelMask mask = extract_mask(resp, 0.35);
          const auto pts = gate_points(mask_to_points(mask), 7.0);
          if (pts.size() >= 12) {
            const QuadraticFit fit = fit_centerline_from_evidence(
                pts, kf.estimate, track.lane_width, 40, 0.15,
                rng.next_u64());
            if (fit.inlier_count >= pts.size() / 3) {
              LaneMeasurement m;
              m.source = LaneSource::kSteerable;
              m.timestamp = t;
              m.y = Eigen::Vector3d(fit.curve.a, fit.curve.b, fit.curve.c);
              apply_meas(m);
            }
          }
        }
      }
      if (k % lidar_div == 0) {
        if (sensors.mode == SensorConfig::Mode::kFast) {
          apply_meas(synth_lane_measurement(veh, track, ref_offset,
                                            LaneSource::kLidar, sensors, t,
                                            rng));
        } else {
          const LaserScanSim scan =
              synth_scan(veh, track, ref_offset, t, rng);
          edge_history.push_back({veh.pose, lidar_intensity_edges(scan, 0.3)});
          if (edge_history.size() > 3) edge_history.pop_front();
          const auto merged = gate_points(
              accumulate_scans(std::vector<PosedEdgeSet>(edge_history.begin(),
                                                         edge_history.end()),
                               3),
              9.0);
          if (merged.size() >= 12) {
            const QuadraticFit fit = fit_centerline_from_evidence(
                merged, kf.estimate, track.lane_width, 40, 0.2,
                rng.next_u64());
            if (fit.inlier_count >= merged.size() / 3) {
              LaneMeasurement m;
              m.source = LaneSource::kLidar;
              m.timestamp = t;
              m.y = Eigen::Vector3d(fit.curve.a, fit.curve.b, fit.curve.c);
              apply_meas(m);
            }
          }
        }
      }
    }

    // --- obstacle sensing ----------------------------------------------
    if (!track.obstacles.empty() && k % lidar_div == 0) {
      const ObstacleSensing obs =
          sense_obstacles(veh, track, kf.estimate, s_true, rng);
      latest_obstacle_range = obs.range;
      if (obs.range && !first_detection_range)
        first_detection_range = obs.range;
    }

    // --- stop-target ranging ---------------------------------------------
    latest_stop_range.reset();
    if (active_stop < 0) {
      for (std::size_t i = 0; i < track.stop_lines.size(); ++i) {
        if (stop_consumed[i]) continue;
        const double ahead = track.stop_lines[i] - s_true;
        if (ahead > -0.5 && ahead < 35.0) {
          active_stop = static_cast<int>(i);
          break;
        }
      }
    }
    if (active_stop >= 0) {
      const double stop_arc = track.stop_lines[active_stop];
      const auto pts = synth_stop_target(veh, track, stop_arc, rng);
      // The plane fit yields an unsigned distance; the sign (passed or not)
      // comes from which side of the target the vehicle is on.
      const double side =
          veh.pose.to_local(track.point_at(stop_arc)).x() >= 0.0 ? 1.0 : -1.0;
      latest_stop_range = side * fit_plane_distance(pts).second;
    }

    // --- FSM --------------------------------------------------------------
    FsmInputs in;
    in.obstacle_range = latest_obstacle_range;
    if (latest_stop_range)
      in.stop_line_range = std::max(0.0, *latest_stop_range);
    in.speed = veh.v;
    in.dt = t_s;
    in.lane_change_done =
        fsm.mode == FsmMode::kLaneChanging && lc_spline &&
        fsm.progress + veh.v * t_s >= (lc_spline->sF - lc_spline->s0);

    const FsmStep step = fsm_step(fsm, in, sc.fsm);

    if (fsm.mode != FsmMode::kLaneChanging &&
        step.state.mode == FsmMode::kLaneChanging) {
      const double span =
          lane_change_length(std::max(veh.v, 1.0), track.lane_width, sc.fsm);
      lc_spline =
          solve_lane_change({0.0, span, 0.0, 0.0, 0.0, track.lane_width});
      lc_start_arc = s_true;
      lc_max_lat_accel = 0.0;
    }
    if (fsm.mode == FsmMode::kLaneChanging &&
        step.state.mode == FsmMode::kLaneKeeping) {
      // The ego lane is now the adjacent lane; shift the filter frame.
      ref_offset += track.lane_width;
      kf.estimate.c += track.lane_width;
      LaneChangeEvent ev;
      ev.start_arc = lc_start_arc;
      ev.complete_arc = s_true;
      ev.max_lat_accel = lc_max_lat_accel;
      result.metrics.lane_changes.push_back(ev);
      lc_spline.reset();
      latest_obstacle_range.reset();
    }
    if (fsm.mode == FsmMode::kStopping && veh.v <= sc.fsm.stop_speed_eps &&
        !stop_event_recorded && active_stop >= 0) {
      StopEvent ev;
      ev.stop_line_arc = track.stop_lines[active_stop];
      ev.stopped_arc = s_true;
      ev.error = ev.stop_line_arc - s_true;
      result.metrics.stops.push_back(ev);
      stop_event_recorded = true;
    }
    if (fsm.mode == FsmMode::kStopping &&
        step.state.mode == FsmMode::kLaneKeeping) {
      if (active_stop >= 0) stop_consumed[active_stop] = true;
      active_stop = -1;
      stop_event_recorded = false;
      pi.reset();
    }
    fsm = step.state;

    // --- plan ---------------------------------------------------------
    VelocityProfile prof;
    if (step.directive == Directive::kDecelerateToStop && latest_stop_range) {
      prof.mode = VelocityProfile::Mode::kLinearDecel;
      prof.v_cruise = sc.v_cruise;
      prof.a_decel = sc.fsm.max_decel;
      // The PI reference is read at the look-ahead point, so aim past it.
      prof.stop_point = std::max(
          0.0, *latest_stop_range - sc.stop_aim_offset + sc.gains.lookahead);
    } else if (step.directive == Directive::kHoldStop) {
      prof.mode = VelocityProfile::Mode::kLinearDecel;
      prof.v_cruise = sc.v_cruise;
      prof.a_decel = sc.fsm.max_decel;
      prof.stop_point = 0.0;
    } else {
      prof.mode = VelocityProfile::Mode::kConstant;
      prof.v_cruise = sc.v_cruise;
    }

    std::vector<Waypoint> path;
    if (sensors.perfect) {
      path = perfect_path(veh, track, ref_offset, sc.plan);
      double s = 0.0;
      for (std::size_t i = 0; i < path.size(); ++i) {
        if (i > 0)
          s += (path[i].position.position() - path[i - 1].position.position())
                   .norm();
        path[i].speed = prof.mode == VelocityProfile::Mode::kConstant
                            ? prof.v_cruise
                            : decel_profile(prof.v_cruise,
                                            prof.stop_point - s, prof.a_decel);
      }
    } else {
      path = plan(fsm, kf.estimate, track.lane_width, prof, sc.plan,
                  lc_spline);
    }

    // --- control & plant -----------------------------------------------
    const ControlCommand cmd =
        control_step(Pose2D{}, path, veh.v, sc.gains, bike, pi, t_s);
    const TrackingError err = tracking_errors(Pose2D{}, path, sc.gains.lookahead);

    StepRecord rec;
    rec.t = t;
    rec.x = veh.pose.x;
    rec.y = veh.pose.y;
    rec.heading = veh.pose.heading;
    rec.v = veh.v;
    rec.steer_cmd = cmd.steer;
    rec.accel_cmd = cmd.accel;
    rec.e_lateral = err.e_lateral;
    rec.e_heading = err.e_heading;
    rec.fsm_mode = fsm.mode;
    rec.tracked = kf.estimate;
    rec.ref_lane_offset = ref_offset;
    rec.arc_position = s_true;
    rec.lat_accel =
        veh.v * veh.v * std::abs(std::tan(veh.steer)) / sc.vehicle.wheelbase;
    result.log.push_back(rec);

    if (fsm.mode == FsmMode::kLaneChanging)
      lc_max_lat_accel = std::max(lc_max_lat_accel, rec.lat_accel);

    veh = bicycle_step(veh, cmd.steer, cmd.accel, sc.vehicle, t_s);

    // Corridor containment against the nearest lane center.
    const double lat0 = track.signed_lateral(veh.pose.position(), 0.0);
    const double lat1 =
        track.signed_lateral(veh.pose.position(), track.lane_width);
    if (std::min(std::abs(lat0), std::abs(lat1)) > track.lane_width) {
      result.metrics.failed = true;
      break;
    }
  }

  RunMetrics stats = rms_lateral_error(result.log, track);
  stats.stops = result.metrics.stops;
  stats.lane_changes = result.metrics.lane_changes;
  stats.obstacle_detection_range = first_detection_range;
  stats.failed = result.metrics.failed;
  stats.completed = !result.metrics.failed &&
                    static_cast<int>(result.log.size()) == n_steps;

  // Travel after the last lane change until the lateral error settles.
  if (!stats.lane_changes.empty()) {
    const double s_done = stats.lane_changes.back().complete_arc;
    for (const auto& rec : result.log) {
      if (rec.arc_position < s_done || rec.fsm_mode == FsmMode::kLaneChanging)
        continue;
      const double lat = track.signed_lateral(
          {rec.x, rec.y}, rec.ref_lane_offset);
      if (std::abs(lat) < 0.23) {
        stats.recovery_distance = rec.arc_position - s_done;
        break;
      }
    }
  }

  stats.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                    wall_start)
          .count();
  result.metrics = stats;
  return result;
}

RunMetrics rms_lateral_error(const std::vector<StepRecord>& log,
                             const TrackDefinition& track) {
  if (log.empty()) throw std::invalid_argument("rms_lateral_error: empty log");
  RunMetrics m;
  double sum2 = 0.0, sum2_straight = 0.0, sum2_turn = 0.0;
  std::size_t n = 0, n_straight = 0, n_turn = 0;
  for (const auto& rec : log) {
    m.max_lateral_accel = std::max(m.max_lateral_accel, rec.lat_accel);
    if (rec.fsm_mode == FsmMode::kLaneChanging) continue;
    const double lat =
        track.signed_lateral({rec.x, rec.y}, rec.ref_lane_offset);
    sum2 += lat * lat;
    ++n;
    m.max_lateral = std::max(m.max_lateral, std::abs(lat));
    if (track.in_turn(rec.arc_position)) {
      sum2_turn += lat * lat;
      ++n_turn;
      m.max_turn = std::max(m.max_turn, std::abs(lat));
    } else {
      sum2_straight += lat * lat;
      ++n_straight;
    }
  }
  if (n > 0) m.rms_lateral = std::sqrt(sum2 / n);
  if (n_straight > 0) m.rms_straight = std::sqrt(sum2_straight / n_straight);
  if (n_turn > 0) m.rms_turn = std::sqrt(sum2_turn / n_turn);
  return m;
}

void write_step_log_csv(const std::vector<StepRecord>& log,
                        const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_step_log_csv: cannot open " + path);
  f.precision(17);
  f << "t,x,y,heading,v,steer_cmd,accel_cmd,e_lateral,e_heading,fsm_state,"
       "tracked_a,tracked_b,tracked_c\n";
  for (const auto& r : log) {
    f << r.t << "," << r.x << "," << r.y << "," << r.heading << "," << r.v
      << "," << r.steer_cmd << "," << r.accel_cmd << "," << r.e_lateral << ","
      << r.e_heading << "," << to_string(r.fsm_mode) << "," << r.tracked.a
      << "," << r.tracked.b << "," << r.tracked.c << "\n";
  }
}

}  // namespace mapless
