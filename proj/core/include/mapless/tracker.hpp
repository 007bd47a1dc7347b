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

#ifndef MAPLESS_TRACKER_HPP
#define MAPLESS_TRACKER_HPP

#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mapless/geometry.hpp"

namespace mapless {

/// Lane-measurement sources in fixed priority order for simultaneous
/// updates.
enum class LaneSource { kSteerable = 0, kLidar = 1, kCnnSlot = 2 };

const char* to_string(LaneSource s);
LaneSource lane_source_from_string(const std::string& s);

/// Filtered centerline parameters [a, b, c] with covariance.
struct LaneKalmanState {
  QuadraticCenterline estimate;
  Eigen::Matrix3d covariance = Eigen::Matrix3d::Zero();
  double last_update_time = 0.0;  // s

  Eigen::Vector3d vector() const {
    return {estimate.a, estimate.b, estimate.c};
  }
  void set_vector(const Eigen::Vector3d& v) {
    estimate = {v(0), v(1), v(2)};
  }
};

/// Per-tick system noise R and per-source diagonal measurement noise Omega.
struct NoiseModel {
  Eigen::Matrix3d system = Eigen::Vector3d(1e-8, 1e-6, 1e-4).asDiagonal();
  std::map<LaneSource, Eigen::Vector3d> measurement = {
      {LaneSource::kSteerable, {1e-6, 1e-4, 1e-2}},
      {LaneSource::kLidar, {2e-6, 2e-4, 2e-2}},
      {LaneSource::kCnnSlot, {1e-6, 1e-4, 1e-2}},
  };

  /// Throws std::invalid_argument for an unconfigured source.
  Eigen::Matrix3d omega(LaneSource source) const;
};

struct LaneMeasurement {
  LaneSource source = LaneSource::kSteerable;
  Eigen::Vector3d y = Eigen::Vector3d::Zero();  // [a, b, c]
  double timestamp = 0.0;                       // s
};

/// Identity motion model: estimate unchanged, P += R.
LaneKalmanState predict(const LaneKalmanState& state,
                        const NoiseModel& noise);

/// Identity-observation linear update with re-symmetrized covariance.
LaneKalmanState update(const LaneKalmanState& state,
                       const LaneMeasurement& meas, const NoiseModel& noise);

/// Asynchronous ingest: the filter advances on a fixed prediction tick and
/// each measurement applies at its nearest tick, simultaneous measurements
/// in source-priority order. Returns the state after every predict and
/// update. Throws std::invalid_argument for out-of-order timestamps.
std::vector<LaneKalmanState> ingest(const LaneKalmanState& initial,
                                    const std::vector<LaneMeasurement>& stream,
                                    const NoiseModel& noise,
                                    double tick = 1.0 / 26.0);

// Measurement stream CSV: timestamp,source,a,b,c
std::vector<LaneMeasurement> read_measurements_csv(const std::string& path);
void write_measurements_csv(const std::vector<LaneMeasurement>& stream,
                            const std::string& path);
// State trajectory CSV: time,a,b,c,p00,p11,p22
void write_states_csv(const std::vector<LaneKalmanState>& states,
                      const std::string& path);

}  // namespace mapless

#endif  // MAPLESS_TRACKER_HPP
