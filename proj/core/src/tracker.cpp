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

#include "mapless/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

namespace mapless {

const char* to_string(LaneSource s) {
  switch (s) {
    case LaneSource::kSteerable: return "steerable";
    case LaneSource::kLidar: return "lidar";
    case LaneSource::kCnnSlot: return "cnn-slot";
  }
  return "?";
}

LaneSource lane_source_from_string(const std::string& s) {
  if (s == "steerable") return LaneSource::kSteerable;
  if (s == "lidar") return LaneSource::kLidar;
  if (s == "cnn-slot") return LaneSource::kCnnSlot;
  throw std::invalid_argument("unknown lane source: " + s);
}

Eigen::Matrix3d NoiseModel::omega(LaneSource source) const {
  const auto it = measurement.find(source);
  if (it == measurement.end())
    throw std::invalid_argument(std::string("no noise model for source ") +
                                to_string(source));
  if ((it->second.array() <= 0.0).any())
    throw std::invalid_argument("measurement noise entries must be > 0");
  return it->second.asDiagonal();
}

LaneKalmanState predict(const LaneKalmanState& state,
                        const NoiseModel& noise) {
  LaneKalmanState next = state;
  next.covariance = state.covariance + noise.system;
  return next;
}

LaneKalmanState update(const LaneKalmanState& state,
                       const LaneMeasurement& meas, const NoiseModel& noise) {
  const Eigen::Matrix3d omega = noise.omega(meas.source);
  const Eigen::Matrix3d& p = state.covariance;
  const Eigen::Matrix3d gain = p * (p + omega).inverse();
  LaneKalmanState next = state;
  next.set_vector(state.vector() + gain * (meas.y - state.vector()));
  Eigen::Matrix3d pn = (Eigen::Matrix3d::Identity() - gain) * p;
  next.covariance = 0.5 * (pn + pn.transpose());
  next.last_update_time = meas.timestamp;
  return next;
}

std::vector<LaneKalmanState> ingest(const LaneKalmanState& initial,
                                    const std::vector<LaneMeasurement>& stream,
                                    const NoiseModel& noise, double tick) {
  if (tick <= 0.0) throw std::invalid_argument("ingest: tick must be > 0");
  std::vector<LaneKalmanState> trajectory;
  trajectory.push_back(initial);
  LaneKalmanState state = initial;

  double prev_time = -std::numeric_limits<double>::infinity();
  long cur_tick = 0;

  std::size_t i = 0;
  while (i < stream.size()) {
    if (stream[i].timestamp < prev_time)
      throw std::invalid_argument("ingest: out-of-order measurement rejected");
    prev_time = stream[i].timestamp;

    // Gather the group mapping to the same tick, apply in priority order.
    const long target_tick = std::lround(
        (stream[i].timestamp - initial.last_update_time) / tick);
    std::size_t j = i;
    while (j < stream.size() &&
           std::lround((stream[j].timestamp - initial.last_update_time) /
                       tick) == target_tick) {
      if (stream[j].timestamp < prev_time)
        throw std::invalid_argument(
            "ingest: out-of-order measurement rejected");
      prev_time = stream[j].timestamp;
      ++j;
    }
    std::vector<LaneMeasurement> group(stream.begin() + i, stream.begin() + j);
    std::stable_sort(group.begin(), group.end(),
                     [](const LaneMeasurement& a, const LaneMeasurement& b) {
                       return static_cast<int>(a.source) <
                              static_cast<int>(b.source);
                     });

    while (cur_tick < target_tick) {
      state = predict(state, noise);
      ++cur_tick;
      state.last_update_time = initial.last_update_time + cur_tick * tick;
      trajectory.push_back(state);
    }
    for (const auto& m : group) {
      state = update(state, m, noise);
      trajectory.push_back(state);
    }
    i = j;
  }
  return trajectory;
}

std::vector<LaneMeasurement> read_measurements_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("read_measurements_csv: cannot open " + path);
  std::vector<LaneMeasurement> out;
  std::string line;
  std::getline(f, line);  // header
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string tok;
    LaneMeasurement m;
    std::getline(ss, tok, ',');
    m.timestamp = std::stod(tok);
    std::getline(ss, tok, ',');
    m.source = lane_source_from_string(tok);
    for (int k = 0; k < 3; ++k) {
      std::getline(ss, tok, ',');
      m.y(k) = std::stod(tok);
    }
    out.push_back(m);
  }
  return out;
}

void write_measurements_csv(const std::vector<LaneMeasurement>& stream,
                            const std::string& path) {
  std::ofstream f(path);
  if (!f)
    throw std::runtime_error("write_measurements_csv: cannot open " + path);
  f.precision(17);
  f << "timestamp,source,a,b,c\n";
  for (const auto& m : stream)
    f << m.timestamp << "," << to_string(m.source) << "," << m.y(0) << ","
      << m.y(1) << "," << m.y(2) << "\n";
}

void write_states_csv(const std::vector<LaneKalmanState>& states,
                      const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_states_csv: cannot open " + path);
  f.precision(17);
  f << "time,a,b,c,p00,p11,p22\n";
  for (const auto& s : states)
    f << s.last_update_time << "," << s.estimate.a << "," << s.estimate.b
      << "," << s.estimate.c << "," << s.covariance(0, 0) << ","
      << s.covariance(1, 1) << "," << s.covariance(2, 2) << "\n";
}

}  // namespace mapless
