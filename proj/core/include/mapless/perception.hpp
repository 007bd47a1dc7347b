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

#ifndef MAPLESS_PERCEPTION_HPP
#define MAPLESS_PERCEPTION_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mapless/geometry.hpp"

namespace mapless {

/// Top-down intensity raster in the vehicle frame, values in [0, 1].
struct BevRaster {
  RasterGeometry geom;
  std::vector<double> data;  // row-major, rows * cols

  double& at(int row, int col) { return data[row * geom.cols + col]; }
  double at(int row, int col) const { return data[row * geom.cols + col]; }
};

BevRaster make_raster(const RasterGeometry& geom, double fill = 0.0);

/// Boolean lane-marking mask sharing the geometry of its source raster.
struct PixelMask {
  RasterGeometry geom;
  std::vector<std::uint8_t> data;

  bool at(int row, int col) const { return data[row * geom.cols + col] != 0; }
  void set(int row, int col, bool v) {
    data[row * geom.cols + col] = v ? 1 : 0;
  }
};

/// Second-derivative-of-Gaussian steerable basis for bright-ridge detection.
/// Kernels are stored as separable 1D factor pairs (row pass, then column
/// pass). Each equivalent 2D kernel sums to zero.
struct SteerableBank {
  double sigma = 2.0;  // cells
  int radius = 6;
  // Basis a: -Gyy (ridge along theta = 0, i.e. along the row/x axis)
  // Basis b: +Gxy (cross term)
  // Basis c: -Gxx
  std::vector<double> smooth;       // g
  std::vector<double> deriv1;       // g'
  std::vector<double> neg_deriv2;   // -g'' (zero-DC)
  bool bright_polarity = true;
};

/// Builds a bank with kernel radius ceil(3*sigma).
SteerableBank make_steerable_bank(double sigma = 2.0,
                                  bool bright_polarity = true);

/// Ridge response oriented along `theta` (radians from the forward/x axis):
/// cos^2 * Ra + 2 cos sin * Rb + sin^2 * Rc over the -Gyy/+Gxy/-Gxx basis,
/// positive on bright ridges. Borders are zero-padded during convolution
/// and the outer band of kernel-radius cells is forced to zero.
/// Throws std::invalid_argument if the kernel does not fit the raster.
BevRaster steer_response(const BevRaster& raster, const SteerableBank& bank,
                         double theta);

/// Basis responses (Ra, Rb, Rc); steer_response is their closed-form
/// combination.
struct BasisResponses {
  BevRaster ra, rb, rc;
};
BasisResponses steer_basis(const BevRaster& raster, const SteerableBank& bank);

/// Cells with response >= threshold * max(response). Empty when the maximum
/// response is not positive. threshold in (0, 1].
PixelMask extract_mask(const BevRaster& response, double threshold);

/// Simulated multi-ring laser scan; points ordered by azimuth within a ring.
struct LaserScanSim {
  struct Point {
    double x = 0.0, y = 0.0, z = 0.0;  // m, vehicle frame
    double intensity = 0.0;            // [0, 1]
  };
  std::vector<std::vector<Point>> rings;
  double timestamp = 0.0;  // s
};

/// Ground-projected points where the absolute intensity difference between
/// consecutive points in a ring meets `gradient_threshold` (> 0).
std::vector<Eigen::Vector2d> lidar_intensity_edges(const LaserScanSim& scan,
                                                   double gradient_threshold);

/// Edge points extracted at a given vehicle pose.
struct PosedEdgeSet {
  Pose2D pose;  // world pose the points were observed from
  std::vector<Eigen::Vector2d> points;  // vehicle frame of `pose`
};

/// Transforms the last `window` (>= 1) edge sets into the vehicle frame of
/// the latest pose and concatenates them.
std::vector<Eigen::Vector2d> accumulate_scans(
    const std::vector<PosedEdgeSet>& edge_sets, std::size_t window);

struct QuadraticFit {
  QuadraticCenterline curve;
  std::size_t inlier_count = 0;
};

/// RANSAC over 3-point minimal quadratics followed by a linear
/// least-squares refit on the best inlier set (vertical residual
/// |y - f(x)| <= inlier_tol). Deterministic given the seed. Throws
/// std::invalid_argument for fewer than 3 points or when no valid minimal
/// sample (distinct x) is found.
QuadraticFit fit_quadratic(const std::vector<Eigen::Vector2d>& points,
                           int ransac_iters, double inlier_tol,
                           std::uint64_t seed);

/// Plain least-squares quadratic through all points (>= 3, distinct x).
QuadraticCenterline least_squares_quadratic(
    const std::vector<Eigen::Vector2d>& points);

/// Cell centers of all set mask cells, in vehicle-frame meters.
std::vector<Eigen::Vector2d> mask_to_points(const PixelMask& mask);

// Debug serialization.
void write_pgm(const BevRaster& raster, const std::string& path);
void write_pgm(const PixelMask& mask, const std::string& path);
void write_points_csv(const std::vector<Eigen::Vector2d>& points,
                      const std::string& path);
std::vector<Eigen::Vector2d> read_points_csv(const std::string& path);

}  // namespace mapless

#endif  // MAPLESS_PERCEPTION_HPP
