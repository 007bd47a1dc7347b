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

#include "mapless/perception.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

#include "mapless/rng.hpp"

namespace mapless {

BevRaster make_raster(const RasterGeometry& geom, double fill) {
  if (geom.rows <= 0 || geom.cols <= 0 || geom.resolution <= 0.0)
    throw std::invalid_argument("make_raster: invalid geometry");
  BevRaster r;
  r.geom = geom;
  r.data.assign(geom.size(), fill);
  return r;
}

SteerableBank make_steerable_bank(double sigma, bool bright_polarity) {
  if (sigma <= 0.0) throw std::invalid_argument("steerable bank: sigma must be > 0");
  SteerableBank bank;
  bank.sigma = sigma;
  bank.radius = static_cast<int>(std::ceil(3.0 * sigma));
  bank.bright_polarity = bright_polarity;
  const int n = 2 * bank.radius + 1;
  bank.smooth.resize(n);
  bank.deriv1.resize(n);
  bank.neg_deriv2.resize(n);
  const double s2 = sigma * sigma;
  double sum_g = 0.0;
  for (int i = -bank.radius; i <= bank.radius; ++i) {
    const double g = std::exp(-0.5 * i * i / s2);
    bank.smooth[i + bank.radius] = g;
    sum_g += g;
  }
  for (auto& v : bank.smooth) v /= sum_g;
  double sum_d2 = 0.0;
  for (int i = -bank.radius; i <= bank.radius; ++i) {
    const double g = bank.smooth[i + bank.radius];
    bank.deriv1[i + bank.radius] = -(i / s2) * g;  // odd, sums to zero
    const double d2 = ((i * i - s2) / (s2 * s2)) * g;
    bank.neg_deriv2[i + bank.radius] = -d2;
    sum_d2 += -d2;
  }
  // Zero-DC the truncated second derivative so constant inputs vanish.
  for (auto& v : bank.neg_deriv2) v -= sum_d2 / n;
  return bank;
}

namespace {

// Correlation along rows (the x axis), zero padding.
std::vector<double> filter_rows(const BevRaster& in,
                                const std::vector<double>& k, int radius) {
  std::vector<double> out(in.geom.size(), 0.0);
  const int rows = in.geom.rows, cols = in.geom.cols;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        const int rr = r + i;
        if (rr < 0 || rr >= rows) continue;
        acc += k[i + radius] * in.data[rr * cols + c];
      }
      out[r * cols + c] = acc;
    }
  }
  return out;
}

// Correlation along columns (the y axis), zero padding.
std::vector<double> filter_cols(const std::vector<double>& in,
                                const RasterGeometry& geom,
                                const std::vector<double>& k, int radius) {
  std::vector<double> out(geom.size(), 0.0);
  const int rows = geom.rows, cols = geom.cols;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        const int cc = c + i;
        if (cc < 0 || cc >= cols) continue;
        acc += k[i + radius] * in[r * cols + cc];
      }
      out[r * cols + c] = acc;
    }
  }
  return out;
}

void zero_border(BevRaster& r, int radius) {
  const int rows = r.geom.rows, cols = r.geom.cols;
  for (int row = 0; row < rows; ++row)
    for (int col = 0; col < cols; ++col)
      if (row < radius || row >= rows - radius || col < radius ||
          col >= cols - radius)
        r.data[row * cols + col] = 0.0;
}

BevRaster separable(const BevRaster& in, const std::vector<double>& kx,
                    const std::vector<double>& ky, int radius) {
  BevRaster out = make_raster(in.geom);
  out.data = filter_cols(filter_rows(in, kx, radius), in.geom, ky, radius);
  zero_border(out, radius);
  return out;
}

}  // namespace

BasisResponses steer_basis(const BevRaster& raster,
                           const SteerableBank& bank) {
  if (2 * bank.radius + 1 > raster.geom.rows ||
      2 * bank.radius + 1 > raster.geom.cols)
    throw std::invalid_argument("steer_basis: kernel larger than raster");
  BasisResponses b{
      // Ra = -Gyy * I : smooth along x, -g'' along y
      separable(raster, bank.smooth, bank.neg_deriv2, bank.radius),
      // Rb = +Gxy * I : g' along x, g' along y
      separable(raster, bank.deriv1, bank.deriv1, bank.radius),
      // Rc = -Gxx * I : -g'' along x, smooth along y
      separable(raster, bank.neg_deriv2, bank.smooth, bank.radius)};
  return b;
}

BevRaster steer_response(const BevRaster& raster, const SteerableBank& bank,
                         double theta) {
  const BasisResponses basis = steer_basis(raster, bank);
  const double ct = std::cos(theta), st = std::sin(theta);
  const double wa = ct * ct, wb = 2.0 * ct * st, wc = st * st;
  BevRaster out = make_raster(raster.geom);
  for (std::size_t i = 0; i < out.data.size(); ++i)
    out.data[i] =
        wa * basis.ra.data[i] + wb * basis.rb.data[i] + wc * basis.rc.data[i];
  if (!bank.bright_polarity)
    for (auto& v : out.data) v = -v;
  return out;
}

PixelMask extract_mask(const BevRaster& response, double threshold) {
  if (threshold <= 0.0 || threshold > 1.0)
    throw std::invalid_argument("extract_mask: threshold must be in (0, 1]");
  PixelMask mask;
  mask.geom = response.geom;
  mask.data.assign(response.geom.size(), 0);
  const double maxv =
      *std::max_element(response.data.begin(), response.data.end());
  if (maxv <= 0.0) return mask;
  const double cut = threshold * maxv;
  for (std::size_t i = 0; i < response.data.size(); ++i)
    if (response.data[i] >= cut) mask.data[i] = 1;
  return mask;
}

std::vector<Eigen::Vector2d> lidar_intensity_edges(const LaserScanSim& scan,
                                                   double gradient_threshold) {
  if (gradient_threshold <= 0.0)
    throw std::invalid_argument("lidar_intensity_edges: threshold must be > 0");
  std::vector<Eigen::Vector2d> out;
  for (const auto& ring : scan.rings) {
    for (std::size_t i = 1; i < ring.size(); ++i) {
      if (std::abs(ring[i].intensity - ring[i - 1].intensity) >=
          gradient_threshold)
        out.emplace_back(ring[i].x, ring[i].y);
    }
  }
  return out;
}

std::vector<Eigen::Vector2d> accumulate_scans(
    const std::vector<PosedEdgeSet>& edge_sets, std::size_t window) {
  if (window < 1)
    throw std::invalid_argument("accumulate_scans: window must be >= 1");
  std::vector<Eigen::Vector2d> out;
  if (edge_sets.empty()) return out;
  const Pose2D& latest = edge_sets.back().pose;
  const std::size_t first =
      edge_sets.size() > window ? edge_sets.size() - window : 0;
  for (std::size_t i = first; i < edge_sets.size(); ++i) {
    for (const auto& p : edge_sets[i].points)
      out.push_back(latest.to_local(edge_sets[i].pose.to_world(p)));
  }
  return out;
}

QuadraticCenterline least_squares_quadratic(
    const std::vector<Eigen::Vector2d>& points) {
  if (points.size() < 3)
    throw std::invalid_argument("least_squares_quadratic: need >= 3 points");
  Eigen::MatrixXd A(points.size(), 3);
  Eigen::VectorXd y(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double x = points[i].x();
    A(i, 0) = x * x;
    A(i, 1) = x;
    A(i, 2) = 1.0;
    y(i) = points[i].y();
  }
  const Eigen::Vector3d sol = A.colPivHouseholderQr().solve(y);
  return {sol(0), sol(1), sol(2)};
}

namespace {

// Exact quadratic through three points with distinct x; returns false when
// the sample is degenerate.
bool minimal_quadratic(const Eigen::Vector2d& p0, const Eigen::Vector2d& p1,
                       const Eigen::Vector2d& p2, QuadraticCenterline& out) {
  const double x0 = p0.x(), x1 = p1.x(), x2 = p2.x();
  const double d01 = x0 - x1, d02 = x0 - x2, d12 = x1 - x2;
  constexpr double kEps = 1e-9;
  if (std::abs(d01) < kEps || std::abs(d02) < kEps || std::abs(d12) < kEps)
    return false;
  // Lagrange form collapsed to monomial coefficients.
  const double l0 = p0.y() / (d01 * d02);
  const double l1 = p1.y() / (-d01 * d12);
  const double l2 = p2.y() / (d02 * d12);
  out.a = l0 + l1 + l2;
  out.b = -(l0 * (x1 + x2) + l1 * (x0 + x2) + l2 * (x0 + x1));
  out.c = l0 * x1 * x2 + l1 * x0 * x2 + l2 * x0 * x1;
  return out.finite();
}

}  // namespace

QuadraticFit fit_quadratic(const std::vector<Eigen::Vector2d>& points,
                           int ransac_iters, double inlier_tol,
                           std::uint64_t seed) {
  if (points.size() < 3)
    throw std::invalid_argument("fit_quadratic: need >= 3 points");
  if (inlier_tol <= 0.0)
    throw std::invalid_argument("fit_quadratic: inlier_tol must be > 0");

  Rng rng(seed);
  const std::size_t n = points.size();
  std::size_t best_count = 0;
  std::vector<std::uint8_t> best_inliers(n, 0), inliers(n, 0);
  bool any_valid = false;

  for (int it = 0; it < ransac_iters; ++it) {
    // Resample on duplicate x, giving up on this round after a few tries.
    QuadraticCenterline cand;
    bool ok = false;
    for (int attempt = 0; attempt < 8 && !ok; ++attempt) {
      const std::size_t i0 = rng.uniform_index(n);
      const std::size_t i1 = rng.uniform_index(n);
      const std::size_t i2 = rng.uniform_index(n);
      if (i0 == i1 || i0 == i2 || i1 == i2) continue;
      ok = minimal_quadratic(points[i0], points[i1], points[i2], cand);
    }
    if (!ok) continue;
    any_valid = true;

    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const bool in =
          std::abs(points[i].y() - eval_centerline(cand, points[i].x())) <=
          inlier_tol;
      inliers[i] = in ? 1 : 0;
      if (in) ++count;
    }
    if (count > best_count) {
      best_count = count;
      best_inliers = inliers;
    }
  }
  if (!any_valid)
    throw std::invalid_argument("fit_quadratic: no valid minimal sample found");

  QuadraticFit fit;
  if (best_count >= 3) {
    std::vector<Eigen::Vector2d> kept;
    kept.reserve(best_count);
    for (std::size_t i = 0; i < n; ++i)
      if (best_inliers[i]) kept.push_back(points[i]);
    fit.curve = least_squares_quadratic(kept);
    fit.inlier_count = best_count;
  } else {
    fit.curve = least_squares_quadratic(points);
    fit.inlier_count = n;
  }
  return fit;
}

std::vector<Eigen::Vector2d> mask_to_points(const PixelMask& mask) {
  std::vector<Eigen::Vector2d> out;
  for (int r = 0; r < mask.geom.rows; ++r)
    for (int c = 0; c < mask.geom.cols; ++c)
      if (mask.at(r, c)) out.push_back(bev_project(r, c, mask.geom));
  return out;
}

namespace {

void write_pgm_impl(const RasterGeometry& geom,
                    const std::vector<std::uint8_t>& gray,
                    const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("write_pgm: cannot open " + path);
  f << "P5\n" << geom.cols << " " << geom.rows << "\n255\n";
  f.write(reinterpret_cast<const char*>(gray.data()),
          static_cast<std::streamsize>(gray.size()));
}

}  // namespace

void write_pgm(const BevRaster& raster, const std::string& path) {
  double lo = raster.data[0], hi = raster.data[0];
  for (double v : raster.data) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double span = hi > lo ? hi - lo : 1.0;
  std::vector<std::uint8_t> gray(raster.data.size());
  for (std::size_t i = 0; i < raster.data.size(); ++i)
    gray[i] =
        static_cast<std::uint8_t>(255.0 * (raster.data[i] - lo) / span + 0.5);
  write_pgm_impl(raster.geom, gray, path);
}

void write_pgm(const PixelMask& mask, const std::string& path) {
  std::vector<std::uint8_t> gray(mask.data.size());
  for (std::size_t i = 0; i < mask.data.size(); ++i)
    gray[i] = mask.data[i] ? 255 : 0;
  write_pgm_impl(mask.geom, gray, path);
}

void write_points_csv(const std::vector<Eigen::Vector2d>& points,
                      const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_points_csv: cannot open " + path);
  f.precision(17);
  f << "x,y\n";
  for (const auto& p : points) f << p.x() << "," << p.y() << "\n";
}

std::vector<Eigen::Vector2d> read_points_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("read_points_csv: cannot open " + path);
  std::vector<Eigen::Vector2d> out;
  std::string line;
  std::getline(f, line);  // header
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string xs, ys;
    std::getline(ss, xs, ',');
    std::getline(ss, ys, ',');
    out.emplace_back(std::stod(xs), std::stod(ys));
  }
  return out;
}

}  // namespace mapless
