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

#include <algorithm>
#include <cmath>
#include <vector>

#include <doctest.h>

#include "mapless/obstacle_map.hpp"
#include "mapless/rng.hpp"

using namespace mapless;

namespace {

// Flat ground sampled densely over the forward grid.
std::vector<Eigen::Vector3d> ground_points(double x_max = 35.0,
                                           double y_half = 6.0,
                                           double z = 0.0) {
  std::vector<Eigen::Vector3d> pts;
  for (double x = 0.2; x < x_max; x += 0.2)
    for (double y = -y_half; y <= y_half; y += 0.2) pts.emplace_back(x, y, z);
  return pts;
}

void add_box(std::vector<Eigen::Vector3d>& pts, double x0, double y0,
             double width, double depth, double height) {
  for (double x = x0; x <= x0 + depth; x += 0.1)
    for (double y = y0 - width / 2; y <= y0 + width / 2; y += 0.1) {
      pts.emplace_back(x, y, height);        // top
      pts.emplace_back(x0, y, height * 0.5);  // near face
    }
}

ElevationGrid ramp_grid(double rise_per_cell, int rows = 20, int cols = 20,
                        double res = 0.25) {
  ElevationGrid grid;
  grid.geom.rows = rows;
  grid.geom.cols = cols;
  grid.geom.resolution = res;
  grid.geom.origin_x = 0.0;
  grid.geom.origin_y = -0.5 * cols * res;
  grid.height.assign(grid.geom.size(), 0.0);
  grid.count.assign(grid.geom.size(), 1);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) grid.height[r * cols + c] = r * rise_per_cell;
  return grid;
}

}  // namespace

TEST_CASE("build_elevation bins and filters") {
  SUBCASE("flat ground maps to zero heights") {
    const ElevationGrid grid = build_elevation(ground_points(), Pose2D{});
    bool any = false;
    for (int r = 0; r < grid.geom.rows; ++r)
      for (int c = 0; c < grid.geom.cols; ++c)
        if (grid.known(r, c)) {
          any = true;
          CHECK(grid.height_at(r, c) == doctest::Approx(0.0));
        }
    CHECK(any);
  }
  SUBCASE("points behind the vehicle are excluded") {
    const std::vector<Eigen::Vector3d> behind = {
        {-1.0, 0.0, 2.0}, {-5.0, 1.0, 2.0}};
    const ElevationGrid grid = build_elevation(behind, Pose2D{});
    for (int r = 0; r < grid.geom.rows; ++r)
      for (int c = 0; c < grid.geom.cols; ++c) CHECK_FALSE(grid.known(r, c));
  }
  SUBCASE("points outside the 120-degree FOV are excluded") {
    // 80 degrees off axis is outside a 120-degree (±60) field of view.
    const double ang = 80.0 * M_PI / 180.0;
    const std::vector<Eigen::Vector3d> wide = {
        {3.0 * std::cos(ang), 3.0 * std::sin(ang), 1.0}};
    const ElevationGrid grid = build_elevation(wide, Pose2D{});
    for (int r = 0; r < grid.geom.rows; ++r)
      for (int c = 0; c < grid.geom.cols; ++c) CHECK_FALSE(grid.known(r, c));
  }
  SUBCASE("a 1 m-tall box at 10 m produces height-1 cells") {
    auto pts = ground_points();
    add_box(pts, 10.0, 0.0, 0.75, 0.75, 1.0);
    const ElevationGrid grid = build_elevation(pts, Pose2D{});
    double peak = 0.0;
    for (int r = 0; r < grid.geom.rows; ++r)
      for (int c = 0; c < grid.geom.cols; ++c)
        if (grid.known(r, c)) peak = std::max(peak, grid.height_at(r, c));
    CHECK(peak == doctest::Approx(1.0));
  }
  SUBCASE("permutation invariance of the input order") {
    auto pts = ground_points(12.0, 3.0);
    add_box(pts, 6.0, 0.5, 0.75, 0.75, 1.0);
    const ElevationGrid a = build_elevation(pts, Pose2D{});
    std::reverse(pts.begin(), pts.end());
    const ElevationGrid b = build_elevation(pts, Pose2D{});
    CHECK(a.height == b.height);
    CHECK(a.count == b.count);
  }
}

TEST_CASE("traversability scoring") {
  TraversabilityParams slope_only;
  slope_only.w_slope = 1.0;
  slope_only.w_rough = 0.0;

  SUBCASE("flat terrain is fully traversable") {
    const TraversabilityGrid t = traversability(ramp_grid(0.0));
    for (int r = 0; r < t.geom.rows; ++r)
      for (int c = 0; c < t.geom.cols; ++c) {
        REQUIRE(t.is_known(r, c));
        CHECK(t.score_at(r, c) == doctest::Approx(1.0));
      }
  }
  SUBCASE("ramp at half the critical slope scores one half") {
    const double res = 0.25;
    const TraversabilityGrid t = traversability(
        ramp_grid(0.5 * slope_only.slope_crit * res), slope_only);
    // Interior rows: every 3x3 neighborhood shares the raw score 0.5.
    for (int r = 2; r < t.geom.rows - 2; ++r)
      for (int c = 2; c < t.geom.cols - 2; ++c)
        CHECK(t.score_at(r, c) == doctest::Approx(0.5));
  }
  SUBCASE("slope at or above critical saturates to zero") {
    const double res = 0.25;
    const TraversabilityGrid t = traversability(
        ramp_grid(2.0 * slope_only.slope_crit * res), slope_only);
    for (int r = 2; r < t.geom.rows - 2; ++r)
      for (int c = 2; c < t.geom.cols - 2; ++c)
        CHECK(t.score_at(r, c) == doctest::Approx(0.0));
  }
  SUBCASE("invariant under a constant height offset") {
    ElevationGrid a = ramp_grid(0.07);
    ElevationGrid b = a;
    for (auto& h : b.height) h += 123.0;
    const TraversabilityGrid ta = traversability(a);
    const TraversabilityGrid tb = traversability(b);
    REQUIRE(ta.score.size() == tb.score.size());
    for (std::size_t i = 0; i < ta.score.size(); ++i)
      CHECK(ta.score[i] == doctest::Approx(tb.score[i]).epsilon(1e-9));
  }
  SUBCASE("unknown cells stay unknown") {
    ElevationGrid g = ramp_grid(0.0);
    g.count[5 * g.geom.cols + 5] = 0;
    const TraversabilityGrid t = traversability(g);
    CHECK_FALSE(t.is_known(5, 5));
  }
}

TEST_CASE("detect_obstacles clustering") {
  const auto corridor = lane_corridor({0, 0, 0}, 1.5, 35.0);

  SUBCASE("all-traversable grid finds nothing") {
    const TraversabilityGrid t = traversability(ramp_grid(0.0, 140, 140));
    CHECK(detect_obstacles(t, corridor, 0.5, 3).empty());
  }
  SUBCASE("a single occupied cell is rejected as spurious") {
    TraversabilityGrid t;
    t.geom = ramp_grid(0.0, 60, 60).geom;
    t.score.assign(t.geom.size(), 1.0);
    t.known.assign(t.geom.size(), 1);
    t.score[30 * 60 + 30] = 0.1;  // one occupied cell
    CHECK(detect_obstacles(t, {}, 0.5, 3).empty());
    // The same cell does register once the gate admits singletons.
    CHECK(detect_obstacles(t, {}, 0.5, 1).size() == 1);
  }
  SUBCASE("synthetic pylon at 24 m is ranged correctly") {
    auto pts = ground_points(35.0, 4.0);
    add_box(pts, 24.0, 0.0, 0.75, 0.75, 1.0);
    const ElevationGrid grid = build_elevation(pts, Pose2D{});
    const TraversabilityGrid t = traversability(grid);
    const auto clusters = detect_obstacles(t, corridor, 0.5, 3);
    REQUIRE(!clusters.empty());
    CHECK(clusters.front().range == doctest::Approx(24.0).epsilon(0.5 / 24.0));
    CHECK(std::abs(clusters.front().centroid.y()) < 0.5);
  }
  SUBCASE("occupied set grows monotonically with the threshold") {
    Rng rng(41);
    ElevationGrid g = ramp_grid(0.0, 40, 40);
    for (auto& h : g.height) h = rng.uniform(0.0, 0.12);
    const TraversabilityGrid t = traversability(g);
    auto cells = [&](double threshold) {
      std::vector<std::pair<int, int>> all;
      for (const auto& cl : detect_obstacles(t, {}, threshold, 1))
        all.insert(all.end(), cl.cells.begin(), cl.cells.end());
      std::sort(all.begin(), all.end());
      return all;
    };
    const auto low = cells(0.35);
    const auto high = cells(0.65);
    CHECK(std::includes(high.begin(), high.end(), low.begin(), low.end()));
  }
  SUBCASE("invalid threshold throws") {
    const TraversabilityGrid t = traversability(ramp_grid(0.0));
    CHECK_THROWS_AS(detect_obstacles(t, corridor, 0.0, 3),
                    std::invalid_argument);
    CHECK_THROWS_AS(detect_obstacles(t, corridor, 1.0, 3),
                    std::invalid_argument);
  }
}

TEST_CASE("fit_plane_distance") {
  SUBCASE("exact vertical plane at x = 10") {
    std::vector<Eigen::Vector3d> pts;
    for (double y = -1.0; y <= 1.0; y += 0.25)
      for (double z = 0.5; z <= 2.0; z += 0.25) pts.emplace_back(10.0, y, z);
    const auto [fit, dist] = fit_plane_distance(pts);
    CHECK(dist == doctest::Approx(10.0).epsilon(1e-9));
    CHECK(std::abs(fit.normal.norm() - 1.0) < 1e-9);
    CHECK(fit.rms_residual < 1e-9);
  }
  SUBCASE("seeded noise keeps the distance within 5 cm") {
    Rng rng(55);
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<Eigen::Vector3d> pts;
      for (double y = -1.0; y <= 1.0; y += 0.2)
        for (double z = 0.5; z <= 2.0; z += 0.2)
          pts.emplace_back(10.0 + rng.gaussian(0.0, 0.02), y, z);
      const auto [fit, dist] = fit_plane_distance(pts);
      CHECK(dist == doctest::Approx(10.0).epsilon(0.005));
    }
  }
  SUBCASE("degenerate inputs throw") {
    CHECK_THROWS_AS(fit_plane_distance({{1, 0, 0}, {2, 0, 0}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(fit_plane_distance({{1, 0, 0}, {2, 0, 0}, {3, 0, 0}}),
                    std::invalid_argument);
  }
  SUBCASE("distance error shrinks as the point count grows") {
    auto mean_err = [](int n, std::uint64_t seed) {
      Rng rng(seed);
      double total = 0.0;
      const int trials = 30;
      for (int t = 0; t < trials; ++t) {
        std::vector<Eigen::Vector3d> pts;
        for (int i = 0; i < n; ++i)
          pts.emplace_back(10.0 + rng.gaussian(0.0, 0.05),
                           rng.uniform(-1.0, 1.0), rng.uniform(0.5, 2.0));
        total += std::abs(fit_plane_distance(pts).second - 10.0);
      }
      return total / trials;
    };
    const double e10 = mean_err(10, 1);
    const double e1000 = mean_err(1000, 2);
    CHECK(e1000 < e10);
  }
}

TEST_CASE("lane_corridor wraps the centerline") {
  const QuadraticCenterline c{0.01, 0.05, 0.3};
  const auto poly = lane_corridor(c, 1.5, 20.0, 1.0);
  CHECK(poly.size() >= 40);  // both sides of the corridor
  // Every polygon vertex lies 1.5 m from its centerline foot.
  for (const auto& p : poly) {
    double best = 1e9;
    for (double x = 0.0; x <= 20.0; x += 0.01) {
      const double d =
          (p - Eigen::Vector2d(x, eval_centerline(c, x))).norm();
      best = std::min(best, d);
    }
    CHECK(best == doctest::Approx(1.5).epsilon(0.02));
  }
}
