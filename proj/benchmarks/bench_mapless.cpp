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

#include <benchmark/benchmark.h>

#include "mapless/acceptance.hpp"
#include "mapless/perception.hpp"
#include "mapless/rng.hpp"
#include "mapless/simulator.hpp"
#include "mapless/track.hpp"

namespace {

using namespace mapless;

void BM_SteerResponse(benchmark::State& state) {
  const TrackDefinition track = make_straight_track(100.0, 3.0, 0.25);
  VehicleState vs;
  vs.pose = Pose2D(20.0, 0.0, 0.0);
  Rng rng(1);
  const BevRaster raster = synth_bev_raster(vs, track, 0.0, 0.05, rng);
  const SteerableBank bank = make_steerable_bank();
  for (auto _ : state) {
    benchmark::DoNotOptimize(steer_response(raster, bank, 0.0));
  }
}
BENCHMARK(BM_SteerResponse);

void BM_FitQuadratic(benchmark::State& state) {
  Rng rng(3);
  std::vector<Eigen::Vector2d> pts;
  for (int i = 0; i < 160; ++i) {
    const double x = 10.0 * i / 160.0;
    pts.emplace_back(x, 0.01 * x * x - 0.05 * x + 1.2 +
                            0.02 * rng.gaussian());
  }
  for (int i = 0; i < 40; ++i)
    pts.emplace_back(rng.uniform(0.0, 10.0), rng.uniform(-4.0, 4.0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_quadratic(pts, 60, 0.1, 7));
  }
}
BENCHMARK(BM_FitQuadratic);

void BM_RunScenarioFast(benchmark::State& state) {
  Scenario sc = make_paper_track_scenario();
  sc.duration = 10.0;
  std::size_t steps = 0;
  for (auto _ : state) {
    const RunResult result = run_scenario(sc);
    steps += result.log.size();
    benchmark::DoNotOptimize(result.metrics.rms_lateral);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(steps));
}
BENCHMARK(BM_RunScenarioFast)->Unit(benchmark::kMillisecond);

void BM_RunScenarioFull(benchmark::State& state) {
  Scenario sc = make_paper_track_scenario();
  sc.sensors.mode = SensorConfig::Mode::kFull;
  sc.duration = 3.0;
  std::size_t steps = 0;
  for (auto _ : state) {
    const RunResult result = run_scenario(sc);
    steps += result.log.size();
    benchmark::DoNotOptimize(result.metrics.rms_lateral);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(steps));
}
BENCHMARK(BM_RunScenarioFull)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
