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
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mapless/acceptance.hpp"
#include "mapless/report.hpp"
#include "mapless/scenario_file.hpp"

namespace {

struct CommonOpts {
  std::string scenario_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::string mode;
  bool quiet = false;
};

// Applies command-line overrides on top of the parsed scenario document.
mapless::Scenario load_scenario(const CommonOpts& opts) {
  mapless::ScenarioDoc doc = mapless::parse_scenario_file(opts.scenario_path);
  if (opts.seed) mapless::set_value(doc, "run.seed", std::to_string(*opts.seed));
  if (!opts.mode.empty()) mapless::set_value(doc, "run.mode", opts.mode);
  return mapless::build_scenario(doc);
}

int cmd_run(const CommonOpts& opts) {
  mapless::Scenario sc;
  try {
    sc = load_scenario(opts);
  } catch (const mapless::ScenarioError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  const mapless::RunResult result = mapless::run_scenario(sc);
  const mapless::ReportPaths paths =
      mapless::write_report_bundle(result, sc.track, opts.out_dir);
  if (!opts.quiet) {
    std::cout << mapless::format_metrics(result.metrics);
    std::cout << "bundle=" << opts.out_dir << "\n";
  }
  if (result.metrics.failed || !result.metrics.completed) {
    if (!opts.quiet) std::cout << "run failed (left the corridor)\n";
    return 2;
  }
  (void)paths;
  return 0;
}

int cmd_sweep(const CommonOpts& opts, const std::string& sweep_expr) {
  const auto eq = sweep_expr.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == sweep_expr.size()) {
    std::cerr << "error: --sweep expects KEY=V1,V2,...\n";
    return 1;
  }
  const std::string key = sweep_expr.substr(0, eq);
  std::vector<std::string> values;
  {
    std::stringstream ss(sweep_expr.substr(eq + 1));
    std::string item;
    while (std::getline(ss, item, ',')) values.push_back(item);
  }
  if (values.empty()) {
    std::cerr << "error: --sweep '" << key << "' has no values\n";
    return 1;
  }

  mapless::ScenarioDoc base;
  try {
    base = mapless::parse_scenario_file(opts.scenario_path);
    if (opts.seed)
      mapless::set_value(base, "run.seed", std::to_string(*opts.seed));
    if (!opts.mode.empty()) mapless::set_value(base, "run.mode", opts.mode);
    mapless::build_scenario(base);  // validate before sweeping
  } catch (const mapless::ScenarioError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  std::ostringstream summary;
  summary.precision(17);
  summary << "value,valid,rms_lateral,max_lateral\n";
  for (const std::string& value : values) {
    mapless::ScenarioDoc doc = base;
    mapless::Scenario sc;
    try {
      mapless::set_value(doc, key, value);
      sc = mapless::build_scenario(doc);
    } catch (const mapless::ScenarioError& e) {
      if (!opts.quiet)
        std::cout << key << "=" << value << ": invalid (" << e.what()
                  << ")\n";
      summary << value << ",0,nan,nan\n";
      continue;
    }
    const mapless::RunResult result = mapless::run_scenario(sc);
    std::string dir_name = key + "_" + value;
    std::replace(dir_name.begin(), dir_name.end(), '.', '_');
    const std::string dir = opts.out_dir + "/" + dir_name;
    mapless::write_report_bundle(result, sc.track, dir);
    summary << value << ",1," << result.metrics.rms_lateral << ","
            << result.metrics.max_lateral << "\n";
    if (!opts.quiet)
      std::cout << key << "=" << value
                << ": rms_lateral=" << result.metrics.rms_lateral << " ("
                << dir << ")\n";
  }

  std::ofstream f(opts.out_dir + "/sweep_summary.csv");
  if (!f) {
    std::cerr << "error: cannot write " << opts.out_dir
              << "/sweep_summary.csv\n";
    return 1;
  }
  f << summary.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Map-less driving pipeline simulator"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string sweep_expr;

  auto add_common = [&](CLI::App* cmd, bool needs_scenario) {
    if (needs_scenario)
      cmd->add_option("--scenario", opts.scenario_path, "Scenario file path")
          ->required();
    cmd->add_option("--out", opts.out_dir, "Output directory");
    cmd->add_option("--seed", opts.seed, "Override run.seed");
    cmd->add_option("--mode", opts.mode, "Override run.mode (fast|full)")
        ->check(CLI::IsMember({"fast", "full"}));
    cmd->add_flag("--quiet", opts.quiet, "Suppress progress output");
  };

  CLI::App* run = app.add_subcommand("run", "Run one scenario");
  add_common(run, true);

  CLI::App* sweep =
      app.add_subcommand("sweep", "Run a scenario across parameter values");
  add_common(sweep, true);
  sweep->add_option("--sweep", sweep_expr, "KEY=V1,V2,... (e.g. controller.lookahead=1,2,4)")
      ->required();

  CLI::App* acceptance =
      app.add_subcommand("acceptance", "Run the acceptance criteria suite");
  add_common(acceptance, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(opts);
    if (sweep->parsed()) return cmd_sweep(opts, sweep_expr);
    if (acceptance->parsed()) {
      const auto results = mapless::run_acceptance(std::cout);
      return mapless::acceptance_exit_code(results);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
