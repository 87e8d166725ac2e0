// Copyright 2026 The uqdp Authors
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

// uqdp command-line driver: run, validate and export.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "uqdp/config.hpp"
#include "uqdp/experiment.hpp"
#include "uqdp/parallel.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr const char* kVersion = "1.0.0";

int do_run(const std::string& path, const std::vector<std::string>& overrides, std::size_t threads,
           const std::string& out) {
  uqdp::ExperimentConfig config = uqdp::load_config(path, overrides);
  const bool env_seed = uqdp::apply_seed_environment(config);
  const std::string dir = out.empty() ? config.out_dir : out;
  for (const auto& w : uqdp::config_warnings(config)) std::cerr << "warning: " << w << '\n';

  const auto start = std::chrono::steady_clock::now();
  const uqdp::RunResult result = uqdp::run_experiment(config, threads);
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  nlohmann::json info;
  info["software"] = {{"name", "uqdp"}, {"version", kVersion}};
  info["config_file"] = path;
  info["overrides"] = overrides;
  info["seed_source"] = env_seed ? "UQDP_SEED" : "config";
  info["threads"] = threads == 0 ? uqdp::default_thread_count() : threads;
  info["runtime_s"] = elapsed;
  uqdp::write_record(dir, config, result, info);

  for (const auto& p : result.points) {
    if (p.status.rfind("error", 0) == 0 || p.status.rfind("numerical", 0) == 0) {
      std::cerr << "point " << p.index << ": " << p.status << '\n';
    }
  }
  std::cout << "wrote " << result.table.rows.size() << " rows to " << dir << "/results.csv in " << elapsed
            << " s\n";
  if (!result.numerical_failures.empty()) {
    std::cerr << "numerical failure at " << result.numerical_failures.size() << " point(s)\n";
    return kExitNumerical;
  }
  return 0;
}

int do_validate(const std::string& path, const std::vector<std::string>& overrides) {
  uqdp::ExperimentConfig config = uqdp::load_config(path, overrides);
  uqdp::apply_seed_environment(config);
  for (const auto& l : uqdp::describe_config(config)) std::cout << l << '\n';
  std::cout << "config OK\n";
  return 0;
}

int do_export(const std::string& record, const std::string& figure_name, const std::string& out) {
  const auto figure = uqdp::figure_from_string(figure_name);
  if (!figure) throw std::invalid_argument("unknown figure '" + figure_name + "'");
  const std::string csv = uqdp::export_figure(uqdp::load_results(record), *figure).to_csv();
  if (out.empty()) {
    std::cout << csv;
    return 0;
  }
  std::ofstream f(out, std::ios::binary);
  f << csv;
  if (!f) throw std::runtime_error("cannot write " + out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulates protected two-qubit encodings under 1/f noise"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string config_path, out, record, figure;
  std::vector<std::string> overrides;
  std::size_t threads = 0;

  auto* run = app.add_subcommand("run", "Run an experiment and write results.csv plus metadata.json");
  run->add_option("config", config_path, "TOML experiment file")->required();
  run->add_option("--set", overrides, "Override a config value, path=value")->take_all()->allow_extra_args(false);
  run->add_option("--threads", threads, "Worker threads (0 = all cores)");
  run->add_option("--out", out, "Output directory (default: output.out_dir)");

  auto* validate = app.add_subcommand("validate", "Check a config and print resolved values and estimates");
  validate->add_option("config", config_path, "TOML experiment file")->required();
  validate->add_option("--set", overrides, "Override a config value, path=value")->allow_extra_args(false);

  auto* exp = app.add_subcommand("export", "Write tidy plot data from a run record");
  exp->add_option("record", record, "Record directory, results.csv or metadata.json")->required();
  exp->add_option("--figure", figure, "fig1 | fig3a | fig3b | fig3c | fig3d")->required();
  exp->add_option("--out", out, "Output CSV (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return do_run(config_path, overrides, threads, out);
    if (*validate) return do_validate(config_path, overrides);
    return do_export(record, figure, out);
  } catch (const uqdp::ConfigError& e) {
    std::cerr << "invalid config: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
