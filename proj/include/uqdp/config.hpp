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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "uqdp/noise.hpp"

namespace uqdp {

/// Invalid configuration; field() names the offending dotted key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

enum class ExperimentKind { Dephasing, GateUX, GateUZ, GateUC, JcDephasing, SpreadScan, SpectrumCheck };

std::string_view to_string(ExperimentKind kind);

/// Resolved experiment. Config files give frequencies as f = omega/2pi in
/// GHz; every energy field here is an angular frequency in rad/s.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::GateUX;

  // [model]
  double E_z = 0.0;
  std::vector<double> Em_over_Ez{0.4};
  bool include_bare = true;  // dephasing: bare-qubit series
  double lambda = 0.0;       // U_X drive
  double theta = 0.0;        // gate angle; defaults pi (U_X) and pi/2 (U_Z)
  double delta_Em_over_Ez = 0.02;
  double E_m_sigma = 0.0;
  double E_m_tau = 0.0;
  double lambda_c = 0.0;
  std::vector<double> E_cc{0.0};
  bool calibrate = true;
  std::vector<double> a0{0.99, 0.98, 0.95};
  double J = 0.0;
  std::size_t n_max = 6;
  std::size_t doublet = 1;

  // [noise]
  double A_over_Ez = 2e-4;
  std::vector<double> eta;  // rad
  double omega_ir = 0.0;
  double omega_uv = 0.0;
  double delta_omega = 0.0;
  std::size_t log_cells_per_decade = 16;

  // [ensemble]
  std::size_t n_trajectories = 200;
  std::uint64_t base_seed = 1;

  // [numerics]
  double dt_fraction = 1.0 / 640.0;  // of the fastest period
  std::string method = "effective";  // dephasing: effective | full
  double horizon = 0.0;              // s; 0 picks one automatically
  double max_horizon = 1e-2;         // s
  std::size_t fc_terms = 16;         // 16 or 9
  std::size_t psd_samples = 32768;   // spectrum-check
  double psd_dt = 2.5e-6;            // s

  // [output]
  std::string out_dir = "uqdp-out";

  /// Everything, in file units and in rad/s.
  nlohmann::json echo() const;
};

/// Parses TOML text, applies `path=value` overrides (values in TOML syntax,
/// bare words taken as strings) and validates. Throws ConfigError.
ExperimentConfig parse_config(std::string_view toml_text, const std::vector<std::string>& overrides = {},
                              const std::string& source = "config");
ExperimentConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

/// Replaces base_seed with the UQDP_SEED environment variable when it is set.
/// Returns true when it applied. Throws ConfigError for a malformed value.
bool apply_seed_environment(ExperimentConfig& config);

/// Noise spectrum of the configuration at power angle eta.
NoiseSpectrum noise_spectrum(const ExperimentConfig& config, double eta);

/// Advisory notes (regime warnings, small ensembles).
std::vector<std::string> config_warnings(const ExperimentConfig& config);

}  // namespace uqdp
