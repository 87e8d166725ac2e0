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

#include "uqdp/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "uqdp/analysis.hpp"
#include "uqdp/dynamics.hpp"
#include "uqdp/model.hpp"

namespace uqdp {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kRadPerGHz = 2.0 * kPi * 1e9;

std::string format_ratio_label(const char* prefix, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s%.6g", prefix, value);
  return buf;
}

std::string base_name(std::string_view column) {
  const auto pos = column.find(" [");
  return std::string(column.substr(0, pos));
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string status_of(const std::string& error, bool numerical) {
  return (numerical ? "numerical: " : "error: ") + error;
}

EnsembleConfig point_ensemble(const ExperimentConfig& c, double eta, std::uint64_t seed, std::size_t threads) {
  EnsembleConfig e;
  e.n_trajectories = c.n_trajectories;
  e.base_seed = seed;
  e.spectrum = noise_spectrum(c, eta);
  e.threads = threads;
  return e;
}

/// Runs fn for one grid point and books the outcome into the result.
template <typename Fn>
void run_point(RunResult& result, std::uint64_t seed, Fn&& fn) {
  PointRecord rec;
  rec.index = result.points.size();
  rec.seed = seed;
  const auto start = std::chrono::steady_clock::now();
  std::vector<std::string> row;
  try {
    row = fn();
    rec.status = row.back();
  } catch (const NumericalError& e) {
    rec.status = status_of(e.what(), true);
    result.numerical_failures.push_back(rec.index);
  } catch (const std::exception& e) {
    rec.status = status_of(e.what(), false);
  }
  rec.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (rec.status.rfind("error", 0) == 0 || rec.status.rfind("numerical", 0) == 0) ++result.failed_points;
  result.points.push_back(rec);
  if (row.empty()) return;  // the caller fills failed rows
  result.table.rows.push_back(std::move(row));
}

/// Row prefix used when a point fails before producing values.
void fill_failed_row(RunResult& result, std::vector<std::string> keys) {
  if (result.points.empty() || result.table.rows.size() == result.points.size()) return;
  keys.resize(result.table.columns.size() - 1);
  keys.push_back(result.points.back().status);
  result.table.rows.push_back(std::move(keys));
}

void set_step(Schedule& s, const ComplexMatrix& h, double dt_fraction) {
  if (!s.empty()) s.dt = dt_fraction * 2.0 * kPi / max_energy_scale(h, s);
}

std::string dephasing_status(const DephasingResult& r) { return r.lower_bound ? "lower bound" : "ok"; }

std::vector<std::string> dephasing_row(const std::string& series, const std::string& ratio, double eta,
                                       const DephasingResult& r) {
  return {series,
          ratio,
          format_number(eta),
          format_number(r.T_phi),
          r.lower_bound ? "" : format_number(r.T_phi_standard_error),
          r.lower_bound ? "true" : "false",
          r.lower_bound ? "" : format_number(r.decay_exponent),
          std::to_string(r.n_trajectories),
          dephasing_status(r)};
}

const std::vector<std::string> kDephasingColumns{
    "series [text]",   "E_m/E_z [1]",          "eta [rad]",        "T_phi [s]",    "T_phi_stderr [s]",
    "lower_bound [bool]", "decay_exponent [1]", "n_trajectories [count]", "status [text]"};

DephasingOptions dephasing_options(const ExperimentConfig& c) {
  DephasingOptions o;
  o.horizon = c.horizon;
  o.max_horizon = c.max_horizon;
  return o;
}

DephasingMethod method_of(const ExperimentConfig& c) {
  return c.method == "full" ? DephasingMethod::Full : DephasingMethod::Effective;
}

void run_dephasing(const ExperimentConfig& c, std::size_t threads, RunResult& out) {
  out.table.columns = kDephasingColumns;
  std::vector<std::optional<double>> series;
  if (c.include_bare) series.push_back(std::nullopt);
  for (double r : c.Em_over_Ez) series.push_back(r);
  for (const auto& s : series) {
    const std::string label = s ? format_ratio_label("Em/Ez=", *s) : "bare";
    const std::string ratio = s ? format_number(*s) : "";
    for (double eta : c.eta) {
      const std::uint64_t seed = point_seed(c.base_seed, out.points.size());
      run_point(out, seed, [&] {
        const DephasingTarget target =
            s ? DephasingTarget::encoded(UqdpPairSpec::x_coupled(c.E_z, *s * c.E_z)) : DephasingTarget::bare(c.E_z);
        const DephasingResult r =
            dephasing_time(target, point_ensemble(c, eta, seed, threads), method_of(c), dephasing_options(c));
        return dephasing_row(label, ratio, eta, r);
      });
      fill_failed_row(out, {label, ratio, format_number(eta)});
    }
  }
}

JaynesCummingsSpec jc_spec(const ExperimentConfig& c) {
  JaynesCummingsSpec jc;
  jc.E_z = c.E_z;
  jc.omega0 = 2.0 * c.E_z;
  jc.J = c.J;
  jc.n_max = c.n_max;
  return jc;
}

void run_jc_dephasing(const ExperimentConfig& c, std::size_t threads, RunResult& out) {
  out.table.columns = kDephasingColumns;
  const std::string label = "doublet n=" + std::to_string(c.doublet);
  for (double eta : c.eta) {
    const std::uint64_t seed = point_seed(c.base_seed, out.points.size());
    run_point(out, seed, [&] {
      const DephasingResult r = dephasing_time(DephasingTarget::polariton(jc_spec(c), c.doublet),
                                               point_ensemble(c, eta, seed, threads), method_of(c),
                                               dephasing_options(c));
      return dephasing_row(label, "", eta, r);
    });
    fill_failed_row(out, {label, "", format_number(eta)});
  }
}

void run_single_gate(const ExperimentConfig& c, std::size_t threads, RunResult& out, bool ux) {
  const std::string f = ux ? "F_X" : "F_Z";
  out.table.columns = {"E_m/E_z [1]",   "E_m/2E_z [1]",       "eta [rad]",         f + " [1]",
                       f + "_stderr [1]", "trace_defect [1]", "gate_time [s]", "n_trajectories [count]",
                       "status [text]"};
  const ComplexMatrix target = rotation(pauli_matrix(ux ? PauliAxis::X : PauliAxis::Z), c.theta);
  for (double r : c.Em_over_Ez) {
    for (double eta : c.eta) {
      const std::uint64_t seed = point_seed(c.base_seed, out.points.size());
      run_point(out, seed, [&] {
        const UqdpPairSpec spec = UqdpPairSpec::x_coupled(c.E_z, r * c.E_z);
        const ComplexMatrix h = build_pair_hamiltonian(spec);
        Schedule s = ux ? gate_UX(spec, c.theta, c.lambda) : gate_UZ(spec, c.theta, c.delta_Em_over_Ez * c.E_z);
        set_step(s, h, c.dt_fraction);
        const auto basis = encoded_subspace(spec).basis();
        const EnsembleConfig e = point_ensemble(c, eta, seed, threads);
        const ChannelEstimate ch = reconstruct_channel(h, s, basis, 2, &e);
        const FidelityReport fr = fidelity_FX(ch, target);
        return std::vector<std::string>{format_number(r),
                                        format_number(0.5 * r),
                                        format_number(eta),
                                        format_number(fr.value),
                                        format_number(fr.standard_error),
                                        format_number(ch.trace_defect),
                                        format_number(s.duration()),
                                        std::to_string(fr.n_trajectories),
                                        "ok"};
      });
      fill_failed_row(out, {format_number(r), format_number(0.5 * r), format_number(eta)});
    }
  }
}

void run_gate_uc(const ExperimentConfig& c, std::size_t threads, RunResult& out) {
  out.table.columns = {"E_cc [GHz]",       "eta [rad]",          "F_C [1]",
                       "F_C_stderr [1]",   "trace_defect [1]",   "duration_factor [1]",
                       "n_trajectories [count]", "status [text]"};
  const UqdpPairSpec a = UqdpPairSpec::x_coupled(c.E_z, c.E_m_sigma);
  const UqdpPairSpec b = UqdpPairSpec::x_coupled(c.E_z, c.E_m_tau);
  // The duration is fixed once for the ideal coupling; E_cc is a parasitic term.
  const TwoEncodedQubitSystem ideal = two_encoded_qubit_system(a, b, c.lambda_c, 0.0);
  double factor = 1.0;
  if (c.calibrate && c.lambda_c > 0.0) {
    const UcCalibration cal = calibrate_UC(ideal);
    factor = cal.duration_factor;
    out.extra["calibration"] = {{"duration_factor", cal.duration_factor},
                                {"duration_s", cal.duration},
                                {"noiseless_fidelity", cal.fidelity},
                                {"noiseless_leakage", cal.leakage}};
  }
  const ComplexMatrix target = uc_target();
  const FcTerms terms = c.fc_terms == 9 ? FcTerms::Nine : FcTerms::Full16;
  for (double ecc : c.E_cc) {
    for (double eta : c.eta) {
      const std::uint64_t seed = point_seed(c.base_seed, out.points.size());
      run_point(out, seed, [&] {
        const TwoEncodedQubitSystem sys = two_encoded_qubit_system(a, b, c.lambda_c, ecc);
        Schedule s = gate_UC(sys, factor);
        set_step(s, sys.h_static, c.dt_fraction);
        const auto basis = sys.encoded_basis();
        const EnsembleConfig e = point_ensemble(c, eta, seed, threads);
        const ChannelEstimate ch = reconstruct_channel(sys.h_static, s, basis, 4, &e);
        const FidelityReport fr = fidelity_FC(ch, target, terms);
        return std::vector<std::string>{format_number(ecc / kRadPerGHz), format_number(eta),
                                        format_number(fr.value),          format_number(fr.standard_error),
                                        format_number(ch.trace_defect),   format_number(factor),
                                        std::to_string(fr.n_trajectories), "ok"};
      });
      fill_failed_row(out, {format_number(ecc / kRadPerGHz), format_number(eta)});
    }
  }
}

void run_spread_scan(const ExperimentConfig& c, std::size_t threads, RunResult& out) {
  out.table.columns = {"eta [rad]",     "a0 [1]",    "residual_z1 [1]", "expected_residual_z1 [1]",
                       "rate [1/s^2]", "rate_stderr [1/s^2]", "n_trajectories [count]", "status [text]"};
  const double E_m = c.Em_over_Ez.front() * c.E_z;
  nlohmann::json slopes = nlohmann::json::array();
  for (std::size_t i = 0; i < c.eta.size(); ++i) {
    const double eta = c.eta[i];
    // Common random numbers across a0 isolate the (1 - a0) dependence.
    const std::uint64_t seed = point_seed(c.base_seed, i);
    std::vector<double> xs, ys;
    for (double a0 : c.a0) {
      run_point(out, seed, [&] {
        const UqdpPairSpec spec = UqdpPairSpec::x_coupled(c.E_z, E_m, a0);
        const EncodedSubspace enc = encoded_subspace(spec);
        const double E_e = std::hypot((1.0 - a0) * c.E_z, E_m);
        const ResidualDephasing r = residual_dephasing_rate(spec, point_ensemble(c, eta, seed, threads));
        if (a0 != 1.0 && r.rate > 0.0) {
          xs.push_back(std::log(std::abs(1.0 - a0)));
          ys.push_back(std::log(r.rate));
        }
        return std::vector<std::string>{format_number(eta),
                                        format_number(a0),
                                        format_number(enc.residual_z1),
                                        format_number(-(1.0 - a0) * c.E_z / E_e),
                                        format_number(r.rate),
                                        format_number(r.standard_error),
                                        std::to_string(c.n_trajectories),
                                        "ok"};
      });
      fill_failed_row(out, {format_number(eta), format_number(a0)});
    }
    if (xs.size() >= 2) {
      const double n = static_cast<double>(xs.size());
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      for (std::size_t k = 0; k < xs.size(); ++k) {
        sx += xs[k];
        sy += ys[k];
        sxx += xs[k] * xs[k];
        sxy += xs[k] * ys[k];
      }
      slopes.push_back({{"eta_rad", eta}, {"loglog_slope", (n * sxy - sx * sy) / (n * sxx - sx * sx)}});
    }
  }
  out.extra["rate_vs_one_minus_a0"] = slopes;
}

void run_spectrum_check(const ExperimentConfig& c, std::size_t threads, RunResult& out) {
  out.table.columns = {"eta [rad]",         "psd_slope_x [1]", "psd_slope_z [1]",        "xz_power_ratio [1]",
                       "cot2_eta [1]",      "n_trajectories [count]", "status [text]"};
  (void)threads;
  for (double eta : c.eta) {
    const std::uint64_t seed = point_seed(c.base_seed, out.points.size());
    run_point(out, seed, [&] {
      const NoiseSpectrum spec = noise_spectrum(c, eta);
      const FrequencyGrid grid = make_frequency_grid(spec);
      const TimeGrid tg{0.0, c.psd_dt, c.psd_samples};
      const double lo = spec.omega_uv / 1000.0, hi = spec.omega_uv / 10.0;
      std::optional<SpectrumEstimate> est[2];
      for (int a = 0; a < 2; ++a) {
        const NoiseChannel ch{a == 0 ? NoiseAxis::X : NoiseAxis::Z, 0};
        if (spec.channel_weight(ch.axis) == 0.0) continue;
        std::vector<NoiseTrajectory> trajs;
        for (std::size_t k = 0; k < c.n_trajectories; ++k) {
          trajs.push_back(sample_trajectory(spec, grid, ch, trajectory_seed(seed, k)));
        }
        est[a] = empirical_spectrum(trajs, tg, spec.omega_uv);
      }
      auto slope = [&](int a) { return est[a] ? format_number(loglog_slope(*est[a], lo, hi)) : std::string(); };
      std::string ratio, expected;
      if (est[0] && est[1]) {
        double px = 0.0, pz = 0.0;
        for (std::size_t b = 0; b < est[0]->omega.size(); ++b) {
          if (est[0]->omega[b] < lo || est[0]->omega[b] > hi) continue;
          px += est[0]->psd[b];
          pz += est[1]->psd[b];
        }
        ratio = format_number(px / pz);
        const double t = std::tan(eta);
        expected = format_number(1.0 / (t * t));
      }
      return std::vector<std::string>{format_number(eta), slope(0), slope(1), ratio,
                                      expected, std::to_string(c.n_trajectories), "ok"};
    });
    fill_failed_row(out, {format_number(eta)});
  }
}

/// Seconds per RK4 step of a noisy propagation of `columns` states.
double seconds_per_step(const ComplexMatrix& h, const Schedule& s, std::size_t n_qubits, std::size_t columns,
                        const ExperimentConfig& c) {
  Schedule probe = s;
  const std::size_t steps = 400;
  probe.segments.resize(1);
  probe.segments[0].duration = std::min(probe.segments[0].duration, probe.dt * static_cast<double>(steps));
  EnsembleConfig e = point_ensemble(c, c.eta.front(), c.base_seed, 1);
  const FrequencyGrid grid = make_frequency_grid(e.spectrum);
  const NoiseCoupling noise = ensemble_member(e, grid, n_qubits, 0);
  const ComplexMatrix init = from_columns(std::vector<StateVector>(columns, StateVector::basis(h.rows(), 0)));
  const auto start = std::chrono::steady_clock::now();
  const PropagationResult r = propagate(h, probe, &noise, init);
  const double t = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return t / static_cast<double>(std::max<std::size_t>(r.steps, 1));
}

std::string line(const char* fmt, ...) __attribute__((format(printf, 1, 2)));
std::string line(const char* fmt, ...) {
  char buf[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, args);
  va_end(args);
  return buf;
}

}  // namespace

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

std::size_t Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (base_name(columns[i]) == name) return i;
  }
  throw std::invalid_argument("missing column '" + std::string(name) + "'");
}

std::string Table::to_csv() const {
  std::string out;
  auto emit = [&](const std::vector<std::string>& r) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) out += ',';
      out += csv_field(r[i]);
    }
    out += '\n';
  };
  emit(columns);
  for (const auto& r : rows) emit(r);
  return out;
}

Table Table::from_csv(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> rec;
  std::string field;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (quoted) {
      if (ch == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        field += ch;
      }
      continue;
    }
    if (ch == '"') {
      quoted = true;
      any = true;
    } else if (ch == ',') {
      rec.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (ch == '\n' || ch == '\r') {
      if (ch == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        rec.push_back(std::move(field));
        records.push_back(std::move(rec));
      }
      rec.clear();
      field.clear();
      any = false;
    } else {
      field += ch;
      any = true;
    }
  }
  if (any || !field.empty()) {
    rec.push_back(std::move(field));
    records.push_back(std::move(rec));
  }
  if (records.empty()) throw std::invalid_argument("empty CSV");
  Table t;
  t.columns = std::move(records.front());
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].size() != t.columns.size()) {
      throw std::invalid_argument("CSV row " + std::to_string(i) + " has " + std::to_string(records[i].size()) +
                                  " fields, expected " + std::to_string(t.columns.size()));
    }
    t.rows.push_back(std::move(records[i]));
  }
  return t;
}

RunResult run_experiment(const ExperimentConfig& config, std::size_t threads) {
  RunResult out;
  out.warnings = config_warnings(config);
  switch (config.kind) {
    case ExperimentKind::Dephasing: run_dephasing(config, threads, out); break;
    case ExperimentKind::GateUX: run_single_gate(config, threads, out, true); break;
    case ExperimentKind::GateUZ: run_single_gate(config, threads, out, false); break;
    case ExperimentKind::GateUC: run_gate_uc(config, threads, out); break;
    case ExperimentKind::JcDephasing: run_jc_dephasing(config, threads, out); break;
    case ExperimentKind::SpreadScan: run_spread_scan(config, threads, out); break;
    case ExperimentKind::SpectrumCheck: run_spectrum_check(config, threads, out); break;
  }
  return out;
}

std::vector<std::string> describe_config(const ExperimentConfig& c) {
  std::vector<std::string> out;
  auto energy = [&](const char* name, double w) {
    out.push_back(line("  %-12s %.6g GHz = %.6e rad/s", name, w / kRadPerGHz, w));
  };
  out.push_back(line("experiment: %s", std::string(to_string(c.kind)).c_str()));
  out.emplace_back("model:");
  energy("E_z", c.E_z);
  std::size_t grid_points = c.eta.size();
  switch (c.kind) {
    case ExperimentKind::Dephasing:
    case ExperimentKind::GateUX:
    case ExperimentKind::GateUZ:
      for (double r : c.Em_over_Ez) energy(line("E_m(%.3g)", r).c_str(), r * c.E_z);
      grid_points *= c.Em_over_Ez.size() + (c.kind == ExperimentKind::Dephasing && c.include_bare ? 1 : 0);
      if (c.kind == ExperimentKind::GateUX) energy("lambda", c.lambda);
      if (c.kind == ExperimentKind::GateUZ) energy("delta_E_m", c.delta_Em_over_Ez * c.E_z);
      if (c.kind != ExperimentKind::Dephasing) out.push_back(line("  %-12s %.6g rad", "theta", c.theta));
      break;
    case ExperimentKind::GateUC:
      energy("E_m_sigma", c.E_m_sigma);
      energy("E_m_tau", c.E_m_tau);
      energy("lambda_c", c.lambda_c);
      for (double e : c.E_cc) energy("E_cc", e);
      grid_points *= c.E_cc.size();
      break;
    case ExperimentKind::JcDephasing:
      energy("omega0", 2.0 * c.E_z);
      energy("J", c.J);
      out.push_back(line("  n_max %zu, doublet %zu", c.n_max, c.doublet));
      break;
    case ExperimentKind::SpreadScan:
      energy("E_m", c.Em_over_Ez.front() * c.E_z);
      grid_points *= c.a0.size();
      break;
    case ExperimentKind::SpectrumCheck: break;
  }
  out.emplace_back("noise:");
  energy("A", c.A_over_Ez * c.E_z);
  energy("omega_ir", c.omega_ir);
  energy("omega_uv", c.omega_uv);
  energy("delta_omega", c.delta_omega);
  const FrequencyGrid grid = make_frequency_grid(noise_spectrum(c, c.eta.front()));
  out.push_back(line("  %zu frequency components, %zu eta values in [%.4g, %.4g] rad", grid.size(), c.eta.size(),
                     c.eta.front(), c.eta.back()));
  out.push_back(line("ensemble: %zu trajectories per point, base seed %llu, %zu grid points", c.n_trajectories,
                     static_cast<unsigned long long>(c.base_seed), grid_points));

  // Step budget of the propagating kinds.
  auto gate_budget = [&](const ComplexMatrix& h, Schedule s, std::size_t n_qubits, std::size_t columns) {
    set_step(s, h, c.dt_fraction);
    const double w_max = max_energy_scale(h, s);
    const double f_max = w_max / (2.0 * kPi);
    const double bound = 1.0 / (40.0 * f_max);
    out.push_back(line("numerics: f_max = %.6g GHz, dt = %.4e s %s 1/(40 f_max) = %.4e s", f_max / 1e9, s.dt,
                       s.dt <= bound ? "<=" : ">", bound));
    const double steps = std::ceil(s.duration() / s.dt);
    out.push_back(line("  gate time %.4e s, %.0f steps per trajectory, %.3g steps in total", s.duration(), steps,
                       steps * static_cast<double>(c.n_trajectories * grid_points)));
    const double per_step = seconds_per_step(h, s, n_qubits, columns, c);
    out.push_back(line("  estimated runtime %.0f s on one core", per_step * steps * static_cast<double>(c.n_trajectories) *
                                                                      static_cast<double>(grid_points)));
    for (const auto& w : s.warnings) out.push_back("warning: " + w);
  };
  try {
    if (c.kind == ExperimentKind::GateUX || c.kind == ExperimentKind::GateUZ) {
      const auto it = std::find_if(c.Em_over_Ez.begin(), c.Em_over_Ez.end(), [](double r) { return r > 0.0; });
      if (it != c.Em_over_Ez.end()) {
        const UqdpPairSpec spec = UqdpPairSpec::x_coupled(c.E_z, *it * c.E_z);
        const Schedule s = c.kind == ExperimentKind::GateUX ? gate_UX(spec, c.theta, c.lambda)
                                                            : gate_UZ(spec, c.theta, c.delta_Em_over_Ez * c.E_z);
        gate_budget(build_pair_hamiltonian(spec), s, 2, 2);
      }
    } else if (c.kind == ExperimentKind::GateUC) {
      const TwoEncodedQubitSystem sys = two_encoded_qubit_system(UqdpPairSpec::x_coupled(c.E_z, c.E_m_sigma),
                                                                 UqdpPairSpec::x_coupled(c.E_z, c.E_m_tau), c.lambda_c,
                                                                 c.E_cc.front());
      gate_budget(sys.h_static, gate_UC(sys, c.calibrate ? 2.0 : 1.0), 4, 4);
      if (c.calibrate) out.emplace_back("  (duration calibrated at run time; estimate assumes twice the nominal)");
    } else if (c.kind == ExperimentKind::Dephasing || c.kind == ExperimentKind::JcDephasing) {
      const DephasingTarget t = c.kind == ExperimentKind::JcDephasing
                                    ? DephasingTarget::polariton(jc_spec(c), c.doublet)
                                    : (c.Em_over_Ez.front() > 0.0 ? DephasingTarget::encoded(UqdpPairSpec::x_coupled(
                                                                        c.E_z, c.Em_over_Ez.front() * c.E_z))
                                                                  : DephasingTarget::bare(c.E_z));
      const double rate = quasi_static_rate(t, noise_spectrum(c, c.eta[c.eta.size() / 2]));
      out.push_back(line("numerics: %s method, quasi-static T_phi estimate %.3e s, horizon cap %.3e s",
                         c.method.c_str(), rate > 0 ? std::sqrt(2.0) / rate : 0.0, c.max_horizon));
    }
  } catch (const std::exception& e) {
    out.push_back(std::string("warning: ") + e.what());
  }
  for (const auto& w : config_warnings(c)) out.push_back("warning: " + w);
  return out;
}

void write_record(const std::filesystem::path& dir, const ExperimentConfig& config, const RunResult& result,
                  const nlohmann::json& run_info) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream csv(dir / "results.csv", std::ios::binary);
    csv << result.table.to_csv();
    if (!csv) throw std::runtime_error("cannot write " + (dir / "results.csv").string());
  }
  nlohmann::json points = nlohmann::json::array();
  for (const auto& p : result.points) {
    points.push_back({{"index", p.index}, {"seed", p.seed}, {"runtime_s", p.runtime_s}, {"status", p.status}});
  }
  nlohmann::json meta = run_info;
  meta["kind"] = std::string(to_string(config.kind));
  meta["config"] = config.echo();
  meta["seed"] = config.base_seed;
  meta["results"] = "results.csv";
  meta["columns"] = result.table.columns;
  meta["points"] = points;
  meta["warnings"] = result.warnings;
  meta["failed_points"] = result.failed_points;
  meta["numerical_failures"] = result.numerical_failures;
  meta["extra"] = result.extra;
  std::ofstream json(dir / "metadata.json", std::ios::binary);
  json << meta.dump(2) << '\n';
  if (!json) throw std::runtime_error("cannot write " + (dir / "metadata.json").string());
}

std::optional<FigureKind> figure_from_string(std::string_view name) {
  if (name == "fig1") return FigureKind::Fig1;
  if (name == "fig3a") return FigureKind::Fig3a;
  if (name == "fig3b") return FigureKind::Fig3b;
  if (name == "fig3c") return FigureKind::Fig3c;
  if (name == "fig3d") return FigureKind::Fig3d;
  return std::nullopt;
}

Table load_results(const std::filesystem::path& record) {
  std::filesystem::path csv = record;
  if (std::filesystem::is_directory(record)) {
    csv = record / "results.csv";
  } else if (record.extension() == ".json") {
    std::ifstream in(record);
    if (!in) throw std::invalid_argument("cannot read " + record.string());
    const nlohmann::json meta = nlohmann::json::parse(in);
    csv = record.parent_path() / meta.value("results", std::string("results.csv"));
  }
  std::ifstream in(csv, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot read " + csv.string());
  std::ostringstream text;
  text << in.rdbuf();
  return Table::from_csv(text.str());
}

Table export_figure(const Table& r, FigureKind figure) {
  struct Spec {
    std::string x, x_unit, value, value_unit, stderr_name;
    std::function<std::string(const std::vector<std::string>&)> series;
  };
  Spec spec;
  switch (figure) {
    case FigureKind::Fig1: {
      const std::size_t s = r.column("series");
      spec = {"eta", "rad", "T_phi", "s", "T_phi_stderr", [s](const auto& row) { return row[s]; }};
      break;
    }
    case FigureKind::Fig3a:
    case FigureKind::Fig3c: {
      const std::size_t m = r.column("E_m/2E_z");
      const char* prefix = figure == FigureKind::Fig3a ? "Em/2Ez=" : "x=";
      spec = {"eta", "rad", "F_X", "1", "F_X_stderr",
              [m, prefix](const auto& row) { return prefix + row[m]; }};
      break;
    }
    case FigureKind::Fig3b: {
      const std::size_t e = r.column("eta");
      spec = {"E_m/2E_z", "1", "F_X", "1", "F_X_stderr", [e](const auto& row) { return "eta=" + row[e]; }};
      break;
    }
    case FigureKind::Fig3d: {
      const std::size_t e = r.column("E_cc");
      spec = {"eta", "rad", "F_C", "1", "F_C_stderr",
              [e](const auto& row) { return "Ecc=" + format_number(std::stod(row[e]) * 1e3) + " MHz"; }};
      break;
    }
  }
  const std::size_t xi = r.column(spec.x);
  const std::size_t vi = r.column(spec.value);
  const std::size_t si = r.column(spec.stderr_name);
  Table t;
  t.columns = {"x [" + spec.x_unit + "]", "series [text]", "value [" + spec.value_unit + "]",
               "stderr [" + spec.value_unit + "]"};
  for (const auto& row : r.rows) t.rows.push_back({row[xi], spec.series(row), row[vi], row[si]});
  return t;
}

}  // namespace uqdp
