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

#include "uqdp/config.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "toml.hpp"

namespace uqdp {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kRadPerGHz = 2.0 * kPi * 1e9;

const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"model",
       {"E_z", "Em_over_Ez", "bare", "lambda", "theta", "delta_Em_over_Ez", "E_m_sigma", "E_m_tau", "lambda_c", "E_cc",
        "calibrate", "a0", "J", "n_max", "doublet"}},
      {"noise", {"A_over_Ez", "eta", "eta_points", "omega_ir", "omega_uv", "delta_omega", "log_cells_per_decade"}},
      {"ensemble", {"n", "n_trajectories", "base_seed"}},
      {"numerics", {"dt_fraction", "method", "horizon", "max_horizon", "fc_terms", "psd_samples", "psd_dt"}},
      {"output", {"dir"}},
  };
  return keys;
}

std::optional<ExperimentKind> kind_from_string(std::string_view s) {
  for (ExperimentKind k : {ExperimentKind::Dephasing, ExperimentKind::GateUX, ExperimentKind::GateUZ,
                           ExperimentKind::GateUC, ExperimentKind::JcDephasing, ExperimentKind::SpreadScan,
                           ExperimentKind::SpectrumCheck}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

/// Typed access to one section of the document.
class Section {
 public:
  Section(const toml::table* table, std::string name) : table_(table), name_(std::move(name)) {}

  bool has(const std::string& key) const { return table_ != nullptr && table_->contains(key); }
  std::string field(const std::string& key) const { return name_ + "." + key; }

  double number(const std::string& key, double fallback) const {
    const toml::node* n = node(key);
    if (n == nullptr) return fallback;
    return as_number(*n, field(key));
  }

  std::vector<double> list(const std::string& key, std::vector<double> fallback) const {
    const toml::node* n = node(key);
    if (n == nullptr) return fallback;
    std::vector<double> out;
    if (const toml::array* arr = n->as_array()) {
      for (const auto& item : *arr) out.push_back(as_number(item, field(key)));
    } else {
      out.push_back(as_number(*n, field(key)));
    }
    if (out.empty()) throw ConfigError(field(key), "grid is empty");
    return out;
  }

  std::int64_t integer(const std::string& key, std::int64_t fallback) const {
    const toml::node* n = node(key);
    if (n == nullptr) return fallback;
    if (const auto v = n->value_exact<std::int64_t>()) return *v;
    throw ConfigError(field(key), "expected an integer");
  }

  bool boolean(const std::string& key, bool fallback) const {
    const toml::node* n = node(key);
    if (n == nullptr) return fallback;
    if (const auto v = n->value_exact<bool>()) return *v;
    throw ConfigError(field(key), "expected true or false");
  }

  std::string string(const std::string& key, std::string fallback) const {
    const toml::node* n = node(key);
    if (n == nullptr) return fallback;
    if (const auto v = n->value_exact<std::string>()) return *v;
    throw ConfigError(field(key), "expected a string");
  }

 private:
  const toml::node* node(const std::string& key) const { return table_ != nullptr ? table_->get(key) : nullptr; }

  static double as_number(const toml::node& n, const std::string& field) {
    if (const auto v = n.value_exact<double>()) {
      if (!std::isfinite(*v)) throw ConfigError(field, "must be finite");
      return *v;
    }
    if (const auto v = n.value_exact<std::int64_t>()) return static_cast<double>(*v);
    throw ConfigError(field, "expected a number");
  }

  const toml::table* table_;
  std::string name_;
};

void apply_override(toml::table& root, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("--set", "expected path=value, got '" + assignment + "'");
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);

  std::vector<std::string> parts;
  std::stringstream ss(path);
  for (std::string part; std::getline(ss, part, '.');) {
    if (part.empty()) throw ConfigError(path, "empty path segment");
    parts.push_back(part);
  }
  toml::table* tbl = &root;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    toml::node* child = tbl->get(parts[i]);
    if (child == nullptr) {
      tbl->insert(parts[i], toml::table{});
      child = tbl->get(parts[i]);
    }
    tbl = child->as_table();
    if (tbl == nullptr) throw ConfigError(path, "'" + parts[i] + "' is not a section");
  }

  toml::table parsed;
  try {
    parsed = toml::parse("value = " + text);
  } catch (const toml::parse_error&) {
    parsed.insert("value", text);  // bare word
  }
  parsed.get("value")->visit([&](auto&& v) { tbl->insert_or_assign(parts.back(), v); });
}

ExperimentConfig resolve(const toml::table& root) {
  for (const auto& [key, node] : root) {
    const std::string k(key.str());
    if (k == "kind") continue;
    if (!allowed_keys().contains(k)) throw ConfigError(k, "unknown section or key");
    if (!node.is_table()) throw ConfigError(k, "expected a section");
    const auto& allowed = allowed_keys().at(k);
    for (const auto& [sub, unused] : *node.as_table()) {
      if (!allowed.contains(std::string(sub.str()))) throw ConfigError(k + "." + std::string(sub.str()), "unknown key");
    }
  }

  ExperimentConfig c;
  const toml::node* kind = root.get("kind");
  if (kind == nullptr) throw ConfigError("kind", "missing experiment kind");
  const auto kind_name = kind->value_exact<std::string>();
  if (!kind_name) throw ConfigError("kind", "expected a string");
  const auto parsed_kind = kind_from_string(*kind_name);
  if (!parsed_kind) {
    throw ConfigError("kind", "unknown experiment '" + *kind_name +
                                  "' (dephasing, gate-ux, gate-uz, gate-uc, jc-dephasing, spread-scan, spectrum-check)");
  }
  c.kind = *parsed_kind;

  const Section model(root["model"].as_table(), "model");
  const Section noise(root["noise"].as_table(), "noise");
  const Section ens(root["ensemble"].as_table(), "ensemble");
  const Section num(root["numerics"].as_table(), "numerics");
  const Section out(root["output"].as_table(), "output");

  auto positive = [](const Section& s, const std::string& key, double v) {
    if (!(v > 0.0)) throw ConfigError(s.field(key), "must be positive");
    return v;
  };
  auto non_negative = [](const Section& s, const std::string& key, double v) {
    if (v < 0.0) throw ConfigError(s.field(key), "must not be negative");
    return v;
  };

  c.E_z = positive(model, "E_z", model.number("E_z", 5.0)) * kRadPerGHz;
  c.Em_over_Ez = model.list("Em_over_Ez", c.Em_over_Ez);
  for (double r : c.Em_over_Ez) non_negative(model, "Em_over_Ez", r);
  c.include_bare = model.boolean("bare", true);
  c.lambda = positive(model, "lambda", model.number("lambda", 0.3)) * kRadPerGHz;
  const double default_theta = c.kind == ExperimentKind::GateUZ ? kPi / 2 : kPi;
  c.theta = model.number("theta", default_theta);
  c.delta_Em_over_Ez = positive(model, "delta_Em_over_Ez", model.number("delta_Em_over_Ez", 0.02));
  c.E_m_sigma = positive(model, "E_m_sigma", model.number("E_m_sigma", 5.0)) * kRadPerGHz;
  c.E_m_tau = positive(model, "E_m_tau", model.number("E_m_tau", 2.0)) * kRadPerGHz;
  c.lambda_c = non_negative(model, "lambda_c", model.number("lambda_c", 0.3)) * kRadPerGHz;
  c.E_cc = model.list("E_cc", {0.0});
  for (double& e : c.E_cc) e *= kRadPerGHz;
  c.calibrate = model.boolean("calibrate", true);
  c.a0 = model.list("a0", c.a0);
  for (double a : c.a0) {
    if (!(a > 0.0 && a < 2.0)) throw ConfigError("model.a0", "entries must lie in (0, 2)");
  }
  c.J = non_negative(model, "J", model.number("J", 0.1)) * kRadPerGHz;
  const std::int64_t n_max = model.integer("n_max", 6);
  if (n_max < 4) throw ConfigError("model.n_max", "must be at least 4");
  c.n_max = static_cast<std::size_t>(n_max);
  const std::int64_t doublet = model.integer("doublet", 1);
  if (doublet < 1 || doublet >= n_max) throw ConfigError("model.doublet", "must lie in [1, n_max - 1]");
  c.doublet = static_cast<std::size_t>(doublet);

  c.A_over_Ez = non_negative(noise, "A_over_Ez", noise.number("A_over_Ez", 2e-4));
  if (noise.has("eta") && noise.has("eta_points")) throw ConfigError("noise.eta", "give either eta or eta_points");
  if (noise.has("eta")) {
    c.eta = noise.list("eta", {});
  } else {
    const std::int64_t points = noise.integer("eta_points", 9);
    if (points < 1) throw ConfigError("noise.eta_points", "must be at least 1");
    for (std::int64_t i = 0; i < points; ++i) {
      c.eta.push_back(points == 1 ? 0.0 : 0.5 * kPi * static_cast<double>(i) / static_cast<double>(points - 1));
    }
  }
  for (double e : c.eta) {
    if (e < 0.0 || e > 0.5 * kPi + 1e-12) throw ConfigError("noise.eta", "angles must lie in [0, pi/2]");
  }
  c.omega_ir = positive(noise, "omega_ir", noise.number("omega_ir", 1e-9)) * kRadPerGHz;
  c.omega_uv = positive(noise, "omega_uv", noise.number("omega_uv", 1e-4)) * kRadPerGHz;
  c.delta_omega = positive(noise, "delta_omega", noise.number("delta_omega", 1e-7)) * kRadPerGHz;
  const std::int64_t cells = noise.integer("log_cells_per_decade", 16);
  if (cells < 1) throw ConfigError("noise.log_cells_per_decade", "must be at least 1");
  c.log_cells_per_decade = static_cast<std::size_t>(cells);

  if (ens.has("n") && ens.has("n_trajectories")) throw ConfigError("ensemble.n", "give either n or n_trajectories");
  const std::int64_t n = ens.has("n") ? ens.integer("n", 200) : ens.integer("n_trajectories", 200);
  if (n < 1) throw ConfigError("ensemble.n", "must be at least 1");
  c.n_trajectories = static_cast<std::size_t>(n);
  const std::int64_t seed = ens.integer("base_seed", 1);
  if (seed < 0) throw ConfigError("ensemble.base_seed", "must not be negative");
  c.base_seed = static_cast<std::uint64_t>(seed);

  c.dt_fraction = num.number("dt_fraction", c.dt_fraction);
  if (!(c.dt_fraction > 0.0 && c.dt_fraction <= 1.0 / 40.0)) {
    throw ConfigError("numerics.dt_fraction", "must lie in (0, 1/40] of the fastest period");
  }
  c.method = num.string("method", c.method);
  if (c.method != "effective" && c.method != "full") throw ConfigError("numerics.method", "expected effective or full");
  c.horizon = non_negative(num, "horizon", num.number("horizon", 0.0));
  c.max_horizon = positive(num, "max_horizon", num.number("max_horizon", c.max_horizon));
  const std::int64_t terms = num.integer("fc_terms", 16);
  if (terms != 16 && terms != 9) throw ConfigError("numerics.fc_terms", "expected 16 or 9");
  c.fc_terms = static_cast<std::size_t>(terms);
  const std::int64_t psd_samples = num.integer("psd_samples", 32768);
  if (psd_samples < 1024) throw ConfigError("numerics.psd_samples", "must be at least 1024");
  c.psd_samples = static_cast<std::size_t>(psd_samples);
  c.psd_dt = positive(num, "psd_dt", num.number("psd_dt", c.psd_dt));

  c.out_dir = out.string("dir", c.out_dir);
  if (c.out_dir.empty()) throw ConfigError("output.dir", "must not be empty");

  // The noise grid must be constructible.
  for (double eta : c.eta) {
    try {
      make_frequency_grid(noise_spectrum(c, eta));
    } catch (const std::invalid_argument& e) {
      const std::string what = e.what();
      throw ConfigError(what.find("empty noise grid") != std::string::npos ? "noise.delta_omega" : "noise", what);
    }
  }
  return c;
}

}  // namespace

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Dephasing: return "dephasing";
    case ExperimentKind::GateUX: return "gate-ux";
    case ExperimentKind::GateUZ: return "gate-uz";
    case ExperimentKind::GateUC: return "gate-uc";
    case ExperimentKind::JcDephasing: return "jc-dephasing";
    case ExperimentKind::SpreadScan: return "spread-scan";
    case ExperimentKind::SpectrumCheck: return "spectrum-check";
  }
  return "unknown";
}

NoiseSpectrum noise_spectrum(const ExperimentConfig& config, double eta) {
  NoiseSpectrum s;
  s.amplitude = config.A_over_Ez * config.E_z;
  s.power_angle = eta;
  s.omega_ir = config.omega_ir;
  s.omega_uv = config.omega_uv;
  s.delta_omega = config.delta_omega;
  s.log_cells_per_decade = config.log_cells_per_decade;
  return s;
}

ExperimentConfig parse_config(std::string_view toml_text, const std::vector<std::string>& overrides,
                              const std::string& source) {
  toml::table root;
  try {
    root = toml::parse(toml_text, source);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << "line " << e.source().begin.line << ": " << e.description();
    throw ConfigError("", "parse error in " + source + ", " + msg.str());
  }
  for (const auto& o : overrides) apply_override(root, o);
  return resolve(root);
}

ExperimentConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", "cannot read " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), overrides, path.string());
}

bool apply_seed_environment(ExperimentConfig& config) {
  const char* env = std::getenv("UQDP_SEED");
  if (env == nullptr || *env == '\0') return false;
  const std::string s(env);
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &used, 10);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.front() == '-') throw ConfigError("UQDP_SEED", "expected a non-negative integer");
  config.base_seed = v;
  return true;
}

std::vector<std::string> config_warnings(const ExperimentConfig& c) {
  std::vector<std::string> out;
  char buf[256];
  if (c.n_trajectories < 100) {
    std::snprintf(buf, sizeof buf, "ensemble.n = %zu is below 100; standard errors will be coarse", c.n_trajectories);
    out.emplace_back(buf);
  }
  if (c.kind == ExperimentKind::GateUX || c.kind == ExperimentKind::GateUZ) {
    for (double r : c.Em_over_Ez) {
      const double E_m = r * c.E_z;
      const double strength = c.kind == ExperimentKind::GateUX ? c.lambda : c.delta_Em_over_Ez * c.E_z;
      if (E_m == 0.0) {
        std::snprintf(buf, sizeof buf, "Em/Ez = 0: no protected subspace, these points will fail");
        out.emplace_back(buf);
      } else if (strength > 0.3 * E_m) {
        std::snprintf(buf, sizeof buf, "RWA: %s/E_m = %.3g exceeds 0.3 at Em/Ez = %g",
                      c.kind == ExperimentKind::GateUX ? "lambda" : "delta_E_m", strength / E_m, r);
        out.emplace_back(buf);
      }
    }
  }
  if (c.kind == ExperimentKind::GateUC) {
    const double detuning = 2.0 * std::abs(c.E_m_sigma - c.E_m_tau);
    if (detuning > 0.0 && c.lambda_c > 0.3 * detuning) {
      std::snprintf(buf, sizeof buf, "RWA: lambda_c / (2|E_m_sigma - E_m_tau|) = %.3g exceeds 0.3",
                    c.lambda_c / detuning);
      out.emplace_back(buf);
    }
  }
  if ((c.kind == ExperimentKind::Dephasing || c.kind == ExperimentKind::JcDephasing) && c.A_over_Ez == 0.0) {
    out.emplace_back("A_over_Ez = 0: every dephasing time is a lower bound");
  }
  return out;
}

nlohmann::json ExperimentConfig::echo() const {
  using nlohmann::json;
  auto energy = [](double w) { return json{{"GHz", w / kRadPerGHz}, {"rad_per_s", w}}; };
  json cc = json::array();
  for (double e : E_cc) cc.push_back(energy(e));
  return json{
      {"kind", std::string(to_string(kind))},
      {"model",
       {{"E_z", energy(E_z)},
        {"Em_over_Ez", Em_over_Ez},
        {"bare", include_bare},
        {"lambda", energy(lambda)},
        {"theta_rad", theta},
        {"delta_Em_over_Ez", delta_Em_over_Ez},
        {"E_m_sigma", energy(E_m_sigma)},
        {"E_m_tau", energy(E_m_tau)},
        {"lambda_c", energy(lambda_c)},
        {"E_cc", cc},
        {"calibrate", calibrate},
        {"a0", a0},
        {"J", energy(J)},
        {"n_max", n_max},
        {"doublet", doublet}}},
      {"noise",
       {{"A_over_Ez", A_over_Ez},
        {"A", energy(A_over_Ez * E_z)},
        {"eta_rad", eta},
        {"omega_ir", energy(omega_ir)},
        {"omega_uv", energy(omega_uv)},
        {"delta_omega", energy(delta_omega)},
        {"log_cells_per_decade", log_cells_per_decade}}},
      {"ensemble", {{"n", n_trajectories}, {"base_seed", base_seed}}},
      {"numerics",
       {{"dt_fraction", dt_fraction},
        {"method", method},
        {"horizon_s", horizon},
        {"max_horizon_s", max_horizon},
        {"fc_terms", fc_terms},
        {"psd_samples", psd_samples},
        {"psd_dt_s", psd_dt}}},
      {"output", {{"dir", out_dir}}},
  };
}

}  // namespace uqdp
