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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numeric>
#include <vector>

#include "test_support.hpp"
#include "uqdp/analysis.hpp"
#include "uqdp/noise.hpp"

using namespace uqdp;
using namespace uqdp::testing;

namespace {

const double kEz = 5.0 * kGHz;
const NoiseChannel kX1{NoiseAxis::X, 0};
const NoiseChannel kZ1{NoiseAxis::Z, 0};

// Ensemble seeding as used by the analysis layer.
std::vector<double> values_at_zero(const NoiseSpectrum& s, NoiseChannel ch, std::size_t n, std::uint64_t base) {
  const FrequencyGrid grid = make_frequency_grid(s);
  std::vector<double> v(n);
  for (std::size_t k = 0; k < n; ++k) v[k] = sample_trajectory(s, grid, ch, trajectory_seed(base, k)).value(0.0);
  return v;
}

double mean_square(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s / static_cast<double>(v.size());
}

/// sum_k S(omega_k) dw_k, the variance the grid actually carries.
double riemann_power(const NoiseSpectrum& s, NoiseAxis axis) {
  const FrequencyGrid g = make_frequency_grid(s);
  double p = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) p += s.density(axis, g.omega[k]) * g.width[k];
  return p;
}

}  // namespace

TEST_CASE("frequency grid at the default parameters") {
  const NoiseSpectrum s = default_spectrum(kEz, kPi / 4);
  const FrequencyGrid g = make_frequency_grid(s);
  CHECK(g.size() == 1039);  // 993 uniform cells above 700 Hz, 46 log cells below
  CHECK(g.size() <= kMaxNoiseComponents);
  CHECK(g.omega.front() > s.omega_ir);
  CHECK(g.omega.back() < s.omega_uv);
  for (std::size_t k = 1; k < g.size(); ++k) CHECK(g.omega[k] > g.omega[k - 1]);
  const double covered = std::accumulate(g.width.begin(), g.width.end(), 0.0);
  CHECK(covered == doctest::Approx(s.omega_uv - s.omega_ir).epsilon(1e-12));
}

TEST_CASE("frequency grid rejects empty and oversized grids") {
  NoiseSpectrum s = default_spectrum(kEz, 0.0);
  s.delta_omega = 2.0 * (s.omega_uv - s.omega_ir);
  CHECK_THROWS_WITH_AS(make_frequency_grid(s), "empty noise grid", std::invalid_argument);
  s.delta_omega = kTwoPi * 1.0;
  CHECK_THROWS_AS(make_frequency_grid(s), std::invalid_argument);
}

TEST_CASE("spectrum validation names the field") {
  NoiseSpectrum s = default_spectrum(kEz, 0.0);
  s.power_angle = 2.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = default_spectrum(kEz, 0.0);
  s.omega_ir = s.omega_uv * 2.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = default_spectrum(kEz, 0.0);
  s.amplitude = -1.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("Riemann sum of the grid converges to the analytic integral") {
  NoiseSpectrum s = default_spectrum(kEz, 0.0);
  const double exact = s.integrated_power(NoiseAxis::X);
  CHECK(exact == doctest::Approx(s.amplitude * s.amplitude * std::log(1e5)).epsilon(1e-14));
  CHECK(std::abs(riemann_power(s, NoiseAxis::X) / exact - 1.0) < 1e-3);
  // refine both densities together; the midpoint error falls roughly 4x per step
  double previous = 1.0;
  for (std::size_t level = 0; level < 4; ++level) {
    s.delta_omega = kTwoPi * 400.0 / static_cast<double>(std::size_t{1} << level);
    s.log_cells_per_decade = std::size_t{8} << level;
    const double err = std::abs(riemann_power(s, NoiseAxis::X) / exact - 1.0);
    CHECK(err < 0.35 * previous);
    previous = err;
  }
  CHECK(previous < 1e-4);
}

TEST_CASE("zero power gives silent trajectories") {
  NoiseSpectrum s = default_spectrum(kEz, kPi / 4);
  s.amplitude = 0.0;
  const NoiseTrajectory t = sample_trajectory(s, kX1, 3);
  for (double time : {0.0, 1e-9, 0.37, 12.0}) CHECK(t.value(time) == 0.0);

  const NoiseTrajectory z = sample_trajectory(default_spectrum(kEz, 0.0), kZ1, 3);
  for (double time : {0.0, 1e-6, 0.5}) CHECK(z.value(time) == 0.0);
}

TEST_CASE("ensemble variance of V(0) matches the integrated spectrum") {
  const NoiseSpectrum s = default_spectrum(kEz, kPi / 4);
  const auto v = values_at_zero(s, kX1, 500, 1);
  const double expected = s.amplitude * s.amplitude * 0.5 * std::log(s.omega_uv / s.omega_ir);
  CHECK(mean_square(v) == doctest::Approx(expected).epsilon(0.10));
}

TEST_CASE("sample_uniform agrees with direct evaluation") {
  const NoiseTrajectory t = sample_trajectory(default_spectrum(kEz, kPi / 3), kX1, 11);
  const double t0 = 0.123, dt = 3.7e-6;
  const auto v = t.sample_uniform(t0, dt, 300);
  double scale = 0.0, worst = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j) {
    const double direct = t.value(t0 + dt * static_cast<double>(j));
    scale = std::max(scale, std::abs(direct));
    worst = std::max(worst, std::abs(v[j] - direct));
  }
  CHECK(worst < 1e-9 * scale);
}

TEST_CASE("power partition follows cot^2(eta)") {
  for (double eta : {kPi / 6, kPi / 4, kPi / 3}) {
    const NoiseSpectrum s = default_spectrum(kEz, eta);
    const FrequencyGrid g = make_frequency_grid(s);
    // stationary process: pool 500 trajectories x 16 well separated times
    double px = 0.0, pz = 0.0;
    for (std::uint64_t k = 0; k < 500; ++k) {
      const NoiseTrajectory x = sample_trajectory(s, g, kX1, k);
      const NoiseTrajectory z = sample_trajectory(s, g, kZ1, k);
      for (int j = 0; j < 16; ++j) {
        const double t = 1.7 * j;
        px += x.value(t) * x.value(t);
        pz += z.value(t) * z.value(t);
      }
    }
    const double cot = 1.0 / std::tan(eta);
    CHECK(px / pz == doctest::Approx(cot * cot).epsilon(0.15));
  }
}

TEST_CASE("V(0) is Gaussian") {
  const auto v = values_at_zero(default_spectrum(kEz, 0.0), kX1, 1000, 77);
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double m2 = 0.0, m4 = 0.0;
  for (double x : v) {
    m2 += (x - mean) * (x - mean);
    m4 += std::pow(x - mean, 4);
  }
  m2 /= n;
  m4 /= n;
  CHECK(std::abs(m4 / (m2 * m2) - 3.0) < 0.5);
}

TEST_CASE("reproducibility and channel independence") {
  const NoiseSpectrum s = default_spectrum(kEz, kPi / 4);
  const NoiseTrajectory a = sample_trajectory(s, kX1, 42);
  const NoiseTrajectory b = sample_trajectory(s, kX1, 42);
  for (std::size_t k = 0; k < a.components(); ++k) {
    CHECK(a.coefficient()[k] == b.coefficient()[k]);
    CHECK(a.phase()[k] == b.phase()[k]);
  }
  CHECK(a.value(0.25) == b.value(0.25));

  const auto vx = values_at_zero(s, kX1, 1000, 5000);
  const auto vz = values_at_zero(s, kZ1, 1000, 5000);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < vx.size(); ++k) {
    sxy += vx[k] * vz[k];
    sxx += vx[k] * vx[k];
    syy += vz[k] * vz[k];
  }
  CHECK(std::abs(sxy / std::sqrt(sxx * syy)) < 0.1);

  const NoiseTrajectory other = sample_trajectory(s, NoiseChannel{NoiseAxis::X, 1}, 42);
  CHECK(other.value(0.0) != a.value(0.0));
}

TEST_CASE("counter generator is order independent") {
  const double u1 = counter_uniform(9, 2, 100, 0);
  (void)counter_uniform(9, 2, 5, 0);
  CHECK(counter_uniform(9, 2, 100, 0) == u1);
  CHECK(u1 >= 0.0);
  CHECK(u1 < 1.0);
}

TEST_CASE("empirical spectrum: slopes and suppression") {
  const TimeGrid grid{0.0, 2.5e-6, std::size_t{1} << 16};
  auto ensemble = [&](const NoiseSpectrum& s, NoiseChannel ch) {
    const FrequencyGrid g = make_frequency_grid(s);
    std::vector<NoiseTrajectory> out;
    for (std::uint64_t k = 0; k < 100; ++k) out.push_back(sample_trajectory(s, g, ch, 900 + k));
    return out;
  };

  const NoiseSpectrum pink = default_spectrum(kEz, 0.0);
  const auto trajs = ensemble(pink, kX1);
  const SpectrumEstimate est = empirical_spectrum(trajs, grid, pink.omega_uv);
  CHECK(loglog_slope(est, 10.0 * pink.omega_ir, pink.omega_uv / 10.0) == doctest::Approx(-1.0).epsilon(0.15));

  NoiseSpectrum white = pink;
  white.shape = SpectralShape::White;
  const SpectrumEstimate west = empirical_spectrum(ensemble(white, kX1), grid, white.omega_uv);
  CHECK(std::abs(loglog_slope(west, 10.0 * white.omega_ir, white.omega_uv / 10.0)) < 0.1);

  const NoiseSpectrum transverse_off = default_spectrum(kEz, kPi / 2);
  const SpectrumEstimate off = empirical_spectrum(ensemble(transverse_off, kX1), grid, pink.omega_uv);
  REQUIRE(off.psd.size() == est.psd.size());
  for (std::size_t i = 0; i < est.psd.size(); ++i) CHECK(off.psd[i] < 0.01 * est.psd[i]);

  CHECK_THROWS_AS(empirical_spectrum(std::span(trajs).subspan(0, 99), grid, pink.omega_uv), std::invalid_argument);
  CHECK_THROWS_AS(empirical_spectrum(trajs, TimeGrid{0.0, 1e-4, 4096}, pink.omega_uv), std::invalid_argument);
}
