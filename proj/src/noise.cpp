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

#include "uqdp/noise.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace uqdp {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::string NoiseChannel::name() const {
  const char* a = axis == NoiseAxis::X ? "x" : axis == NoiseAxis::Y ? "y" : "z";
  return std::string(a) + std::to_string(qubit + 1);
}

void NoiseSpectrum::validate() const {
  if (!(amplitude >= 0.0)) throw std::invalid_argument("noise.amplitude must be >= 0");
  if (!(power_angle >= 0.0 && power_angle <= std::numbers::pi / 2 + 1e-12)) {
    throw std::invalid_argument("noise.eta must lie in [0, pi/2]");
  }
  if (!(omega_ir > 0.0)) throw std::invalid_argument("noise.omega_ir must be > 0");
  if (!(omega_uv > omega_ir)) throw std::invalid_argument("noise.omega_uv must exceed omega_ir");
  if (!(delta_omega > 0.0)) throw std::invalid_argument("noise.delta_omega must be > 0");
  if (delta_omega > omega_uv - omega_ir) throw std::invalid_argument("empty noise grid");
  if (log_cells_per_decade == 0) throw std::invalid_argument("noise.log_cells_per_decade must be > 0");
}

double NoiseSpectrum::channel_weight(NoiseAxis axis) const {
  const double c = std::cos(power_angle);
  const double s = std::sin(power_angle);
  return axis == NoiseAxis::Z ? s * s : c * c;
}

double NoiseSpectrum::density(NoiseAxis axis, double omega) const {
  const double p = amplitude * amplitude * channel_weight(axis);
  return shape == SpectralShape::OneOverF ? p / omega : p / omega_uv;
}

double NoiseSpectrum::integrated_power(NoiseAxis axis) const {
  const double p = amplitude * amplitude * channel_weight(axis);
  return shape == SpectralShape::OneOverF ? p * std::log(omega_uv / omega_ir)
                                          : p * (omega_uv - omega_ir) / omega_uv;
}

FrequencyGrid make_frequency_grid(const NoiseSpectrum& spec) {
  spec.validate();
  const auto n_uniform =
      static_cast<std::size_t>(std::floor((spec.omega_uv - spec.omega_ir) / spec.delta_omega * (1.0 + 1e-12)));
  if (n_uniform == 0) throw std::invalid_argument("empty noise grid");
  // Uniform cells stop where they would be relatively wider than a log cell,
  // so the midpoint sum converges as both densities are refined.
  const double log_ratio = std::pow(10.0, 1.0 / static_cast<double>(spec.log_cells_per_decade));
  const double edge = spec.delta_omega / (log_ratio - 1.0);
  const std::size_t n_fine = spec.omega_uv > edge ? static_cast<std::size_t>(std::floor(
                                                         (spec.omega_uv - edge) / spec.delta_omega * (1.0 + 1e-12)))
                                                   : 0;
  const std::size_t n_kept = std::min(n_uniform, n_fine);
  const double low = spec.omega_uv - static_cast<double>(n_kept) * spec.delta_omega;

  FrequencyGrid grid;
  if (low > spec.omega_ir * (1.0 + 1e-9)) {
    const double decades = std::log10(low / spec.omega_ir);
    const auto m = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(decades * static_cast<double>(spec.log_cells_per_decade))));
    const double ratio = std::pow(low / spec.omega_ir, 1.0 / static_cast<double>(m));
    double lo = spec.omega_ir;
    for (std::size_t j = 0; j < m; ++j) {
      const double hi = j + 1 == m ? low : lo * ratio;
      grid.omega.push_back(std::sqrt(lo * hi));
      grid.width.push_back(hi - lo);
      lo = hi;
    }
  }
  for (std::size_t j = n_kept; j-- > 0;) {
    const double hi = spec.omega_uv - static_cast<double>(j) * spec.delta_omega;
    grid.omega.push_back(hi - 0.5 * spec.delta_omega);
    grid.width.push_back(spec.delta_omega);
  }
  if (grid.size() > kMaxNoiseComponents) {
    throw std::invalid_argument("noise grid has " + std::to_string(grid.size()) +
                                " components, above the limit of 4096; increase delta_omega");
  }
  return grid;
}

std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter,
                           std::uint64_t lane) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ stream);
  h = splitmix64(h ^ counter);
  return splitmix64(h ^ lane);
}

double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter,
                       std::uint64_t lane) {
  return static_cast<double>(counter_hash(seed, stream, counter, lane) >> 11) * 0x1.0p-53;
}

double counter_normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
  // Box-Muller; u1 shifted away from 0.
  const double u1 = (static_cast<double>(counter_hash(seed, stream, counter, 0) >> 11) + 0.5) * 0x1.0p-53;
  const double u2 = counter_uniform(seed, stream, counter, 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

NoiseTrajectory::NoiseTrajectory(NoiseChannel channel, std::vector<double> omega, std::vector<double> width,
                                 std::vector<double> coefficient, std::vector<double> phase)
    : channel_(channel),
      omega_(std::move(omega)),
      width_(std::move(width)),
      coefficient_(std::move(coefficient)),
      phase_(std::move(phase)) {
  const auto n = omega_.size();
  if (width_.size() != n || coefficient_.size() != n || phase_.size() != n) {
    throw std::invalid_argument("NoiseTrajectory: component arrays differ in length");
  }
}

NoiseTrajectory NoiseTrajectory::silent(NoiseChannel channel) {
  return NoiseTrajectory(channel, {}, {}, {}, {});
}

double NoiseTrajectory::value(double t) const {
  double v = 0.0;
  for (std::size_t k = 0; k < omega_.size(); ++k) v += coefficient_[k] * std::cos(omega_[k] * t + phase_[k]);
  return v;
}

std::vector<double> NoiseTrajectory::sample_uniform(double t0, double dt, std::size_t n) const {
  constexpr std::size_t kReanchor = 1024;
  constexpr std::size_t kLanes = 4;
  std::vector<double> out(n, 0.0);
  const std::size_t m = omega_.size();
  if (m == 0) return out;
  // Padded to a lane multiple; padding has zero coefficient.
  const std::size_t mp = (m + kLanes - 1) / kLanes * kLanes;
  std::vector<double> re(mp, 0.0), im(mp, 0.0), rot_re(mp, 1.0), rot_im(mp, 0.0), coef(mp, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    rot_re[k] = std::cos(omega_[k] * dt);
    rot_im[k] = std::sin(omega_[k] * dt);
    coef[k] = coefficient_[k];
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (j % kReanchor == 0) {
      const double t = t0 + static_cast<double>(j) * dt;
      for (std::size_t k = 0; k < m; ++k) {
        const double arg = omega_[k] * t + phase_[k];
        re[k] = std::cos(arg);
        im[k] = std::sin(arg);
      }
    } else {
      for (std::size_t k = 0; k < mp; ++k) {
        const double r = re[k] * rot_re[k] - im[k] * rot_im[k];
        im[k] = re[k] * rot_im[k] + im[k] * rot_re[k];
        re[k] = r;
      }
    }
    double acc[kLanes] = {};
    for (std::size_t k = 0; k < mp; k += kLanes) {
      for (std::size_t l = 0; l < kLanes; ++l) acc[l] += coef[k + l] * re[k + l];
    }
    out[j] = (acc[0] + acc[1]) + (acc[2] + acc[3]);
  }
  return out;
}

NoiseTrajectory NoiseTrajectory::scaled(double factor) const {
  NoiseTrajectory out = *this;
  for (auto& c : out.coefficient_) c *= factor;
  return out;
}

NoiseTrajectory sample_trajectory(const NoiseSpectrum& spec, const FrequencyGrid& grid, NoiseChannel channel,
                                  std::uint64_t seed) {
  const std::size_t m = grid.size();
  std::vector<double> coefficient(m), phase(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double sd = std::sqrt(2.0 * spec.density(channel.axis, grid.omega[k]) * grid.width[k]);
    coefficient[k] = sd * counter_normal(seed, channel.id(), k);
    phase[k] = kTwoPi * counter_uniform(seed, channel.id(), k, 2);
  }
  return NoiseTrajectory(channel, grid.omega, grid.width, std::move(coefficient), std::move(phase));
}

NoiseTrajectory sample_trajectory(const NoiseSpectrum& spec, NoiseChannel channel, std::uint64_t seed) {
  return sample_trajectory(spec, make_frequency_grid(spec), channel, seed);
}

SpectrumEstimate empirical_spectrum(std::span<const NoiseTrajectory> trajectories, const TimeGrid& grid,
                                    double omega_uv, std::size_t bins_per_decade) {
  if (trajectories.size() < 100) {
    throw std::invalid_argument("empirical_spectrum needs at least 100 trajectories, got " +
                                std::to_string(trajectories.size()));
  }
  if (!(grid.dt > 0.0) || grid.samples < 16) throw std::invalid_argument("empirical_spectrum: degenerate time grid");
  if (std::numbers::pi / grid.dt <= omega_uv) {
    throw std::invalid_argument("empirical_spectrum: time step does not resolve omega_uv");
  }
  if (grid.dt * static_cast<double>(grid.samples) < 10.0 * kTwoPi / omega_uv) {
    throw std::invalid_argument("empirical_spectrum: time span shorter than ten omega_uv periods");
  }
  if (bins_per_decade == 0) throw std::invalid_argument("empirical_spectrum: bins_per_decade must be > 0");

  const std::size_t n = grid.samples;
  const std::size_t n_freq = n / 2 + 1;
  std::vector<double> window(n);
  double w2 = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    window[j] = 0.5 - 0.5 * std::cos(kTwoPi * static_cast<double>(j) / static_cast<double>(n));
    w2 += window[j] * window[j];
  }
  const double u = w2 / static_cast<double>(n);

  double* in = fftw_alloc_real(n);
  fftw_complex* out = fftw_alloc_complex(n_freq);
  fftw_plan plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in, out, FFTW_ESTIMATE);

  std::vector<double> periodogram(n_freq, 0.0);
  for (const auto& traj : trajectories) {
    const auto x = traj.sample_uniform(grid.t0, grid.dt, n);
    for (std::size_t j = 0; j < n; ++j) in[j] = x[j] * window[j];
    fftw_execute(plan);
    for (std::size_t f = 1; f < n_freq; ++f) {
      periodogram[f] += out[f][0] * out[f][0] + out[f][1] * out[f][1];
    }
  }
  fftw_destroy_plan(plan);
  fftw_free(in);
  fftw_free(out);

  const double norm = 2.0 * grid.dt / (kTwoPi * static_cast<double>(n) * u * static_cast<double>(trajectories.size()));
  const double d_omega = kTwoPi / (grid.dt * static_cast<double>(n));
  const double omega_min = d_omega;
  const double omega_max = d_omega * static_cast<double>(n_freq - 1);
  const double log_step = 1.0 / static_cast<double>(bins_per_decade);
  const auto n_bins =
      static_cast<std::size_t>(std::ceil(std::log10(omega_max / omega_min) / log_step));

  SpectrumEstimate est;
  std::vector<double> sum(n_bins, 0.0);
  std::vector<std::size_t> count(n_bins, 0);
  for (std::size_t f = 1; f < n_freq; ++f) {
    const double w = d_omega * static_cast<double>(f);
    auto b = static_cast<std::size_t>(std::floor(std::log10(w / omega_min) / log_step));
    b = std::min(b, n_bins - 1);
    sum[b] += periodogram[f] * norm;
    ++count[b];
  }
  for (std::size_t b = 0; b < n_bins; ++b) {
    if (count[b] == 0) continue;
    est.omega.push_back(omega_min * std::pow(10.0, (static_cast<double>(b) + 0.5) * log_step));
    est.psd.push_back(sum[b] / static_cast<double>(count[b]));
    est.counts.push_back(count[b]);
  }
  return est;
}

double loglog_slope(const SpectrumEstimate& estimate, double omega_lo, double omega_hi) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (std::size_t b = 0; b < estimate.omega.size(); ++b) {
    const double w = estimate.omega[b];
    if (w < omega_lo || w > omega_hi || estimate.psd[b] <= 0.0) continue;
    const double x = std::log10(w);
    const double y = std::log10(estimate.psd[b]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) throw std::invalid_argument("loglog_slope: fewer than two bins in range");
  const double dn = static_cast<double>(n);
  return (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
}

}  // namespace uqdp
