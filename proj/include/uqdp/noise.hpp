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
#include <span>
#include <string>
#include <vector>

namespace uqdp {

// Units: energies are angular frequencies (hbar = 1, rad/s), times in seconds.

enum class NoiseAxis { X, Y, Z };

/// One classical noise source delta V_{axis, qubit}(t).
struct NoiseChannel {
  NoiseAxis axis = NoiseAxis::X;
  std::size_t qubit = 0;

  std::uint64_t id() const { return static_cast<std::uint64_t>(axis) * 1024u + qubit; }
  std::string name() const;
  friend bool operator==(const NoiseChannel&, const NoiseChannel&) = default;
};

enum class SpectralShape {
  OneOverF,  // S(w) = A^2 weight / w
  White,     // S(w) = A^2 weight / w_uv, flat; test stub
};

struct NoiseSpectrum {
  double amplitude = 0.0;    // A
  double power_angle = 0.0;  // eta in [0, pi/2]
  double omega_ir = 0.0;
  double omega_uv = 0.0;
  double delta_omega = 0.0;  // uniform spacing below omega_uv
  SpectralShape shape = SpectralShape::OneOverF;
  /// Density of the logarithmic cells bridging the uniform comb down to omega_ir.
  std::size_t log_cells_per_decade = 16;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;

  /// cos^2(eta) for transverse (x, y) channels, sin^2(eta) for z.
  double channel_weight(NoiseAxis axis) const;
  /// One-sided spectral density of the channel.
  double density(NoiseAxis axis, double omega) const;
  /// Integral of density over [omega_ir, omega_uv].
  double integrated_power(NoiseAxis axis) const;
};

inline constexpr std::size_t kMaxNoiseComponents = 4096;

/// Frequency nodes and cell widths, ascending in frequency.
struct FrequencyGrid {
  std::vector<double> omega;
  std::vector<double> width;

  std::size_t size() const { return omega.size(); }
};

/// Uniform cells of width delta_omega from omega_uv downward, as long as a
/// cell is no wider (relative to its frequency) than a logarithmic cell, then
/// logarithmic cells down to omega_ir. Throws "empty noise grid" when no
/// uniform cell fits in [omega_ir, omega_uv] and when the component budget is
/// exceeded.
FrequencyGrid make_frequency_grid(const NoiseSpectrum& spec);

/// Stateless counter-based generator: every draw is a pure function of its
/// (seed, stream, counter, lane) key.
std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter,
                           std::uint64_t lane);
/// Uniform on [0, 1).
double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter,
                       std::uint64_t lane);
double counter_normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter);

/// V(t) = sum_k coefficient_k cos(omega_k t + phase_k), coefficient_k = a(omega_k) * dw_k.
class NoiseTrajectory {
 public:
  NoiseTrajectory() = default;
  NoiseTrajectory(NoiseChannel channel, std::vector<double> omega, std::vector<double> width,
                  std::vector<double> coefficient, std::vector<double> phase);

  /// Zero trajectory on the given channel.
  static NoiseTrajectory silent(NoiseChannel channel);

  const NoiseChannel& channel() const { return channel_; }
  std::size_t components() const { return omega_.size(); }
  std::span<const double> omega() const { return omega_; }
  std::span<const double> coefficient() const { return coefficient_; }
  std::span<const double> phase() const { return phase_; }
  /// a(omega_k), i.e. coefficient divided by the cell width.
  double fourier_amplitude(std::size_t k) const { return coefficient_[k] / width_[k]; }

  double value(double t) const;
  /// Values at t0 + j*dt for j in [0, n), via phasor recurrence re-anchored
  /// every 1024 steps.
  std::vector<double> sample_uniform(double t0, double dt, std::size_t n) const;

  NoiseTrajectory scaled(double factor) const;

 private:
  NoiseChannel channel_;
  std::vector<double> omega_;
  std::vector<double> width_;
  std::vector<double> coefficient_;
  std::vector<double> phase_;
};

/// Gaussian amplitudes with Var[a_k] dw_k^2 = 2 S(omega_k) dw_k and uniform
/// phases, so that Var[V(t)] equals the integrated power of the channel.
NoiseTrajectory sample_trajectory(const NoiseSpectrum& spec, NoiseChannel channel, std::uint64_t seed);
NoiseTrajectory sample_trajectory(const NoiseSpectrum& spec, const FrequencyGrid& grid,
                                  NoiseChannel channel, std::uint64_t seed);

struct TimeGrid {
  double t0 = 0.0;
  double dt = 0.0;
  std::size_t samples = 0;
};

struct SpectrumEstimate {
  std::vector<double> omega;  // geometric bin centres
  std::vector<double> psd;    // one-sided, averaged over ensemble and bin
  std::vector<std::size_t> counts;  // periodogram lines per bin
};

/// Hann-windowed periodogram averaged over the ensemble and collapsed onto
/// logarithmic bins. Requires >= 100 trajectories and a grid that resolves
/// omega_uv and spans at least ten of its periods.
SpectrumEstimate empirical_spectrum(std::span<const NoiseTrajectory> trajectories, const TimeGrid& grid,
                                    double omega_uv, std::size_t bins_per_decade = 8);

/// Least-squares slope of log(psd) against log(omega) for bins inside [lo, hi].
double loglog_slope(const SpectrumEstimate& estimate, double omega_lo, double omega_hi);

}  // namespace uqdp
