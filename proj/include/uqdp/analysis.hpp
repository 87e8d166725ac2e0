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

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uqdp/dynamics.hpp"
#include "uqdp/linalg.hpp"
#include "uqdp/model.hpp"
#include "uqdp/noise.hpp"

namespace uqdp {

struct EnsembleConfig {
  std::size_t n_trajectories = 200;
  std::uint64_t base_seed = 1;
  NoiseSpectrum spectrum;
  /// Empty means x and z on every physical qubit.
  std::vector<NoiseChannel> channels;
  /// Worker count; 0 uses every core. Results do not depend on it.
  std::size_t threads = 0;
};

/// Seed of trajectory k, a pure function of (base, k).
std::uint64_t trajectory_seed(std::uint64_t base_seed, std::size_t k);
/// Seed of grid point i in a sweep.
std::uint64_t point_seed(std::uint64_t base_seed, std::size_t i);

/// x and z channels on qubits [0, n_qubits).
std::vector<NoiseChannel> default_channels(std::size_t n_qubits);

/// Noise realisation k of the ensemble on n_qubits physical qubits.
NoiseCoupling ensemble_member(const EnsembleConfig& ensemble, const FrequencyGrid& grid, std::size_t n_qubits,
                              std::size_t k);

// ---------------------------------------------------------------------------
// Dephasing

struct DephasingTarget {
  enum class Kind { Bare, Encoded, Doublet };
  Kind kind = Kind::Encoded;
  double E_z = 1.0;         // bare qubit: H = E_z sigma_z
  UqdpPairSpec pair;        // encoded qubit
  JaynesCummingsSpec jc;    // polariton doublet qubit
  std::size_t doublet = 1;  // doublet index n

  static DephasingTarget bare(double E_z);
  static DephasingTarget encoded(const UqdpPairSpec& pair);
  static DephasingTarget polariton(const JaynesCummingsSpec& jc, std::size_t n = 1);
};

/// Channels used when EnsembleConfig::channels is empty: x and z on each
/// physical qubit; for the doublet, x and z on the qubit and x on the resonator.
std::vector<NoiseChannel> target_channels(const DephasingTarget& target);

/// Second-order shift of the splitting E_a - E_b of two eigenstates under a
/// static perturbation sum_c v_c O_c: linear[c] v_c + v^T quadratic v.
struct SplittingShift {
  std::vector<double> linear;
  std::vector<double> quadratic;  // row-major, channels x channels
  double operator()(std::span<const double> v) const;
};
SplittingShift splitting_shift(const ComplexMatrix& h, std::span<const ComplexMatrix> operators, const StateVector& a,
                               const StateVector& b);

enum class DephasingMethod {
  Effective,  // second-order splitting deviation integrated along each trajectory
  Full,       // exact piecewise propagation of the whole system
};

struct DephasingOptions {
  /// Initial horizon in seconds; 0 picks one from the quasi-static estimate.
  double horizon = 0.0;
  /// The horizon doubles until the 1/e crossing is found or this is reached.
  double max_horizon = 1e-2;
  /// Fine-grid steps per horizon (refined further to resolve omega_uv).
  std::size_t steps_per_horizon = 1024;
  std::size_t max_steps = std::size_t{1} << 17;
  /// Log-spaced output samples covering six decades below the horizon.
  std::size_t output_points = 61;
};

struct DephasingResult {
  double T_phi = 0.0;  // seconds; equals the horizon when lower_bound is set
  /// SE of |c| at the crossing divided by the local slope of |c|.
  double T_phi_standard_error = 0.0;
  bool lower_bound = false;
  double horizon = 0.0;
  double step = 0.0;
  std::size_t steps = 0;
  std::size_t n_trajectories = 0;
  std::vector<double> times;           // starts at 0
  std::vector<double> coherence;       // |c(t)|
  std::vector<double> standard_error;  // of |c(t)|
  /// Local n in |c| = exp(-(t/T)^n) between T_phi/2 and T_phi (0 when not crossed).
  double decay_exponent = 0.0;
};

/// Quasi-static estimate of the splitting-deviation spread in rad/s.
double quasi_static_rate(const DephasingTarget& target, const NoiseSpectrum& spectrum);

/// Ensemble coherence |<exp(-i int delta dt)>| of the encoded (or bare)
/// qubit prepared in an equal superposition, and its 1/e time.
DephasingResult dephasing_time(const DephasingTarget& target, const EnsembleConfig& ensemble,
                               DephasingMethod method = DephasingMethod::Effective,
                               const DephasingOptions& options = {});

/// Gaussian decay constant of the first-order splitting shift
/// s = <4|V|4> - <3|V|3> caused by the residual diagonal elements of a
/// spread pair: 0.5 * E[s^2] in 1/s^2, estimated over the ensemble (z noise).
struct ResidualDephasing {
  double rate = 0.0;
  double standard_error = 0.0;
};
ResidualDephasing residual_dephasing_rate(const UqdpPairSpec& spec, const EnsembleConfig& ensemble);

// ---------------------------------------------------------------------------
// Channels and fidelities

/// Tensor products of {I, X, Y, Z} over log2(d) encoded qubits, first factor
/// major; index 0 is the identity.
std::vector<ComplexMatrix> pauli_basis(std::size_t d);

struct ChannelEstimate {
  std::size_t dim = 0;
  std::vector<ComplexMatrix> basis;  // pauli_basis(dim)
  std::vector<ComplexMatrix> image;  // ensemble mean of eps(basis[i])
  /// Per-trajectory images, used for standard errors.
  std::vector<std::vector<ComplexMatrix>> trajectory_images;
  /// Per-trajectory maps M = <b_i|U|b_j> (rotating frame where the schedule
  /// asks for it); empty for synthetic channels.
  std::vector<ComplexMatrix> transfers;
  double trace_defect = 0.0;  // 1 - Tr eps(I)/d
  /// Largest deviation from eps(B^dag) = eps(B)^dag over the stored basis.
  double hermiticity_defect = 0.0;

  /// Channel from explicit Pauli images (single "trajectory").
  static ChannelEstimate from_images(std::size_t dim, std::vector<ComplexMatrix> images);
};

/// Propagates the encoded basis under one noise realisation per trajectory.
std::vector<ComplexMatrix> sample_transfers(const ComplexMatrix& h_static, const Schedule& schedule,
                                            std::span<const StateVector> basis, std::size_t n_qubits,
                                            const EnsembleConfig* ensemble);

/// eps(B) for one trajectory: B is split into eigen-projectors, each pure
/// state is pushed through the transfer map and the projected density
/// matrices are recombined. No renormalisation.
ComplexMatrix apply_transfer(const ComplexMatrix& transfer, const ComplexMatrix& b);

/// Builds the channel from per-trajectory transfers.
ChannelEstimate channel_from_transfers(std::vector<ComplexMatrix> transfers);

/// Propagation plus reconstruction. `ensemble` may be null (noiseless, one run).
ChannelEstimate reconstruct_channel(const ComplexMatrix& h_static, const Schedule& schedule,
                                    std::span<const StateVector> basis, std::size_t n_qubits,
                                    const EnsembleConfig* ensemble);

/// eps(B) for an arbitrary operator by linearity over the stored images.
ComplexMatrix channel_image(const ChannelEstimate& channel, const ComplexMatrix& b);

struct FidelityReport {
  double value = 0.0;
  double standard_error = 0.0;
  std::size_t n_trajectories = 0;
};

/// 1/2 + (1/12) sum_{i=1..3} Tr(U S_i U^dag eps(S_i)); d = 2.
FidelityReport fidelity_FX(const ChannelEstimate& channel, const ComplexMatrix& target);

enum class FcTerms {
  Full16,  // identity factors included; a perfect gate scores 1
  Nine,    // i, j in {1, 2, 3} only; a perfect gate scores 0.65
};

/// 1/5 + (1/80) sum Tr(U B U^dag eps(B)) over two-qubit Pauli products; d = 4.
FidelityReport fidelity_FC(const ChannelEstimate& channel, const ComplexMatrix& target,
                           FcTerms terms = FcTerms::Full16);

// ---------------------------------------------------------------------------
// Sweeps

template <typename T>
struct SweepOutcome {
  std::optional<T> value;
  std::string error;      // empty on success
  bool numerical = false; // error came from a NumericalError
  double runtime_s = 0.0;
};

/// Runs fn(i) for every grid point in order; a failing point is recorded and
/// the sweep moves on.
template <typename T, typename Fn>
std::vector<SweepOutcome<T>> sweep(std::size_t n_points, Fn&& fn) {
  std::vector<SweepOutcome<T>> out(n_points);
  for (std::size_t i = 0; i < n_points; ++i) {
    const auto start = std::chrono::steady_clock::now();
    try {
      out[i].value = fn(i);
    } catch (const NumericalError& e) {
      out[i].error = e.what();
      out[i].numerical = true;
    } catch (const std::exception& e) {
      out[i].error = e.what();
    }
    out[i].runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  return out;
}

}  // namespace uqdp
