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

#include <array>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "uqdp/linalg.hpp"
#include "uqdp/noise.hpp"

namespace uqdp {

// Product basis of a pair: |up up>, |up down>, |down up>, |down down>,
// qubit 1 leftmost. Energies in rad/s (hbar = 1).

/// H0 = E_z (sigma_z1 + a0 sigma_z2) + sum_alpha E_m,alpha sigma_alpha1 sigma_alpha2.
struct UqdpPairSpec {
  double E_z = 1.0;
  double E_mx = 0.0;
  double E_my = 0.0;
  double E_mz = 0.0;
  double a0 = 1.0;

  /// E_mx = E_m, E_my = E_mz = 0.
  static UqdpPairSpec x_coupled(double E_z, double E_m, double a0 = 1.0);
  /// E_mx = E_m, E_my = E_mz = b0 E_m.
  static UqdpPairSpec isotropic(double E_z, double E_m, double b0);

  /// A protected subspace exists iff E_mx != 0 or E_my != 0.
  bool uqdp_valid() const { return E_mx != 0.0 || E_my != 0.0; }
  bool is_x_coupled() const { return E_my == 0.0 && E_mz == 0.0; }
};

ComplexMatrix build_pair_hamiltonian(const UqdpPairSpec& spec);

/// The {|3>, |4>} pair inside the zero-magnetisation sector.
///
/// Phase convention: |3> carries a real positive |up down> amplitude (for the
/// symmetric pair |3> = (|ud> - |du>)/sqrt2) and |4> is chosen so that
/// <4|sigma_z1|3> is real and negative, which gives P sigma_z1 P = -X and
/// P sigma_z2 P = +X.
struct EncodedSubspace {
  StateVector state3;
  StateVector state4;
  double energy3 = 0.0;
  double energy4 = 0.0;
  double splitting = 0.0;  // energy4 - energy3

  ComplexMatrix projector;  // |3><3| + |4><4|
  ComplexMatrix logical_x;  // |3><4| + |4><3|
  ComplexMatrix logical_y;  // -i|3><4| + i|4><3|
  ComplexMatrix logical_z;  // |3><3| - |4><4|

  /// theta of the even-sector states, cos(theta) = 2E_z/sqrt(4E_z^2+E_m^2) for the x coupling.
  double mixing_angle = 0.0;
  /// Rotation of |3>_e, |4>_e away from the symmetric-pair states (zero when a0 = 1).
  double spread_rotation = 0.0;
  /// <3|sigma_zj|3> = -<4|sigma_zj|4>; nonzero only for a0 != 1.
  double residual_z1 = 0.0;
  double residual_z2 = 0.0;

  std::array<StateVector, 2> basis() const { return {state3, state4}; }
};

enum class SubspacePolicy {
  RequireProtection,  // throws "no protected subspace" unless uqdp_valid()
  AllowUnprotected,   // uncoupled limit: picks the E_m -> 0+ states
};

EncodedSubspace encoded_subspace(const UqdpPairSpec& spec,
                                 SubspacePolicy policy = SubspacePolicy::RequireProtection);

/// All four eigenstates, |1> the ground state and |2> the upper even-sector
/// state, followed by the encoded pair.
struct PairEigenbasis {
  std::array<StateVector, 4> states;
  std::array<double, 4> energies{};

  std::array<StateVector, 4> as_array() const { return states; }
};

PairEigenbasis pair_eigenbasis(const UqdpPairSpec& spec,
                               SubspacePolicy policy = SubspacePolicy::RequireProtection);

/// V_n(t) = sum over channels of delta V_channel(t) sigma_channel.
class NoiseCoupling {
 public:
  NoiseCoupling() = default;
  /// Throws std::invalid_argument for duplicate channels or qubits out of range.
  NoiseCoupling(std::size_t n_qubits, std::vector<NoiseTrajectory> trajectories);
  /// Explicit operator per trajectory, for systems that are not qubit registers.
  NoiseCoupling(std::vector<NoiseTrajectory> trajectories, std::vector<ComplexMatrix> operators);

  std::size_t n_qubits() const { return n_qubits_; }
  std::size_t size() const { return trajectories_.size(); }
  const std::vector<NoiseTrajectory>& trajectories() const { return trajectories_; }
  const std::vector<ComplexMatrix>& operators() const { return operators_; }

  ComplexMatrix operator_at(double t) const;
  /// Adds sum_c values[c] * operator_c to h.
  void accumulate(ComplexMatrix& h, std::span<const double> values) const;

 private:
  std::size_t n_qubits_ = 0;
  std::vector<NoiseTrajectory> trajectories_;
  std::vector<ComplexMatrix> operators_;
};

/// Second-order coefficient of Z in the encoded subspace:
/// -E_m + E_m (x1^2 + x2^2)/(2E_z^2) - (z1 - z2)^2/(2E_m).
double effective_z_coefficient(double E_z, double E_m, double x1, double x2, double z1, double z2);

/// 2x2 effective Hamiltonian coefficient * Z at time t. Requires the x-coupled
/// symmetric pair and E_m != 0. Missing channels count as zero noise.
ComplexMatrix effective_encoded_hamiltonian(const UqdpPairSpec& spec, const NoiseCoupling& noise, double t);

/// Flux-qubit noise mapping delta V = r1 * E_J * delta f.
struct FluxMapping {
  double E_J = 0.0;
  double r1 = 5.0;

  double noise_amplitude(double delta_f) const { return r1 * E_J * delta_f; }
  /// Flux-noise amplitude (in units of the flux quantum) matching a noise amplitude A.
  double flux_amplitude(double A) const { return A / (r1 * E_J); }
};

/// amplitude * 2cos(omega t + phase) * op inside [t_start, t_stop], zero outside.
struct DriveTerm {
  ComplexMatrix op;
  double amplitude = 0.0;
  double omega = 0.0;
  double phase = 0.0;
  double t_start = 0.0;
  double t_stop = std::numeric_limits<double>::infinity();

  /// Static term value*op expressed as a zero-frequency drive.
  static DriveTerm constant(ComplexMatrix op, double value, double t_start = 0.0,
                            double t_stop = std::numeric_limits<double>::infinity());

  double coefficient(double t) const;
  DriveTerm windowed(double start, double stop) const;
};

struct JaynesCummingsSpec {
  double omega0 = 2.0;
  double E_z = 1.0;
  double J = 0.1;
  std::size_t n_max = 6;

  bool resonant(double rel_tol = 1e-12) const;
};

/// Resonator (x) qubit, index 2n + q with q = 0 for up.
struct JaynesCummingsSystem {
  ComplexMatrix hamiltonian;
  ComplexMatrix sigma_z;
  ComplexMatrix sigma_plus;
  ComplexMatrix a_dag;

  std::size_t n_max = 0;
  /// doublets[n-1][alpha] = (|n down> + (-1)^alpha |(n-1) up>)/sqrt2, n = 1..n_max.
  std::vector<std::array<StateVector, 2>> doublets;
  std::vector<std::array<double, 2>> doublet_energies;

  std::size_t dim() const { return hamiltonian.rows(); }
  StateVector fock(std::size_t n, bool up) const;
  const StateVector& doublet(std::size_t n, int alpha) const { return doublets.at(n - 1)[alpha]; }
  double doublet_splitting(std::size_t n) const;
};

/// Noise operator of a channel in the resonator (x) qubit space. Qubit index 0
/// is the qubit (sigma_axis); index 1 is the resonator with x -> a + a^dag,
/// y -> i(a^dag - a), z -> a^dag a.
ComplexMatrix jc_noise_operator(const JaynesCummingsSystem& system, NoiseChannel channel);

/// omega0 a^dag a + E_z sigma_z + J(a^dag sigma_- + sigma_+ a) without doublets.
ComplexMatrix build_jc_hamiltonian(const JaynesCummingsSpec& spec);
/// Full system including doublets. Throws off resonance or for n_max < 2.
JaynesCummingsSystem jaynes_cummings_system(const JaynesCummingsSpec& spec);

/// Two encoded qubits, physical qubits ordered sigma1, sigma2, tau1, tau2.
struct TwoEncodedQubitSystem {
  UqdpPairSpec spec_a;
  UqdpPairSpec spec_b;
  EncodedSubspace sub_a;
  EncodedSubspace sub_b;
  ComplexMatrix h_static;          // H0(sigma) (x) I + I (x) H0(tau)
  std::vector<DriveTerm> coupling; // modulated sigma_z2 tau_z1 plus the E_cc sigma_x2 tau_x1 term
  double lambda_c = 0.0;
  double e_cc = 0.0;
  double drive_omega = 0.0;

  /// |3a 3b>, |3a 4b>, |4a 3b>, |4a 4b>.
  std::array<StateVector, 4> encoded_basis() const;
  /// Logical operator on encoded qubit (0: sigma pair, 1: tau pair) embedded in the 16-dim space.
  ComplexMatrix logical(PauliAxis axis, std::size_t which) const;
};

/// Drive frequency defaults to the difference of the encoded splittings; for
/// equal splittings the coupling becomes the static lambda_c sigma_z2 tau_z1.
TwoEncodedQubitSystem two_encoded_qubit_system(const UqdpPairSpec& spec_a, const UqdpPairSpec& spec_b,
                                               double lambda_c, double e_cc,
                                               std::optional<double> drive_omega = std::nullopt);

}  // namespace uqdp
