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

#include "uqdp/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace uqdp {

namespace {

constexpr std::size_t kUpUp = 0, kUpDown = 1, kDownUp = 2, kDownDown = 3;

ComplexMatrix pair_pauli(PauliAxis axis, std::size_t qubit) { return pauli_operator({axis, qubit}, 2); }

/// Multiplies v by a unit phase so that v[index] becomes real and positive.
/// Returns false when the component is too small to define a phase.
bool fix_phase(StateVector& v, std::size_t index, double sign = 1.0) {
  const double mag = std::abs(v[index]);
  if (mag < 1e-12) return false;
  v *= sign * std::conj(v[index]) / mag;
  return true;
}

StateVector kron(const StateVector& a, const StateVector& b) {
  StateVector out(a.dim() * b.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) {
    for (std::size_t j = 0; j < b.dim(); ++j) out[i * b.dim() + j] = a[i] * b[j];
  }
  return out;
}

StateVector lift(const StateVector& coeffs, std::span<const StateVector> basis) {
  StateVector out(basis.front().dim());
  for (std::size_t k = 0; k < basis.size(); ++k) out += coeffs[k] * basis[k];
  return out;
}

}  // namespace

UqdpPairSpec UqdpPairSpec::x_coupled(double E_z, double E_m, double a0) {
  return UqdpPairSpec{.E_z = E_z, .E_mx = E_m, .E_my = 0.0, .E_mz = 0.0, .a0 = a0};
}

UqdpPairSpec UqdpPairSpec::isotropic(double E_z, double E_m, double b0) {
  return UqdpPairSpec{.E_z = E_z, .E_mx = E_m, .E_my = b0 * E_m, .E_mz = b0 * E_m, .a0 = 1.0};
}

ComplexMatrix build_pair_hamiltonian(const UqdpPairSpec& spec) {
  ComplexMatrix h = spec.E_z * pair_pauli(PauliAxis::Z, 0);
  h.add_scaled(pair_pauli(PauliAxis::Z, 1), spec.E_z * spec.a0);
  const std::array<std::pair<PauliAxis, double>, 3> couplings{
      {{PauliAxis::X, spec.E_mx}, {PauliAxis::Y, spec.E_my}, {PauliAxis::Z, spec.E_mz}}};
  for (const auto& [axis, e] : couplings) {
    if (e == 0.0) continue;
    h.add_scaled(pair_pauli(axis, 0) * pair_pauli(axis, 1), e);
  }
  return h;
}

EncodedSubspace encoded_subspace(const UqdpPairSpec& spec, SubspacePolicy policy) {
  if (policy == SubspacePolicy::RequireProtection && !spec.uqdp_valid()) {
    throw std::invalid_argument("no protected subspace: E_mx and E_my are both zero");
  }
  const ComplexMatrix h = build_pair_hamiltonian(spec);
  const std::array<StateVector, 2> odd{StateVector::basis(4, kUpDown), StateVector::basis(4, kDownUp)};

  EigenSystem eig = eigendecompose_hermitian(project(h, odd));
  if (eig.values[1] - eig.values[0] < 1e-9 * std::max(h.norm_max(), 1e-300)) {
    // Degenerate sector: resolve along the flip-flop direction.
    const ComplexMatrix flip = pair_pauli(PauliAxis::X, 0) * pair_pauli(PauliAxis::X, 1);
    const EigenSystem dir = eigendecompose_hermitian(project(flip, odd));
    eig.vectors = dir.vectors;
  }

  EncodedSubspace s;
  s.state3 = lift(eig.vector(0), odd);
  s.state4 = lift(eig.vector(1), odd);
  if (!fix_phase(s.state3, kUpDown)) fix_phase(s.state3, kDownUp, -1.0);

  const ComplexMatrix z1 = pair_pauli(PauliAxis::Z, 0);
  const ComplexMatrix z2 = pair_pauli(PauliAxis::Z, 1);
  const cplx m = inner(s.state4, z1 * s.state3);
  if (std::abs(m) > 1e-12) {
    s.state4 *= -m / std::abs(m);
  } else if (!fix_phase(s.state4, kUpDown)) {
    fix_phase(s.state4, kDownUp);
  }

  s.energy3 = inner(s.state3, h * s.state3).real();
  s.energy4 = inner(s.state4, h * s.state4).real();
  s.splitting = s.energy4 - s.energy3;

  using namespace std::complex_literals;
  s.projector = outer(s.state3, s.state3) + outer(s.state4, s.state4);
  s.logical_x = outer(s.state3, s.state4) + outer(s.state4, s.state3);
  s.logical_y = -1i * outer(s.state3, s.state4) + 1i * outer(s.state4, s.state3);
  s.logical_z = outer(s.state3, s.state3) - outer(s.state4, s.state4);

  s.mixing_angle = std::atan2(spec.E_mx - spec.E_my, spec.E_z * (1.0 + spec.a0));

  const double r = 1.0 / std::numbers::sqrt2;
  const StateVector ref3{0.0, r, -r, 0.0};
  const StateVector ref4{0.0, -r, -r, 0.0};
  s.spread_rotation = std::atan2(inner(ref4, s.state3).real(), inner(ref3, s.state3).real());
  s.residual_z1 = inner(s.state3, z1 * s.state3).real();
  s.residual_z2 = inner(s.state3, z2 * s.state3).real();
  return s;
}

PairEigenbasis pair_eigenbasis(const UqdpPairSpec& spec, SubspacePolicy policy) {
  const EncodedSubspace enc = encoded_subspace(spec, policy);
  const ComplexMatrix h = build_pair_hamiltonian(spec);
  const std::array<StateVector, 2> even{StateVector::basis(4, kUpUp), StateVector::basis(4, kDownDown)};
  const EigenSystem eig = eigendecompose_hermitian(project(h, even));

  StateVector s1 = lift(eig.vector(0), even);
  StateVector s2 = lift(eig.vector(1), even);
  if (!fix_phase(s1, kDownDown)) fix_phase(s1, kUpUp, -1.0);
  if (!fix_phase(s2, kUpUp)) fix_phase(s2, kDownDown);

  PairEigenbasis out;
  out.states = {s1, s2, enc.state3, enc.state4};
  out.energies = {eig.values[0], eig.values[1], enc.energy3, enc.energy4};
  return out;
}

NoiseCoupling::NoiseCoupling(std::size_t n_qubits, std::vector<NoiseTrajectory> trajectories)
    : n_qubits_(n_qubits), trajectories_(std::move(trajectories)) {
  for (std::size_t i = 0; i < trajectories_.size(); ++i) {
    const NoiseChannel& c = trajectories_[i].channel();
    if (c.qubit >= n_qubits_) {
      throw std::invalid_argument("noise channel " + c.name() + " refers to a qubit outside the system");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (trajectories_[j].channel() == c) throw std::invalid_argument("duplicate noise channel " + c.name());
    }
    const PauliAxis axis = c.axis == NoiseAxis::X ? PauliAxis::X : c.axis == NoiseAxis::Y ? PauliAxis::Y : PauliAxis::Z;
    operators_.push_back(pauli_operator({axis, c.qubit}, n_qubits_));
  }
}

NoiseCoupling::NoiseCoupling(std::vector<NoiseTrajectory> trajectories, std::vector<ComplexMatrix> operators)
    : trajectories_(std::move(trajectories)), operators_(std::move(operators)) {
  if (trajectories_.size() != operators_.size()) {
    throw std::invalid_argument("noise coupling: one operator per trajectory required");
  }
  for (std::size_t i = 0; i < operators_.size(); ++i) {
    const ComplexMatrix& op = operators_[i];
    if (op.rows() != op.cols() || op.rows() != operators_.front().rows()) {
      throw std::invalid_argument("noise coupling: operators must be square and of equal size");
    }
    if (max_abs_diff(op, op.adjoint()) > 1e-12) throw std::invalid_argument("noise coupling: operator not Hermitian");
  }
}

ComplexMatrix NoiseCoupling::operator_at(double t) const {
  const std::size_t dim = operators_.empty() ? std::size_t{1} << n_qubits_ : operators_.front().rows();
  ComplexMatrix v(dim, dim);
  for (std::size_t i = 0; i < trajectories_.size(); ++i) v.add_scaled(operators_[i], trajectories_[i].value(t));
  return v;
}

void NoiseCoupling::accumulate(ComplexMatrix& h, std::span<const double> values) const {
  for (std::size_t i = 0; i < operators_.size(); ++i) {
    if (values[i] != 0.0) h.add_scaled(operators_[i], values[i]);
  }
}

double effective_z_coefficient(double E_z, double E_m, double x1, double x2, double z1, double z2) {
  const double dz = z1 - z2;
  return -E_m + E_m * (x1 * x1 + x2 * x2) / (2.0 * E_z * E_z) - dz * dz / (2.0 * E_m);
}

ComplexMatrix effective_encoded_hamiltonian(const UqdpPairSpec& spec, const NoiseCoupling& noise, double t) {
  if (!spec.is_x_coupled() || spec.a0 != 1.0) {
    throw std::invalid_argument("effective Hamiltonian needs the symmetric x-coupled pair");
  }
  if (spec.E_mx == 0.0) throw std::invalid_argument("effective Hamiltonian is singular at E_m = 0");
  double x[2] = {0.0, 0.0};
  double z[2] = {0.0, 0.0};
  for (const auto& traj : noise.trajectories()) {
    const NoiseChannel& c = traj.channel();
    if (c.qubit > 1) continue;
    if (c.axis == NoiseAxis::X) x[c.qubit] = traj.value(t);
    if (c.axis == NoiseAxis::Z) z[c.qubit] = traj.value(t);
  }
  const double coeff = effective_z_coefficient(spec.E_z, spec.E_mx, x[0], x[1], z[0], z[1]);
  return coeff * pauli_matrix(PauliAxis::Z);
}

DriveTerm DriveTerm::constant(ComplexMatrix op, double value, double t_start, double t_stop) {
  return DriveTerm{.op = std::move(op), .amplitude = 0.5 * value, .omega = 0.0, .phase = 0.0,
                   .t_start = t_start, .t_stop = t_stop};
}

double DriveTerm::coefficient(double t) const {
  if (t < t_start || t > t_stop) return 0.0;
  return 2.0 * amplitude * std::cos(omega * t + phase);
}

DriveTerm DriveTerm::windowed(double start, double stop) const {
  DriveTerm d = *this;
  d.t_start = start;
  d.t_stop = stop;
  return d;
}

bool JaynesCummingsSpec::resonant(double rel_tol) const {
  return std::abs(omega0 - 2.0 * E_z) <= rel_tol * std::max(std::abs(omega0), std::abs(2.0 * E_z));
}

ComplexMatrix build_jc_hamiltonian(const JaynesCummingsSpec& spec) {
  if (spec.n_max < 2) throw std::invalid_argument("Jaynes-Cummings cutoff n_max must be >= 2");
  const std::size_t levels = spec.n_max + 1;
  ComplexMatrix a_dag(levels, levels);
  for (std::size_t n = 0; n + 1 < levels; ++n) a_dag(n + 1, n) = std::sqrt(static_cast<double>(n + 1));
  const ComplexMatrix number = a_dag * a_dag.adjoint();
  const ComplexMatrix id_res = ComplexMatrix::identity(levels);
  const ComplexMatrix id_q = ComplexMatrix::identity(2);
  const ComplexMatrix sp{{0.0, 1.0}, {0.0, 0.0}};

  ComplexMatrix h = spec.omega0 * kron(number, id_q);
  h.add_scaled(kron(id_res, pauli_matrix(PauliAxis::Z)), spec.E_z);
  h.add_scaled(kron(a_dag, sp.adjoint()) + kron(a_dag.adjoint(), sp), spec.J);
  return h;
}

StateVector JaynesCummingsSystem::fock(std::size_t n, bool up) const {
  return StateVector::basis(dim(), 2 * n + (up ? 0 : 1));
}

double JaynesCummingsSystem::doublet_splitting(std::size_t n) const {
  const auto& e = doublet_energies.at(n - 1);
  return std::abs(e[0] - e[1]);
}

ComplexMatrix jc_noise_operator(const JaynesCummingsSystem& system, NoiseChannel channel) {
  const ComplexMatrix& up = system.sigma_plus;
  const ComplexMatrix& ad = system.a_dag;
  const cplx i{0.0, 1.0};
  if (channel.qubit == 0) {
    switch (channel.axis) {
      case NoiseAxis::X: return up + up.adjoint();
      case NoiseAxis::Y: return -i * up + i * up.adjoint();
      case NoiseAxis::Z: return system.sigma_z;
    }
  }
  if (channel.qubit == 1) {
    switch (channel.axis) {
      case NoiseAxis::X: return ad + ad.adjoint();
      case NoiseAxis::Y: return i * ad - i * ad.adjoint();
      case NoiseAxis::Z: return ad * ad.adjoint();
    }
  }
  throw std::invalid_argument("noise channel " + channel.name() + " does not exist in the qubit-resonator system");
}

JaynesCummingsSystem jaynes_cummings_system(const JaynesCummingsSpec& spec) {
  if (!spec.resonant()) {
    throw std::invalid_argument("polariton doublets need resonance omega0 = 2 E_z");
  }
  JaynesCummingsSystem sys;
  sys.hamiltonian = build_jc_hamiltonian(spec);
  sys.n_max = spec.n_max;
  const std::size_t levels = spec.n_max + 1;
  ComplexMatrix a_dag(levels, levels);
  for (std::size_t n = 0; n + 1 < levels; ++n) a_dag(n + 1, n) = std::sqrt(static_cast<double>(n + 1));
  const ComplexMatrix sp{{0.0, 1.0}, {0.0, 0.0}};
  sys.a_dag = kron(a_dag, ComplexMatrix::identity(2));
  sys.sigma_plus = kron(ComplexMatrix::identity(levels), sp);
  sys.sigma_z = kron(ComplexMatrix::identity(levels), pauli_matrix(PauliAxis::Z));

  const double r = 1.0 / std::numbers::sqrt2;
  for (std::size_t n = 1; n <= spec.n_max; ++n) {
    std::array<StateVector, 2> pair;
    std::array<double, 2> energy{};
    for (int alpha = 0; alpha < 2; ++alpha) {
      const double sign = alpha == 0 ? 1.0 : -1.0;
      pair[alpha] = r * sys.fock(n, false) + (sign * r) * sys.fock(n - 1, true);
      energy[alpha] = inner(pair[alpha], sys.hamiltonian * pair[alpha]).real();
    }
    sys.doublets.push_back(pair);
    sys.doublet_energies.push_back(energy);
  }
  return sys;
}

std::array<StateVector, 4> TwoEncodedQubitSystem::encoded_basis() const {
  return {kron(sub_a.state3, sub_b.state3), kron(sub_a.state3, sub_b.state4),
          kron(sub_a.state4, sub_b.state3), kron(sub_a.state4, sub_b.state4)};
}

ComplexMatrix TwoEncodedQubitSystem::logical(PauliAxis axis, std::size_t which) const {
  const EncodedSubspace& s = which == 0 ? sub_a : sub_b;
  ComplexMatrix local;
  switch (axis) {
    case PauliAxis::I: local = s.projector; break;
    case PauliAxis::X: local = s.logical_x; break;
    case PauliAxis::Y: local = s.logical_y; break;
    case PauliAxis::Z: local = s.logical_z; break;
  }
  const ComplexMatrix id = ComplexMatrix::identity(4);
  return which == 0 ? kron(local, id) : kron(id, local);
}

TwoEncodedQubitSystem two_encoded_qubit_system(const UqdpPairSpec& spec_a, const UqdpPairSpec& spec_b,
                                               double lambda_c, double e_cc, std::optional<double> drive_omega) {
  TwoEncodedQubitSystem sys;
  sys.spec_a = spec_a;
  sys.spec_b = spec_b;
  sys.sub_a = encoded_subspace(spec_a);
  sys.sub_b = encoded_subspace(spec_b);
  const ComplexMatrix id = ComplexMatrix::identity(4);
  sys.h_static = kron(build_pair_hamiltonian(spec_a), id) + kron(id, build_pair_hamiltonian(spec_b));
  sys.lambda_c = lambda_c;
  sys.e_cc = e_cc;
  sys.drive_omega = drive_omega.value_or(sys.sub_a.splitting - sys.sub_b.splitting);

  const ComplexMatrix zz = pauli_operator({PauliAxis::Z, 1}, 4) * pauli_operator({PauliAxis::Z, 2}, 4);
  const ComplexMatrix xx = pauli_operator({PauliAxis::X, 1}, 4) * pauli_operator({PauliAxis::X, 2}, 4);
  const double scale = std::max(std::abs(sys.sub_a.splitting), std::abs(sys.sub_b.splitting));
  if (std::abs(sys.drive_omega) > 1e-12 * scale) {
    sys.coupling.push_back(DriveTerm{.op = zz, .amplitude = lambda_c, .omega = sys.drive_omega});
  } else {
    sys.coupling.push_back(DriveTerm::constant(zz, lambda_c));
  }
  if (e_cc != 0.0) sys.coupling.push_back(DriveTerm::constant(xx, e_cc));
  return sys;
}

}  // namespace uqdp
