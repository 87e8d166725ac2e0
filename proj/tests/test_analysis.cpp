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
#include <stdexcept>

#include "test_support.hpp"
#include "uqdp/analysis.hpp"
#include "uqdp/parallel.hpp"

using namespace uqdp;
using namespace uqdp::testing;

namespace {

const double kEz = 5.0 * kGHz;
const double kLambda = 0.3 * kGHz;

EnsembleConfig ensemble(double eta, std::size_t n, std::uint64_t seed = 1) {
  EnsembleConfig e;
  e.n_trajectories = n;
  e.base_seed = seed;
  e.spectrum = default_spectrum(kEz, eta);
  return e;
}

ChannelEstimate ux_channel(double E_m, const EnsembleConfig* e) {
  const UqdpPairSpec spec = UqdpPairSpec::x_coupled(kEz, E_m);
  const auto basis = encoded_subspace(spec).basis();
  return reconstruct_channel(build_pair_hamiltonian(spec), gate_UX(spec, kPi, kLambda), basis, 2, e);
}

ComplexMatrix target_x() { return rotation(pauli_matrix(PauliAxis::X), kPi); }

std::vector<ComplexMatrix> scaled_basis(std::size_t d, const std::vector<double>& factors) {
  auto b = pauli_basis(d);
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = factors[i] * b[i];
  return b;
}

}  // namespace

TEST_CASE("pauli basis") {
  const auto b2 = pauli_basis(2);
  REQUIRE(b2.size() == 4);
  CHECK(max_abs_diff(b2[0], ComplexMatrix::identity(2)) == 0.0);
  CHECK(max_abs_diff(b2[3], pauli_matrix(PauliAxis::Z)) == 0.0);
  const auto b4 = pauli_basis(4);
  REQUIRE(b4.size() == 16);
  CHECK(max_abs_diff(b4[6], kron(pauli_matrix(PauliAxis::X), pauli_matrix(PauliAxis::Y))) == 0.0);
  CHECK_THROWS_AS(pauli_basis(3), std::invalid_argument);
}

TEST_CASE("noiseless identity schedule gives the identity map") {
  const UqdpPairSpec spec = UqdpPairSpec::x_coupled(kEz, 0.4 * kEz);
  const auto basis = encoded_subspace(spec).basis();
  const ChannelEstimate ch = reconstruct_channel(build_pair_hamiltonian(spec), Schedule{}, basis, 2, nullptr);
  CHECK(std::abs(ch.trace_defect) < 1e-6);
  for (std::size_t i = 0; i < 4; ++i) CHECK(max_abs_diff(ch.image[i], ch.basis[i]) < 1e-12);
  CHECK(fidelity_FX(ch, ComplexMatrix::identity(2)).value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("noiseless U_X(pi) flips Z") {
  const ChannelEstimate ch = ux_channel(0.4 * kEz, nullptr);
  const FidelityReport f = fidelity_FX(ch, target_x());
  CHECK(f.value >= 1.0 - 1e-3);
  CHECK(f.n_trajectories == 1);
  CHECK(std::abs(ch.trace_defect) < 1e-3);
  CHECK(ch.hermiticity_defect < 1e-10);

  // A weak drive removes the Bloch-Siegert detuning (about lambda / 2E_m).
  const UqdpPairSpec spec = UqdpPairSpec::x_coupled(kEz, 0.4 * kEz);
  const auto basis = encoded_subspace(spec).basis();
  const ChannelEstimate weak =
      reconstruct_channel(build_pair_hamiltonian(spec), gate_UX(spec, kPi, 2e-3 * kGHz), basis, 2, nullptr);
  const ComplexMatrix z = pauli_matrix(PauliAxis::Z);
  CHECK(max_abs_diff(channel_image(weak, z), -1.0 * z) < 1e-3);
}

TEST_CASE("stub channels") {
  const ComplexMatrix id2 = ComplexMatrix::identity(2);
  const auto dephasing = ChannelEstimate::from_images(2, scaled_basis(2, {1, 0, 0, 1}));
  CHECK(fidelity_FX(dephasing, id2).value == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  const auto depolarizing = ChannelEstimate::from_images(2, scaled_basis(2, {1, 0, 0, 0}));
  CHECK(fidelity_FX(depolarizing, id2).value == doctest::Approx(0.5).epsilon(1e-14));
  const auto perfect = ChannelEstimate::from_images(2, pauli_basis(2));
  CHECK(fidelity_FX(perfect, id2).value == doctest::Approx(1.0).epsilon(1e-14));

  // perfect U channel for a non-trivial U
  const ComplexMatrix u = target_x();
  std::vector<ComplexMatrix> images;
  for (const auto& b : pauli_basis(2)) images.push_back(u * b * u.adjoint());
  CHECK(fidelity_FX(ChannelEstimate::from_images(2, images), u).value == doctest::Approx(1.0).epsilon(1e-14));

  const ComplexMatrix uc = uc_target();
  std::vector<ComplexMatrix> images4;
  for (const auto& b : pauli_basis(4)) images4.push_back(uc * b * uc.adjoint());
  const auto perfect4 = ChannelEstimate::from_images(4, images4);
  CHECK(fidelity_FC(perfect4, uc).value == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(fidelity_FC(perfect4, uc, FcTerms::Nine).value == doctest::Approx(0.65).epsilon(1e-14));

  std::vector<double> keep_identity(16, 0.0);
  keep_identity[0] = 1.0;
  const auto depolarizing4 = ChannelEstimate::from_images(4, scaled_basis(4, keep_identity));
  CHECK(fidelity_FC(depolarizing4, uc).value == doctest::Approx(0.25).epsilon(1e-14));

  CHECK_THROWS_AS(fidelity_FC(perfect, id2), std::invalid_argument);
  CHECK_THROWS_AS(fidelity_FX(perfect4, uc), std::invalid_argument);
}

TEST_CASE("noisy channel: linearity, hermiticity and fidelity bounds") {
  const EnsembleConfig e = ensemble(kPi / 4, 100);
  const ChannelEstimate ch = ux_channel(0.4 * kEz, &e);
  REQUIRE(ch.transfers.size() == 100);
  CHECK(ch.hermiticity_defect < 1e-10);

  const ComplexMatrix b =
      std::sqrt(0.5) * (pauli_matrix(PauliAxis::X) + pauli_matrix(PauliAxis::Z));
  std::vector<ComplexMatrix> direct;
  for (const auto& m : ch.transfers) direct.push_back(apply_transfer(m, b));
  const ComplexMatrix mean = (1.0 / static_cast<double>(direct.size())) * pairwise_sum(direct);
  CHECK(max_abs_diff(mean, channel_image(ch, b)) < 1e-10);

  const FidelityReport f = fidelity_FX(ch, target_x());
  CHECK(f.value >= 0.0 - 3.0 * f.standard_error);
  CHECK(f.value <= 1.0 + 3.0 * f.standard_error);
  CHECK(f.standard_error > 0.0);
  CHECK(f.value > 0.997);
}

TEST_CASE("calibrated U_C channel") {
  const UqdpPairSpec a = UqdpPairSpec::x_coupled(kEz, 5.0 * kGHz);
  const UqdpPairSpec b = UqdpPairSpec::x_coupled(kEz, 2.0 * kGHz);
  // Default coupling: counter-rotating terms limit the gate.
  const TwoEncodedQubitSystem nominal = two_encoded_qubit_system(a, b, 0.3 * kGHz, 0.0);
  const auto basis = nominal.encoded_basis();
  const UcCalibration cal = calibrate_UC(nominal);
  const ChannelEstimate ch = reconstruct_channel(nominal.h_static, cal.schedule, basis, 4, nullptr);
  CHECK(fidelity_FC(ch, uc_target()).value == doctest::Approx(cal.fidelity).epsilon(1e-6));
  CHECK(fidelity_FC(ch, uc_target()).value > 0.99);

  // RWA regime: the calibrated gate is near perfect.
  const TwoEncodedQubitSystem weak = two_encoded_qubit_system(a, b, 0.1 * kGHz, 0.0);
  const UcCalibration cal_weak = calibrate_UC(weak);
  const ChannelEstimate ch_weak = reconstruct_channel(weak.h_static, cal_weak.schedule, basis, 4, nullptr);
  CHECK(fidelity_FC(ch_weak, uc_target()).value >= 1.0 - 1e-3);
  CHECK(std::abs(ch_weak.trace_defect) < 1e-3);
}

TEST_CASE("ensemble results do not depend on the thread count") {
  EnsembleConfig e1 = ensemble(kPi / 3, 100, 7);
  EnsembleConfig e4 = e1;
  e1.threads = 1;
  e4.threads = 4;
  const FidelityReport f1 = fidelity_FX(ux_channel(0.4 * kEz, &e1), target_x());
  const FidelityReport f4 = fidelity_FX(ux_channel(0.4 * kEz, &e4), target_x());
  CHECK(f1.value == f4.value);
  CHECK(f1.standard_error == f4.standard_error);
}

TEST_CASE("doubling the ensemble stays within 3 standard errors") {
  const EnsembleConfig small = ensemble(kPi / 2, 100, 3);
  const EnsembleConfig large = ensemble(kPi / 2, 200, 3);
  const FidelityReport fs = fidelity_FX(ux_channel(0.4 * kEz, &small), target_x());
  const FidelityReport fl = fidelity_FX(ux_channel(0.4 * kEz, &large), target_x());
  CHECK(std::abs(fs.value - fl.value) < 3.0 * fs.standard_error);
}

TEST_CASE("trajectory seeds are pure functions of (base, k)") {
  CHECK(trajectory_seed(1, 5) == trajectory_seed(1, 5));
  CHECK(trajectory_seed(1, 5) != trajectory_seed(1, 6));
  CHECK(trajectory_seed(1, 5) != trajectory_seed(2, 5));
  CHECK(point_seed(1, 0) != trajectory_seed(1, 0));
  CHECK(default_channels(2).size() == 4);
}

TEST_CASE("no noise: coherence stays at one and T_phi is a lower bound") {
  EnsembleConfig e = ensemble(kPi / 4, 100);
  e.spectrum.amplitude = 0.0;
  const DephasingResult r = dephasing_time(DephasingTarget::bare(kEz), e);
  CHECK(r.lower_bound);
  CHECK(r.T_phi == r.horizon);
  for (double c : r.coherence) CHECK(c == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("bare qubit, longitudinal noise: quasi-static Gaussian decay") {
  const EnsembleConfig e = ensemble(kPi / 2, 200);
  const DephasingResult r = dephasing_time(DephasingTarget::bare(kEz), e);
  REQUIRE_FALSE(r.lower_bound);
  // H = E_z sigma_z + V sigma_z: the splitting moves by 2V, so |c| = exp(-2 sigma_V^2 t^2).
  const double sigma_v = e.spectrum.amplitude * std::sqrt(std::log(e.spectrum.omega_uv / e.spectrum.omega_ir));
  const double oracle = 1.0 / (std::sqrt(2.0) * sigma_v);
  CHECK(r.T_phi == doctest::Approx(oracle).epsilon(0.25));
  CHECK(r.coherence.front() == 1.0);

  // |c| is non-increasing up to 2 standard errors.
  for (std::size_t i = 1; i < r.coherence.size(); ++i) {
    const double slack = 2.0 * std::hypot(r.standard_error[i], r.standard_error[i - 1]);
    CHECK(r.coherence[i] <= r.coherence[i - 1] + slack);
  }
  CHECK(r.decay_exponent == doctest::Approx(2.0).epsilon(0.25));
}

TEST_CASE("bare qubit: transverse noise protects by orders of magnitude") {
  const DephasingResult r0 = dephasing_time(DephasingTarget::bare(kEz), ensemble(0.0, 200));
  const DephasingResult r90 = dephasing_time(DephasingTarget::bare(kEz), ensemble(kPi / 2, 200));
  CHECK(r90.T_phi * 10.0 <= r0.T_phi);
}

TEST_CASE("effective and full methods agree for E_m >= 0.2 E_z") {
  for (double ratio : {0.2, 0.6, 1.0}) {
    for (double eta : {0.0, kPi / 4, kPi / 2}) {
      CAPTURE(ratio);
      CAPTURE(eta);
      const DephasingTarget t = DephasingTarget::encoded(UqdpPairSpec::x_coupled(kEz, ratio * kEz));
      const EnsembleConfig e = ensemble(eta, 100);
      const DephasingResult eff = dephasing_time(t, e, DephasingMethod::Effective);
      const DephasingResult full = dephasing_time(t, e, DephasingMethod::Full);
      CHECK_FALSE(eff.lower_bound);
      CHECK_FALSE(full.lower_bound);
      CHECK(full.T_phi == doctest::Approx(eff.T_phi).epsilon(0.30));
    }
  }
}

TEST_CASE("dephasing errors") {
  const EnsembleConfig e = ensemble(kPi / 4, 100);
  UqdpPairSpec off = UqdpPairSpec::x_coupled(kEz, 0.0);
  CHECK_THROWS_AS(dephasing_time(DephasingTarget::encoded(off), e), std::invalid_argument);
  EnsembleConfig empty = e;
  empty.n_trajectories = 0;
  CHECK_THROWS_AS(dephasing_time(DephasingTarget::bare(kEz), empty), std::invalid_argument);
}

TEST_CASE("sweep records failures and continues") {
  const auto rows = sweep<double>(4, [](std::size_t i) -> double {
    if (i == 1) throw NumericalError("norm drift");
    if (i == 2) throw std::invalid_argument("bad point");
    return static_cast<double>(i) * 0.5;
  });
  REQUIRE(rows.size() == 4);
  CHECK(*rows[0].value == 0.0);
  CHECK_FALSE(rows[1].value.has_value());
  CHECK(rows[1].numerical);
  CHECK(rows[1].error == "norm drift");
  CHECK_FALSE(rows[2].numerical);
  CHECK(rows[2].error == "bad point");
  CHECK(*rows[3].value == 1.5);
  for (const auto& r : rows) CHECK(r.runtime_s >= 0.0);
}

TEST_CASE("one-point sweep equals the direct call") {
  const EnsembleConfig e = ensemble(0.0, 100);
  const auto rows = sweep<FidelityReport>(1, [&](std::size_t) { return fidelity_FX(ux_channel(0.4 * kEz, &e), target_x()); });
  const FidelityReport direct = fidelity_FX(ux_channel(0.4 * kEz, &e), target_x());
  REQUIRE(rows[0].value.has_value());
  CHECK(rows[0].value->value == direct.value);
  CHECK(rows[0].value->standard_error == direct.standard_error);
}

TEST_CASE("F_X rises with E_m at eta = 0 before saturating") {
  const std::vector<double> ratios{0.05, 0.1, 0.2, 0.3, 0.4};
  std::vector<FidelityReport> f;
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    EnsembleConfig e = ensemble(0.0, 100, point_seed(1, i));
    f.push_back(fidelity_FX(ux_channel(2.0 * ratios[i] * kEz, &e), target_x()));
  }
  std::size_t peak = 0;
  for (std::size_t k = 1; k < f.size(); ++k) {
    if (f[k].value > f[peak].value) peak = k;
  }
  // non-decreasing up to 2 standard errors before the maximum
  for (std::size_t k = 1; k <= peak; ++k) {
    CHECK(f[k].value >= f[k - 1].value - 2.0 * std::hypot(f[k].standard_error, f[k - 1].standard_error));
  }
  CHECK(f.back().value > f.front().value);
}

TEST_CASE("splitting shift: bare closed form and exact-diagonalisation oracle") {
  const double E = 3.0;
  const ComplexMatrix x = pauli_matrix(PauliAxis::X), z = pauli_matrix(PauliAxis::Z);
  const std::vector<ComplexMatrix> ops{x, z};
  const SplittingShift bare = splitting_shift(E * z, ops, StateVector{1.0, 0.0}, StateVector{0.0, 1.0});
  CHECK(bare.linear[0] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(bare.linear[1] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(bare.quadratic[0] == doctest::Approx(1.0 / E).epsilon(1e-12));

  // Encoded pair: compare with the exact splitting under a small static perturbation.
  const UqdpPairSpec spec = UqdpPairSpec::x_coupled(1.0, 0.6);
  const ComplexMatrix h = build_pair_hamiltonian(spec);
  const EncodedSubspace enc = encoded_subspace(spec);
  std::vector<ComplexMatrix> pair_ops;
  for (const auto& ch : default_channels(2)) {
    pair_ops.push_back(pauli_operator({ch.axis == NoiseAxis::X ? PauliAxis::X : PauliAxis::Z, ch.qubit}, 2));
  }
  const SplittingShift s = splitting_shift(h, pair_ops, enc.state3, enc.state4);
  for (double l : s.linear) CHECK(std::abs(l) < 1e-12);
  const std::vector<double> v{1e-3, -2e-3, 1.5e-3, 0.5e-3};
  ComplexMatrix hv = h;
  for (std::size_t c = 0; c < v.size(); ++c) hv.add_scaled(pair_ops[c], v[c]);
  const EigenSystem e0 = eigendecompose_hermitian(h), e1 = eigendecompose_hermitian(hv);
  auto level = [](const EigenSystem& e, const StateVector& psi) {
    std::size_t best = 0;
    for (std::size_t k = 0; k < e.values.size(); ++k) {
      if (std::norm(inner(e.vector(k), psi)) > std::norm(inner(e.vector(best), psi))) best = k;
    }
    return e.values[best];
  };
  const double exact = (level(e1, enc.state3) - level(e1, enc.state4)) - (level(e0, enc.state3) - level(e0, enc.state4));
  CHECK(s(v) == doctest::Approx(exact).epsilon(0.02));
  // matches the closed-form second-order coefficient
  const double closed = 2.0 * (effective_z_coefficient(1.0, 0.6, v[0], v[2], v[1], v[3]) + 0.6);
  CHECK(std::abs(s(v)) == doctest::Approx(std::abs(closed)).epsilon(1e-9));
}

TEST_CASE("polariton doublet: first-order protection and dephasing") {
  JaynesCummingsSpec jc;
  jc.E_z = kEz;
  jc.omega0 = 2.0 * kEz;
  jc.J = 0.1 * kGHz;
  jc.n_max = 4;
  const DephasingTarget t = DephasingTarget::polariton(jc, 1);
  const JaynesCummingsSystem sys = jaynes_cummings_system(jc);
  std::vector<ComplexMatrix> ops;
  for (const auto& ch : target_channels(t)) ops.push_back(jc_noise_operator(sys, ch));
  const SplittingShift s = splitting_shift(sys.hamiltonian, ops, sys.doublet(1, 0), sys.doublet(1, 1));
  for (double l : s.linear) CHECK(std::abs(l) < 1e-12);

  const EnsembleConfig e = ensemble(kPi / 4, 100);
  const DephasingResult eff = dephasing_time(t, e, DephasingMethod::Effective);
  CHECK_FALSE(eff.lower_bound);
  const DephasingResult full = dephasing_time(t, e, DephasingMethod::Full);
  CHECK_FALSE(full.lower_bound);
  CHECK(full.T_phi == doctest::Approx(eff.T_phi).epsilon(0.30));

  JaynesCummingsSpec flat = jc;
  flat.J = 0.0;
  CHECK_THROWS_AS(dephasing_time(DephasingTarget::polariton(flat, 1), e), std::invalid_argument);
  CHECK_THROWS_AS(dephasing_time(DephasingTarget::polariton(jc, 4), e), std::invalid_argument);
}
