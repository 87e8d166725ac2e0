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

#include <array>
#include <cmath>
#include <random>

#include "test_support.hpp"
#include "uqdp/model.hpp"

using namespace uqdp;
using namespace uqdp::testing;

namespace {

ComplexMatrix pair_op(PauliAxis a, std::size_t site) { return pauli_operator({a, site}, 2); }

/// min over diagonal sign gauges D of max |D m D - expected|.
double gauge_free_distance(const ComplexMatrix& m, const ComplexMatrix& expected) {
  const std::size_t n = m.rows();
  double best = 1e300;
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const double si = (mask >> i) & 1 ? -1.0 : 1.0;
        const double sj = (mask >> j) & 1 ? -1.0 : 1.0;
        worst = std::max(worst, std::abs(si * sj * m(i, j) - expected(i, j)));
      }
    }
    best = std::min(best, worst);
  }
  return best;
}

}  // namespace

TEST_CASE("build_pair_hamiltonian: uncoupled Zeeman ladder") {
  const ComplexMatrix h = build_pair_hamiltonian(UqdpPairSpec{.E_z = 1.0});
  const std::array<double, 4> d{2.0, 0.0, 0.0, -2.0};
  CHECK(max_abs_diff(h, ComplexMatrix::diagonal(d)) == 0.0);
}

TEST_CASE("build_pair_hamiltonian: encoded energies") {
  const EigenSystem e = eigendecompose_hermitian(build_pair_hamiltonian(UqdpPairSpec::x_coupled(1.0, 0.5)));
  CHECK(e.values[1] == doctest::Approx(-0.5).epsilon(1e-13));
  CHECK(e.values[2] == doctest::Approx(0.5).epsilon(1e-13));

  const UqdpPairSpec iso = UqdpPairSpec::isotropic(1.0, 0.4, 0.3);
  const EncodedSubspace enc = encoded_subspace(iso);
  CHECK(enc.energy3 == doctest::Approx(-0.64).epsilon(1e-13));
  CHECK(enc.energy4 == doctest::Approx(0.4).epsilon(1e-13));
}

TEST_CASE("validity flag and protection errors") {
  CHECK(UqdpPairSpec::x_coupled(1.0, 0.3).uqdp_valid());
  CHECK(UqdpPairSpec{.E_z = 1.0, .E_my = 0.2}.uqdp_valid());
  CHECK_FALSE(UqdpPairSpec{.E_z = 1.0, .E_mz = 0.2}.uqdp_valid());
  CHECK_THROWS_WITH_AS(encoded_subspace(UqdpPairSpec{.E_z = 1.0, .E_mz = 0.2}),
                       doctest::Contains("no protected subspace"), std::invalid_argument);
}

TEST_CASE("encoded subspace: vanishing matrix elements and mixing angle") {
  const UqdpPairSpec spec = UqdpPairSpec::x_coupled(1.0, 0.5);
  const EncodedSubspace enc = encoded_subspace(spec);
  CHECK(enc.residual_z1 == doctest::Approx(0.0));
  CHECK(enc.splitting == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(std::cos(enc.mixing_angle) == doctest::Approx(2.0 / std::sqrt(4.25)).epsilon(1e-14));
  const auto basis = enc.basis();
  CHECK(max_abs_diff(project(pair_op(PauliAxis::Z, 0), basis), -1.0 * pauli_matrix(PauliAxis::X)) < 1e-12);
  CHECK(max_abs_diff(project(pair_op(PauliAxis::Z, 1), basis), pauli_matrix(PauliAxis::X)) < 1e-12);
  const ComplexMatrix xx = pair_op(PauliAxis::X, 0) * pair_op(PauliAxis::X, 1);
  CHECK(max_abs_diff(project(xx, basis), -1.0 * pauli_matrix(PauliAxis::Z)) < 1e-12);
  CHECK(max_abs_diff(enc.projector * enc.projector, enc.projector) < 1e-14);
}

TEST_CASE("encoded subspace: random UQDP parameters") {
  std::mt19937_64 rng(314);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    UqdpPairSpec spec{.E_z = std::abs(u(rng)) + 0.1, .E_mx = u(rng), .E_my = u(rng)};
    if (trial % 3 == 0) spec.E_mz = u(rng);
    if (!spec.uqdp_valid()) continue;
    const EncodedSubspace enc = encoded_subspace(spec);
    for (PauliAxis a : {PauliAxis::X, PauliAxis::Y, PauliAxis::Z}) {
      for (std::size_t j = 0; j < 2; ++j) {
        const ComplexMatrix op = pair_op(a, j);
        CHECK(std::abs(inner(enc.state3, op * enc.state3)) < 1e-12);
        CHECK(std::abs(inner(enc.state4, op * enc.state4)) < 1e-12);
        if (a != PauliAxis::Z) CHECK(std::abs(inner(enc.state3, op * enc.state4)) < 1e-12);
      }
    }
  }
}

TEST_CASE("eigenbasis matrices of sigma_z1 and sigma_y2") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.05, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    const UqdpPairSpec spec = UqdpPairSpec::x_coupled(1.0, u(rng));
    const PairEigenbasis eb = pair_eigenbasis(spec);
    const double th = std::atan2(spec.E_mx, 2.0 * spec.E_z);
    const double c = std::cos(th), s = std::sin(th);
    const ComplexMatrix z1{{-c, -s, 0, 0}, {-s, c, 0, 0}, {0, 0, 0, -1}, {0, 0, -1, 0}};
    CHECK(max_abs_diff(project(pair_op(PauliAxis::Z, 0), eb.states), z1) < 1e-12);

    const double phi = th / 2.0 + kPi / 4.0;
    const double cp = std::cos(phi), sp = std::sin(phi);
    const cplx i{0.0, 1.0};
    const ComplexMatrix y2 = i * ComplexMatrix{{0, 0, cp, sp}, {0, 0, sp, -cp}, {-cp, -sp, 0, 0}, {-sp, cp, 0, 0}};
    CHECK(gauge_free_distance(project(pair_op(PauliAxis::Y, 1), eb.states), y2) < 1e-12);

    // state-preparation element |<3|sigma_x1|1>| = sin(theta/2 + pi/4)
    CHECK(std::abs(inner(eb.states[2], pair_op(PauliAxis::X, 0) * eb.states[0])) ==
          doctest::Approx(std::abs(sp)).epsilon(1e-13));
    // the ground state is |1>
    CHECK(eb.energies[0] == doctest::Approx(-std::sqrt(4.0 + spec.E_mx * spec.E_mx)).epsilon(1e-13));
  }
}

TEST_CASE("encoded subspace: parameter spread residuals") {
  const UqdpPairSpec spec = UqdpPairSpec::x_coupled(1.0, 0.5, 0.95);
  const EncodedSubspace enc = encoded_subspace(spec);
  const double E_e = std::sqrt(0.05 * 0.05 + 0.25);
  CHECK(enc.residual_z1 == doctest::Approx(-0.05 / E_e).epsilon(1e-10));
  CHECK(enc.residual_z1 == doctest::Approx(-0.0995037).epsilon(1e-6));
  CHECK(enc.residual_z2 == doctest::Approx(0.05 / E_e).epsilon(1e-10));
  CHECK(inner(enc.state4, pair_op(PauliAxis::Z, 0) * enc.state4).real() == doctest::Approx(0.05 / E_e).epsilon(1e-10));
  CHECK(enc.energy3 == doctest::Approx(-E_e).epsilon(1e-13));
  CHECK(enc.energy4 == doctest::Approx(E_e).epsilon(1e-13));
  CHECK(std::abs(enc.spread_rotation) == doctest::Approx(0.5 * std::asin(0.05 / E_e)).epsilon(1e-12));

  for (double a0 = 0.95; a0 <= 1.05 + 1e-12; a0 += 0.01) {
    const EncodedSubspace e = encoded_subspace(UqdpPairSpec::x_coupled(1.0, 0.5, a0));
    const double ee = std::sqrt((1 - a0) * (1 - a0) + 0.25);
    CHECK(std::abs(e.residual_z1 + (1 - a0) / ee) < 1e-10);
    CHECK(std::abs(inner(e.state4, pair_op(PauliAxis::Z, 0) * e.state4).real() - (1 - a0) / ee) < 1e-10);
  }
}

TEST_CASE("encoded subspace: degenerate uncoupled limit") {
  const EncodedSubspace enc = encoded_subspace(UqdpPairSpec{.E_z = 1.0}, SubspacePolicy::AllowUnprotected);
  CHECK(enc.splitting == doctest::Approx(0.0));
  ComplexMatrix sector(4, 4);
  sector(1, 1) = 1.0;
  sector(2, 2) = 1.0;
  CHECK(max_abs_diff(enc.projector, sector) < 1e-12);
  const EncodedSubspace tiny = encoded_subspace(UqdpPairSpec::x_coupled(1.0, 1e-9));
  CHECK(tiny.splitting == doctest::Approx(2e-9).epsilon(1e-6));
  CHECK(max_abs_diff(tiny.projector, sector) < 1e-12);
}

TEST_CASE("noise coupling operators") {
  const NoiseSpectrum spec = default_spectrum(1.0, kPi / 4);
  const FrequencyGrid grid = make_frequency_grid(spec);
  const NoiseCoupling silent(2, {NoiseTrajectory::silent({NoiseAxis::X, 0}), NoiseTrajectory::silent({NoiseAxis::Z, 1})});
  CHECK(silent.operator_at(0.3).norm_max() == 0.0);

  const NoiseTrajectory x1 = sample_trajectory(spec, grid, {NoiseAxis::X, 0}, 1);
  CHECK_THROWS_WITH_AS(NoiseCoupling(2, {x1, x1}), doctest::Contains("duplicate"), std::invalid_argument);
  CHECK_THROWS_AS(NoiseCoupling(1, {sample_trajectory(spec, grid, {NoiseAxis::Z, 1}, 1)}), std::invalid_argument);

  const NoiseCoupling one(2, {x1});
  CHECK(max_abs_diff(one.operator_at(0.1), x1.value(0.1) * pair_op(PauliAxis::X, 0)) < 1e-18);

  // equal z noise on both qubits cancels inside the encoded subspace
  const NoiseTrajectory za = sample_trajectory(spec, grid, {NoiseAxis::Z, 0}, 5);
  const NoiseTrajectory zb(NoiseChannel{NoiseAxis::Z, 1}, std::vector<double>(za.omega().begin(), za.omega().end()),
                           std::vector<double>(za.omega().size(), 1.0),
                           std::vector<double>(za.coefficient().begin(), za.coefficient().end()),
                           std::vector<double>(za.phase().begin(), za.phase().end()));
  const NoiseCoupling equal(2, {za, zb});
  const EncodedSubspace enc = encoded_subspace(UqdpPairSpec::x_coupled(1.0, 0.5));
  CHECK(project(equal.operator_at(0.2), enc.basis()).norm_max() < 1e-12 * std::abs(za.value(0.2)) + 1e-300);
}

TEST_CASE("effective encoded Hamiltonian") {
  const UqdpPairSpec spec = UqdpPairSpec::x_coupled(1.0, 0.5);
  const ComplexMatrix z = pauli_matrix(PauliAxis::Z);
  CHECK(effective_z_coefficient(1.0, 0.5, 0, 0, 0, 0) == -0.5);
  const double v = 0.01, w = 0.02;
  CHECK(effective_z_coefficient(1.0, 0.5, v, v, 0, 0) == doctest::Approx(-0.5 + 0.5 * v * v).epsilon(1e-15));
  CHECK(effective_z_coefficient(1.0, 0.5, 0, 0, w, -w) == doctest::Approx(-0.5 - 2.0 * w * w / 0.5).epsilon(1e-15));

  const NoiseCoupling none(2, {});
  CHECK(max_abs_diff(effective_encoded_hamiltonian(spec, none, 0.0), -0.5 * z) == 0.0);
  CHECK_THROWS_AS(effective_encoded_hamiltonian(UqdpPairSpec::x_coupled(1.0, 0.0), none, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(effective_encoded_hamiltonian(UqdpPairSpec::isotropic(1.0, 0.5, 0.2), none, 0.0),
                  std::invalid_argument);

  // second-order oracle: exact splitting shift of the static noisy pair
  const double x1 = 3e-3, x2 = -2e-3, z1 = 1e-3, z2 = -4e-3;
  ComplexMatrix h = build_pair_hamiltonian(spec);
  h.add_scaled(pair_op(PauliAxis::X, 0), x1);
  h.add_scaled(pair_op(PauliAxis::X, 1), x2);
  h.add_scaled(pair_op(PauliAxis::Z, 0), z1);
  h.add_scaled(pair_op(PauliAxis::Z, 1), z2);
  const EigenSystem e = eigendecompose_hermitian(h);
  const double exact_shift = (e.values[2] - e.values[1]) - 1.0;
  const double second_order = -2.0 * (effective_z_coefficient(1.0, 0.5, x1, x2, z1, z2) + 0.5);
  CHECK(std::abs(exact_shift - second_order) < 0.02 * std::abs(second_order));
}

TEST_CASE("flux mapping") {
  const FluxMapping f{.E_J = 40.0, .r1 = 5.0};
  CHECK(f.noise_amplitude(1e-6) == doctest::Approx(2e-4));
  CHECK(f.flux_amplitude(f.noise_amplitude(3e-6)) == doctest::Approx(3e-6));
}

TEST_CASE("drive terms") {
  const DriveTerm d{.op = pauli_matrix(PauliAxis::X), .amplitude = 0.5, .omega = 2.0, .phase = 0.3, .t_start = 1.0, .t_stop = 2.0};
  CHECK(d.coefficient(0.5) == 0.0);
  CHECK(d.coefficient(1.5) == doctest::Approx(std::cos(3.3)));
  CHECK(DriveTerm::constant(pauli_matrix(PauliAxis::Z), 0.7).coefficient(10.0) == doctest::Approx(0.7));
}

TEST_CASE("Jaynes-Cummings doublets") {
  const JaynesCummingsSpec spec{.omega0 = 2.0, .E_z = 1.0, .J = 0.05, .n_max = 6};
  const JaynesCummingsSystem sys = jaynes_cummings_system(spec);
  CHECK(sys.dim() == 14);
  CHECK(sys.doublet_splitting(1) == doctest::Approx(2.0 * spec.J).epsilon(1e-12));
  for (std::size_t n = 1; n <= spec.n_max; ++n) {
    CHECK(std::abs(sys.doublet_splitting(n) - 2.0 * spec.J * std::sqrt(double(n))) < 1e-12);
    for (int a = 0; a < 2; ++a) {
      const StateVector& d = sys.doublet(n, a);
      CHECK((sys.hamiltonian * d - cplx{sys.doublet_energies[n - 1][a]} * d).norm() < 1e-12);
    }
  }
  for (std::size_t m = 1; m <= spec.n_max; ++m) {
    for (std::size_t n = 1; n <= spec.n_max; ++n) {
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
          const StateVector& l = sys.doublet(m, a);
          const StateVector& r = sys.doublet(n, b);
          const double sab = (a + b) % 2 == 0 ? 1.0 : -1.0;
          const double z = m == n ? (-1.0 + sab) / 2.0 : 0.0;
          CHECK(std::abs(inner(l, sys.sigma_z * r) - z) < 1e-12);
          const double sp = m == n + 1 ? (a == 0 ? 0.5 : -0.5) : 0.0;
          CHECK(std::abs(inner(l, sys.sigma_plus * r) - sp) < 1e-12);
          const double ad = m == n + 1 ? (std::sqrt(double(n + 1)) + sab * std::sqrt(double(n))) / 2.0 : 0.0;
          CHECK(std::abs(inner(l, sys.a_dag * r) - ad) < 1e-12);
        }
      }
    }
  }
  const JaynesCummingsSystem flat = jaynes_cummings_system({.omega0 = 2.0, .E_z = 1.0, .J = 0.0, .n_max = 4});
  CHECK(flat.doublet_splitting(1) == 0.0);
  CHECK_THROWS_AS(jaynes_cummings_system({.omega0 = 2.1, .E_z = 1.0, .J = 0.1, .n_max = 4}), std::invalid_argument);
  CHECK(build_jc_hamiltonian({.omega0 = 2.1, .E_z = 1.0, .J = 0.1, .n_max = 4}).rows() == 10);
  CHECK_THROWS_AS(build_jc_hamiltonian({.omega0 = 2.0, .E_z = 1.0, .J = 0.1, .n_max = 1}), std::invalid_argument);
}

TEST_CASE("two encoded qubits") {
  const UqdpPairSpec a = UqdpPairSpec::x_coupled(1.0, 1.0), b = UqdpPairSpec::x_coupled(1.0, 0.4);
  const TwoEncodedQubitSystem off = two_encoded_qubit_system(a, b, 0.0, 0.0);
  const ComplexMatrix id = ComplexMatrix::identity(4);
  CHECK(max_abs_diff(off.h_static, kron(build_pair_hamiltonian(a), id) + kron(id, build_pair_hamiltonian(b))) == 0.0);

  const TwoEncodedQubitSystem sys = two_encoded_qubit_system(a, b, 0.06, 0.01);
  CHECK(sys.drive_omega == doctest::Approx(2.0 * (1.0 - 0.4)));
  const auto basis = sys.encoded_basis();
  const ComplexMatrix zz = pauli_operator({PauliAxis::Z, 1}, 4) * pauli_operator({PauliAxis::Z, 2}, 4);
  const ComplexMatrix x = pauli_matrix(PauliAxis::X);
  CHECK(max_abs_diff(project(zz, basis), -1.0 * kron(x, x)) < 1e-12);
  CHECK(max_abs_diff(project(pauli_operator({PauliAxis::Z, 1}, 4), basis), kron(x, ComplexMatrix::identity(2))) < 1e-12);
  CHECK(max_abs_diff(project(pauli_operator({PauliAxis::Z, 2}, 4), basis), -1.0 * kron(ComplexMatrix::identity(2), x)) < 1e-12);
  CHECK(sys.coupling.size() == 2);
}
