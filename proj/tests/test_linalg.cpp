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
#include "uqdp/linalg.hpp"
#include "uqdp/model.hpp"

using namespace uqdp;
using namespace uqdp::testing;

TEST_CASE("pauli_operator: single-site conventions") {
  const ComplexMatrix z = pauli_operator({PauliAxis::Z, 0}, 1);
  CHECK(max_abs_diff(z, ComplexMatrix{{1, 0}, {0, -1}}) == 0.0);

  const ComplexMatrix x2 = pauli_operator({PauliAxis::X, 1}, 2);
  CHECK(max_abs_diff(x2 * x2, ComplexMatrix::identity(4)) < 1e-15);
  // swaps the second qubit: |up up> <-> |up down>
  CHECK(std::abs(x2(1, 0) - 1.0) < 1e-15);
  CHECK(std::abs(x2(3, 2) - 1.0) < 1e-15);

  const ComplexMatrix y1 = pauli_operator({PauliAxis::Y, 0}, 2);
  CHECK(max_abs_diff(y1 * y1, ComplexMatrix::identity(4)) < 1e-15);
  CHECK(std::abs(y1.trace()) < 1e-15);

  CHECK_THROWS_AS(pauli_operator({PauliAxis::X, 2}, 2), std::out_of_range);
}

TEST_CASE("Pauli algebra holds for every site") {
  const cplx i{0.0, 1.0};
  for (std::size_t n = 1; n <= 3; ++n) {
    for (std::size_t s = 0; s < n; ++s) {
      const auto x = pauli_operator({PauliAxis::X, s}, n);
      const auto y = pauli_operator({PauliAxis::Y, s}, n);
      const auto z = pauli_operator({PauliAxis::Z, s}, n);
      const auto id = ComplexMatrix::identity(std::size_t{1} << n);
      CHECK(max_abs_diff(x * x, id) < 1e-14);
      CHECK(max_abs_diff(y * y, id) < 1e-14);
      CHECK(max_abs_diff(z * z, id) < 1e-14);
      CHECK(max_abs_diff(x * y, i * z) < 1e-14);
      CHECK(max_abs_diff(y * z, i * x) < 1e-14);
      CHECK(max_abs_diff(z * x, i * y) < 1e-14);
      CHECK(x.is_hermitian());
    }
  }
}

TEST_CASE("eigendecompose_hermitian: simple spectra") {
  const std::array<double, 3> d{3.0, 1.0, 2.0};
  const EigenSystem e = eigendecompose_hermitian(ComplexMatrix::diagonal(d));
  CHECK(e.values[0] == doctest::Approx(1.0));
  CHECK(e.values[1] == doctest::Approx(2.0));
  CHECK(e.values[2] == doctest::Approx(3.0));

  const EigenSystem x = eigendecompose_hermitian(pauli_matrix(PauliAxis::X));
  CHECK(x.values[0] == doctest::Approx(-1.0));
  CHECK(x.values[1] == doctest::Approx(1.0));
  const double r = std::sqrt(0.5);
  CHECK(phase_free_distance(x.vector(0), StateVector{r, -r}) < 1e-12);
  CHECK(phase_free_distance(x.vector(1), StateVector{r, r}) < 1e-12);
}

TEST_CASE("eigendecompose_hermitian: pair Hamiltonian against closed forms") {
  const double E_z = 1.0, E_m = 0.5;
  const EigenSystem e = eigendecompose_hermitian(build_pair_hamiltonian(UqdpPairSpec::x_coupled(E_z, E_m)));
  const double big = std::sqrt(4.0 * E_z * E_z + E_m * E_m);
  CHECK(e.values[0] == doctest::Approx(-big).epsilon(1e-13));
  CHECK(e.values[1] == doctest::Approx(-E_m).epsilon(1e-13));
  CHECK(e.values[2] == doctest::Approx(E_m).epsilon(1e-13));
  CHECK(e.values[3] == doctest::Approx(big).epsilon(1e-13));
  // |3> = (|ud> - |du>)/sqrt2 carries -E_m
  const double r = std::sqrt(0.5);
  CHECK(phase_free_distance(e.vector(1), StateVector{0, r, -r, 0}) < 1e-12);
}

TEST_CASE("eigendecompose_hermitian: random reconstruction property") {
  std::mt19937_64 rng(20260101);
  for (int trial = 0; trial < 120; ++trial) {
    const std::size_t n = 1 + trial % 16;
    const ComplexMatrix h = random_hermitian(n, rng);
    const EigenSystem e = eigendecompose_hermitian(h);
    const double scale = h.norm_max();
    const ComplexMatrix rebuilt = e.vectors * ComplexMatrix::diagonal(e.values) * e.vectors.adjoint();
    CHECK(max_abs_diff(rebuilt, h) < 1e-10 * scale);
    CHECK(max_abs_diff(e.vectors.adjoint() * e.vectors, ComplexMatrix::identity(n)) < 1e-10);
    for (std::size_t k = 0; k < n; ++k) {
      const StateVector v = e.vector(k);
      CHECK((h * v - cplx{e.values[k]} * v).norm() < 1e-10 * scale);
      if (k > 0) CHECK(e.values[k] >= e.values[k - 1]);
    }
  }
}

TEST_CASE("eigendecompose_hermitian: degenerate clusters stay orthonormal") {
  const ComplexMatrix h = pauli_operator({PauliAxis::Z, 0}, 3) + pauli_operator({PauliAxis::Z, 1}, 3);
  const EigenSystem e = eigendecompose_hermitian(h);
  CHECK(max_abs_diff(e.vectors.adjoint() * e.vectors, ComplexMatrix::identity(8)) < 1e-12);
}

TEST_CASE("eigendecompose_hermitian: rejects bad input") {
  CHECK_THROWS_AS(eigendecompose_hermitian(ComplexMatrix{{0, 1}, {0, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(eigendecompose_hermitian(ComplexMatrix(2, 3)), std::invalid_argument);
  CHECK_THROWS_AS(eigendecompose_hermitian(ComplexMatrix::identity(65)), std::invalid_argument);
}

TEST_CASE("project: identity, linearity and dimension checks") {
  const double r = std::sqrt(0.5);
  const std::array<StateVector, 2> basis{StateVector{0, r, -r, 0}, StateVector{0, -r, -r, 0}};
  CHECK(max_abs_diff(project(ComplexMatrix::identity(4), basis), ComplexMatrix::identity(2)) < 1e-15);

  std::mt19937_64 rng(7);
  const ComplexMatrix a = random_hermitian(4, rng), b = random_hermitian(4, rng);
  const cplx ca{0.3, -1.2}, cb{2.0, 0.5};
  const ComplexMatrix lhs = project(ca * a + cb * b, basis);
  const ComplexMatrix rhs = ca * project(a, basis) + cb * project(b, basis);
  CHECK(max_abs_diff(lhs, rhs) < 1e-12);

  const std::array<StateVector, 1> wrong{StateVector{1, 0}};
  CHECK_THROWS_AS(project(ComplexMatrix::identity(4), wrong), std::invalid_argument);
}

TEST_CASE("expm_hermitian matches the Pauli rotation formula") {
  const double t = 0.37;
  const ComplexMatrix u = expm_hermitian(pauli_matrix(PauliAxis::Y), t);
  ComplexMatrix expected = std::cos(t) * ComplexMatrix::identity(2);
  expected.add_scaled(pauli_matrix(PauliAxis::Y), cplx{0.0, -std::sin(t)});
  CHECK(max_abs_diff(u, expected) < 1e-14);
  CHECK(u.is_unitary());
}

TEST_CASE("kron ordering puts site 0 leftmost") {
  const ComplexMatrix zi = kron(pauli_matrix(PauliAxis::Z), ComplexMatrix::identity(2));
  CHECK(max_abs_diff(zi, pauli_operator({PauliAxis::Z, 0}, 2)) == 0.0);
}
