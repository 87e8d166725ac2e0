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

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace uqdp {

using cplx = std::complex<double>;

/// Dense row-major complex matrix for Hilbert spaces of a few dozen levels.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols);
  ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows);

  static ComplexMatrix identity(std::size_t n);
  static ComplexMatrix zero(std::size_t n) { return ComplexMatrix(n, n); }
  static ComplexMatrix diagonal(std::span<const double> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }

  cplx& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<cplx> data() { return data_; }
  std::span<const cplx> data() const { return data_; }

  ComplexMatrix adjoint() const;
  cplx trace() const;
  /// Largest entry modulus.
  double norm_max() const;
  double norm_frobenius() const;

  bool is_hermitian(double rel_tol = 1e-12) const;
  bool is_unitary(double tol = 1e-10) const;

  ComplexMatrix& operator+=(const ComplexMatrix& other);
  ComplexMatrix& operator-=(const ComplexMatrix& other);
  ComplexMatrix& operator*=(cplx scale);

  /// this += scale * other, without a temporary.
  void add_scaled(const ComplexMatrix& other, cplx scale);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator*(cplx s, ComplexMatrix a);
ComplexMatrix operator*(ComplexMatrix a, cplx s);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
/// max_ij |a_ij - b_ij|
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

class StateVector {
 public:
  StateVector() = default;
  explicit StateVector(std::size_t dim) : amplitudes_(dim) {}
  StateVector(std::initializer_list<cplx> amps) : amplitudes_(amps) {}
  explicit StateVector(std::vector<cplx> amps) : amplitudes_(std::move(amps)) {}

  /// Computational basis state |index>.
  static StateVector basis(std::size_t dim, std::size_t index);

  std::size_t dim() const { return amplitudes_.size(); }
  cplx& operator[](std::size_t i) { return amplitudes_[i]; }
  const cplx& operator[](std::size_t i) const { return amplitudes_[i]; }
  std::span<const cplx> amplitudes() const { return amplitudes_; }

  double norm() const;
  StateVector normalized() const;

  StateVector& operator+=(const StateVector& other);
  StateVector& operator*=(cplx s);

 private:
  std::vector<cplx> amplitudes_;
};

StateVector operator+(StateVector a, const StateVector& b);
StateVector operator-(StateVector a, const StateVector& b);
StateVector operator*(cplx s, StateVector a);
StateVector operator*(const ComplexMatrix& m, const StateVector& v);

/// <a|b>
cplx inner(const StateVector& a, const StateVector& b);
/// |a><b|
ComplexMatrix outer(const StateVector& a, const StateVector& b);

/// Column k of m as a state.
StateVector column(const ComplexMatrix& m, std::size_t k);
/// Matrix whose columns are the given states.
ComplexMatrix from_columns(std::span<const StateVector> cols);

enum class PauliAxis { I, X, Y, Z };

struct PauliLabel {
  PauliAxis axis = PauliAxis::I;
  std::size_t site = 0;
};

/// 2x2 Pauli matrix, sigma_z |up> = +|up> with |up> = index 0.
ComplexMatrix pauli_matrix(PauliAxis axis);

/// I (x) ... (x) sigma_axis (x) ... (x) I, site 0 being the leftmost factor.
/// Throws std::out_of_range when site >= n_qubits.
ComplexMatrix pauli_operator(PauliLabel label, std::size_t n_qubits);

struct EigenSystem {
  std::vector<double> values;  // ascending
  ComplexMatrix vectors;       // column k is the eigenvector of values[k]

  StateVector vector(std::size_t k) const { return column(vectors, k); }
};

/// Cyclic complex Jacobi diagonalisation. Throws std::invalid_argument for
/// non-square, non-Hermitian or oversized input.
EigenSystem eigendecompose_hermitian(const ComplexMatrix& h);

/// k x k matrix of <b_i|op|b_j>. Throws std::invalid_argument on dimension
/// mismatch.
ComplexMatrix project(const ComplexMatrix& op, std::span<const StateVector> basis);

/// exp(-i h t) for Hermitian h.
ComplexMatrix expm_hermitian(const ComplexMatrix& h, double t);
ComplexMatrix expm_hermitian(const EigenSystem& eig, double t);

}  // namespace uqdp
