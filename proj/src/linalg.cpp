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

#include "uqdp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace uqdp {

namespace {

constexpr std::size_t kMaxEigenDim = 64;
constexpr int kMaxJacobiSweeps = 100;

void require_same_shape(const ComplexMatrix& a, const ComplexMatrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument(std::string(what) + ": shape mismatch");
  }
}

double off_diagonal_norm(const ComplexMatrix& m) {
  double s = 0.0;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (r != c) s += std::norm(m(r, c));
    }
  }
  return std::sqrt(s);
}

}  // namespace

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols) {}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& row : rows) {
    if (row.size() != cols_) throw std::invalid_argument("ComplexMatrix: ragged initializer");
    data_.insert(data_.end(), row.begin(), row.end());
  }
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> values) {
  ComplexMatrix m(values.size(), values.size());
  for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
  return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) out(c, r) = std::conj((*this)(r, c));
  }
  return out;
}

cplx ComplexMatrix::trace() const {
  cplx t = 0.0;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
  return t;
}

double ComplexMatrix::norm_max() const {
  double m = 0.0;
  for (const auto& z : data_) m = std::max(m, std::abs(z));
  return m;
}

double ComplexMatrix::norm_frobenius() const {
  double s = 0.0;
  for (const auto& z : data_) s += std::norm(z);
  return std::sqrt(s);
}

bool ComplexMatrix::is_hermitian(double rel_tol) const {
  if (!is_square()) return false;
  const double scale = std::max(norm_max(), 1e-300);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = r; c < cols_; ++c) {
      if (std::abs((*this)(r, c) - std::conj((*this)(c, r))) > rel_tol * scale) return false;
    }
  }
  return true;
}

bool ComplexMatrix::is_unitary(double tol) const {
  if (!is_square()) return false;
  return max_abs_diff(adjoint() * (*this), identity(rows_)) < tol;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
  require_same_shape(*this, other, "operator+=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
  require_same_shape(*this, other, "operator-=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cplx scale) {
  for (auto& z : data_) z *= scale;
  return *this;
}

void ComplexMatrix::add_scaled(const ComplexMatrix& other, cplx scale) {
  require_same_shape(*this, other, "add_scaled");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += scale * other.data_[i];
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }
ComplexMatrix operator*(ComplexMatrix a, cplx s) { return a *= s; }

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matrix product: inner dimension mismatch");
  ComplexMatrix out(a.rows(), b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const cplx ark = a(r, k);
      if (ark == cplx{}) continue;
      for (std::size_t c = 0; c < b.cols(); ++c) out(r, c) += ark * b(k, c);
    }
  }
  return out;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t ar = 0; ar < a.rows(); ++ar) {
    for (std::size_t ac = 0; ac < a.cols(); ++ac) {
      const cplx s = a(ar, ac);
      if (s == cplx{}) continue;
      for (std::size_t br = 0; br < b.rows(); ++br) {
        for (std::size_t bc = 0; bc < b.cols(); ++bc) {
          out(ar * b.rows() + br, ac * b.cols() + bc) = s * b(br, bc);
        }
      }
    }
  }
  return out;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_shape(a, b, "max_abs_diff");
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

StateVector StateVector::basis(std::size_t dim, std::size_t index) {
  if (index >= dim) throw std::out_of_range("StateVector::basis: index out of range");
  StateVector v(dim);
  v[index] = 1.0;
  return v;
}

double StateVector::norm() const {
  double s = 0.0;
  for (const auto& z : amplitudes_) s += std::norm(z);
  return std::sqrt(s);
}

StateVector StateVector::normalized() const {
  const double n = norm();
  if (n == 0.0) throw std::invalid_argument("cannot normalise the zero vector");
  StateVector out = *this;
  out *= 1.0 / n;
  return out;
}

StateVector& StateVector::operator+=(const StateVector& other) {
  if (other.dim() != dim()) throw std::invalid_argument("StateVector: dimension mismatch");
  for (std::size_t i = 0; i < dim(); ++i) amplitudes_[i] += other.amplitudes_[i];
  return *this;
}

StateVector& StateVector::operator*=(cplx s) {
  for (auto& z : amplitudes_) z *= s;
  return *this;
}

StateVector operator+(StateVector a, const StateVector& b) { return a += b; }
StateVector operator-(StateVector a, const StateVector& b) { return a += (-1.0) * b; }
StateVector operator*(cplx s, StateVector a) { return a *= s; }

StateVector operator*(const ComplexMatrix& m, const StateVector& v) {
  if (m.cols() != v.dim()) throw std::invalid_argument("matrix-vector product: dimension mismatch");
  StateVector out(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    cplx s = 0.0;
    for (std::size_t c = 0; c < m.cols(); ++c) s += m(r, c) * v[c];
    out[r] = s;
  }
  return out;
}

cplx inner(const StateVector& a, const StateVector& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("inner: dimension mismatch");
  cplx s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

ComplexMatrix outer(const StateVector& a, const StateVector& b) {
  ComplexMatrix m(a.dim(), b.dim());
  for (std::size_t r = 0; r < a.dim(); ++r) {
    for (std::size_t c = 0; c < b.dim(); ++c) m(r, c) = a[r] * std::conj(b[c]);
  }
  return m;
}

StateVector column(const ComplexMatrix& m, std::size_t k) {
  StateVector v(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) v[r] = m(r, k);
  return v;
}

ComplexMatrix from_columns(std::span<const StateVector> cols) {
  if (cols.empty()) return {};
  ComplexMatrix m(cols.front().dim(), cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (cols[c].dim() != m.rows()) throw std::invalid_argument("from_columns: dimension mismatch");
    for (std::size_t r = 0; r < m.rows(); ++r) m(r, c) = cols[c][r];
  }
  return m;
}

ComplexMatrix pauli_matrix(PauliAxis axis) {
  using namespace std::complex_literals;
  switch (axis) {
    case PauliAxis::I: return {{1.0, 0.0}, {0.0, 1.0}};
    case PauliAxis::X: return {{0.0, 1.0}, {1.0, 0.0}};
    case PauliAxis::Y: return {{0.0, -1i}, {1i, 0.0}};
    case PauliAxis::Z: return {{1.0, 0.0}, {0.0, -1.0}};
  }
  throw std::invalid_argument("unknown Pauli axis");
}

ComplexMatrix pauli_operator(PauliLabel label, std::size_t n_qubits) {
  if (label.site >= n_qubits) {
    throw std::out_of_range("pauli_operator: site " + std::to_string(label.site) +
                            " out of range for " + std::to_string(n_qubits) + " qubits");
  }
  ComplexMatrix out = ComplexMatrix::identity(1);
  for (std::size_t s = 0; s < n_qubits; ++s) {
    out = kron(out, pauli_matrix(s == label.site ? label.axis : PauliAxis::I));
  }
  return out;
}

EigenSystem eigendecompose_hermitian(const ComplexMatrix& h) {
  if (!h.is_square()) throw std::invalid_argument("eigendecompose_hermitian: matrix not square");
  if (h.rows() > kMaxEigenDim) throw std::invalid_argument("eigendecompose_hermitian: dimension exceeds 64");
  if (!h.is_hermitian(1e-12)) throw std::invalid_argument("eigendecompose_hermitian: matrix not Hermitian");

  const std::size_t n = h.rows();
  ComplexMatrix a = h;
  ComplexMatrix w = ComplexMatrix::identity(n);
  for (std::size_t i = 0; i < n; ++i) a(i, i) = a(i, i).real();

  const double scale = std::max(h.norm_frobenius(), 1e-300);
  for (int sweep = 0; sweep < kMaxJacobiSweeps; ++sweep) {
    if (off_diagonal_norm(a) <= 1e-15 * scale) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const cplx b = a(p, q);
        const double g = std::abs(b);
        if (g <= 1e-300) continue;
        // V = diag(1, e^{-i arg b}) * [[c, s], [-s, c]] zeroes a(p,q).
        const cplx phase = std::conj(b) / g;
        const double theta = 0.5 * std::atan2(2.0 * g, a(q, q).real() - a(p, p).real());
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        const cplx vpp = c, vpq = s, vqp = -s * phase, vqq = c * phase;

        for (std::size_t k = 0; k < n; ++k) {
          const cplx akp = a(k, p), akq = a(k, q);
          a(k, p) = akp * vpp + akq * vqp;
          a(k, q) = akp * vpq + akq * vqq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const cplx apk = a(p, k), aqk = a(q, k);
          a(p, k) = std::conj(vpp) * apk + std::conj(vqp) * aqk;
          a(q, k) = std::conj(vpq) * apk + std::conj(vqq) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        for (std::size_t k = 0; k < n; ++k) {
          const cplx wkp = w(k, p), wkq = w(k, q);
          w(k, p) = wkp * vpp + wkq * vqp;
          w(k, q) = wkp * vpq + wkq * vqq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });

  EigenSystem out;
  out.values.resize(n);
  out.vectors = ComplexMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]).real();
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = w(r, order[k]);
  }

  // Re-orthogonalise inside degenerate clusters (modified Gram-Schmidt).
  const double gap_tol = 1e-9 * std::max(h.norm_max(), 1e-300);
  std::size_t start = 0;
  while (start < n) {
    std::size_t stop = start + 1;
    while (stop < n && out.values[stop] - out.values[stop - 1] < gap_tol) ++stop;
    if (stop - start > 1) {
      for (std::size_t k = start; k < stop; ++k) {
        for (std::size_t j = start; j < k; ++j) {
          cplx ov = 0.0;
          for (std::size_t r = 0; r < n; ++r) ov += std::conj(out.vectors(r, j)) * out.vectors(r, k);
          for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) -= ov * out.vectors(r, j);
        }
        double nn = 0.0;
        for (std::size_t r = 0; r < n; ++r) nn += std::norm(out.vectors(r, k));
        nn = std::sqrt(nn);
        for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) /= nn;
      }
    }
    start = stop;
  }
  return out;
}

ComplexMatrix project(const ComplexMatrix& op, std::span<const StateVector> basis) {
  if (!op.is_square()) throw std::invalid_argument("project: operator not square");
  for (const auto& b : basis) {
    if (b.dim() != op.rows()) throw std::invalid_argument("project: basis dimension does not match operator");
  }
  const std::size_t k = basis.size();
  ComplexMatrix out(k, k);
  for (std::size_t j = 0; j < k; ++j) {
    const StateVector opb = op * basis[j];
    for (std::size_t i = 0; i < k; ++i) out(i, j) = inner(basis[i], opb);
  }
  return out;
}

ComplexMatrix expm_hermitian(const EigenSystem& eig, double t) {
  const std::size_t n = eig.values.size();
  ComplexMatrix out(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const cplx ph = std::polar(1.0, -eig.values[k] * t);
    for (std::size_t r = 0; r < n; ++r) {
      const cplx vr = eig.vectors(r, k) * ph;
      for (std::size_t c = 0; c < n; ++c) out(r, c) += vr * std::conj(eig.vectors(c, k));
    }
  }
  return out;
}

ComplexMatrix expm_hermitian(const ComplexMatrix& h, double t) {
  return expm_hermitian(eigendecompose_hermitian(h), t);
}

}  // namespace uqdp
