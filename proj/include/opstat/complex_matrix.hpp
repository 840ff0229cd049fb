#pragma once

#include <complex>
#include <initializer_list>
#include <vector>

namespace opstat {

using cplx = std::complex<double>;

// Dense complex matrix, row-major. Entries are validated finite at
// construction time. Square matrices are the common case (operators); the
// rectangular form exists for Kraus operators and eigenvector slices.
//
// The max-norm used throughout ("||.||_max") is the largest |Re| or |Im|
// over all entries; tolerances in tolerances.hpp are stated against it.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;  // empty placeholder (0x0), for containers only
  ComplexMatrix(int rows, int cols);  // zero-filled
  ComplexMatrix(int rows, int cols, std::vector<cplx> entries);

  // Row-major square matrix from a flat initializer list.
  static ComplexMatrix square(int dim, std::initializer_list<cplx> entries);
  static ComplexMatrix identity(int n);
  static ComplexMatrix zero(int n) { return ComplexMatrix(n, n); }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }
  int dim() const;  // throws unless square

  cplx& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
  const cplx& operator()(int i, int j) const {
    return data_[static_cast<std::size_t>(i) * cols_ + j];
  }
  const cplx* data() const { return data_.data(); }
  cplx* data() { return data_.data(); }
  const double* raw() const { return reinterpret_cast<const double*>(data_.data()); }
  double* raw() { return reinterpret_cast<double*>(data_.data()); }
  std::size_t size() const { return data_.size(); }

  ComplexMatrix adjoint() const;
  cplx trace() const;
  double max_abs() const;
  double frobenius_norm() const;
  bool is_finite() const;

  ComplexMatrix& operator+=(const ComplexMatrix& rhs);
  ComplexMatrix& operator-=(const ComplexMatrix& rhs);
  ComplexMatrix& operator*=(cplx scalar);

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) {
    a += b;
    return a;
  }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) {
    a -= b;
    return a;
  }
  friend ComplexMatrix operator*(ComplexMatrix a, cplx s) {
    a *= s;
    return a;
  }
  friend ComplexMatrix operator*(cplx s, ComplexMatrix a) {
    a *= s;
    return a;
  }
  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<cplx> data_;
};

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

// Kronecker (tensor) product.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

// y = M v
std::vector<cplx> matvec(const ComplexMatrix& m, const std::vector<cplx>& v);

// <a | b>, conjugate-linear in the first argument.
cplx vdot(const std::vector<cplx>& a, const std::vector<cplx>& b);

double vec_norm(const std::vector<cplx>& v);

// P = W W^dagger for a rows x r slice of orthonormal columns.
ComplexMatrix gram_outer(const ComplexMatrix& w);

}  // namespace opstat
