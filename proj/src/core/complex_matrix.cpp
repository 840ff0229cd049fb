#include "opstat/complex_matrix.hpp"

#include <cmath>
#include <utility>

#include "opstat/errors.hpp"
#include "opstat/kernels.hpp"

namespace opstat {

ComplexMatrix::ComplexMatrix(int rows, int cols)
    : rows_(rows), cols_(cols),
      data_(static_cast<std::size_t>(rows > 0 ? rows : 0) * (cols > 0 ? cols : 0)) {
  if (rows < 1 || cols < 1)
    throw ValidationError("matrix dimensions must be >= 1");
}

ComplexMatrix::ComplexMatrix(int rows, int cols, std::vector<cplx> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (rows < 1 || cols < 1)
    throw ValidationError("matrix dimensions must be >= 1");
  if (data_.size() != static_cast<std::size_t>(rows) * cols)
    throw ValidationError("matrix entry count does not match dimensions");
  if (!is_finite())
    throw ValidationError("matrix contains non-finite entries");
}

ComplexMatrix ComplexMatrix::square(int dim, std::initializer_list<cplx> entries) {
  return ComplexMatrix(dim, dim, std::vector<cplx>(entries));
}

ComplexMatrix ComplexMatrix::identity(int n) {
  ComplexMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

int ComplexMatrix::dim() const {
  if (!is_square()) throw ValidationError("operation requires a square matrix");
  return rows_;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
  return out;
}

cplx ComplexMatrix::trace() const {
  cplx t = 0.0;
  const int n = dim();
  for (int i = 0; i < n; ++i) t += (*this)(i, i);
  return t;
}

double ComplexMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& z : data_) {
    const double re = std::fabs(z.real()), im = std::fabs(z.imag());
    if (re > m) m = re;
    if (im > m) m = im;
  }
  return m;
}

double ComplexMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const auto& z : data_) s += std::norm(z);
  return std::sqrt(s);
}

bool ComplexMatrix::is_finite() const {
  for (const auto& z : data_)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& rhs) {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
    throw ValidationError("matrix shape mismatch in addition");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += rhs.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& rhs) {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
    throw ValidationError("matrix shape mismatch in subtraction");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= rhs.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cplx scalar) {
  for (auto& z : data_) z *= scalar;
  return *this;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols_ != b.rows_)
    throw ValidationError("matrix shape mismatch in product");
  ComplexMatrix c(a.rows_, b.cols_);
  kern::ops().cgemm(a.raw(), b.raw(), c.raw(), a.rows_, a.cols_, b.cols_);
  return c;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ValidationError("matrix shape mismatch in comparison");
  return kern::ops().max_abs_diff(a.raw(), b.raw(),
                                  static_cast<int>(a.size()));
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) {
      const cplx aij = a(i, j);
      if (aij == cplx{0.0, 0.0}) continue;
      for (int k = 0; k < b.rows(); ++k)
        for (int l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
    }
  return out;
}

std::vector<cplx> matvec(const ComplexMatrix& m, const std::vector<cplx>& v) {
  if (static_cast<std::size_t>(m.cols()) != v.size())
    throw ValidationError("matrix/vector shape mismatch");
  std::vector<cplx> out(m.rows());
  for (int i = 0; i < m.rows(); ++i) {
    cplx acc = 0.0;
    for (int j = 0; j < m.cols(); ++j) acc += m(i, j) * v[j];
    out[i] = acc;
  }
  return out;
}

cplx vdot(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  if (a.size() != b.size()) throw ValidationError("vector length mismatch");
  cplx acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

double vec_norm(const std::vector<cplx>& v) {
  double s = 0.0;
  for (const auto& z : v) s += std::norm(z);
  return std::sqrt(s);
}

ComplexMatrix gram_outer(const ComplexMatrix& w) {
  return w * w.adjoint();
}

}  // namespace opstat
