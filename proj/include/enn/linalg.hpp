#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace enn {

using Vector = std::vector<double>;

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Vector& data() { return data_; }
  const Vector& data() const { return data_; }

  double* row(std::size_t i) { return data_.data() + i * cols_; }
  const double* row(std::size_t i) const { return data_.data() + i * cols_; }

  bool same_shape(const Matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Vector data_;
};

// C = A * B. Per output entry the k-sum runs in ascending order, so the
// result is deterministic and matches a naive triple loop bit for bit.
inline Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows())
    throw std::invalid_argument("matmul: inner dimensions disagree");
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* out_row = out.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      const double* b_row = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) out_row[j] += aik * b_row[j];
    }
  }
  return out;
}

// result[j] = sum_i w[i,j] * s[i], i.e. W^T s without materializing W^T.
inline Vector transpose_matvec(const Matrix& w, const Vector& s) {
  if (w.rows() != s.size())
    throw std::invalid_argument("transpose_matvec: w.rows != s.len");
  Vector out(w.cols(), 0.0);
  for (std::size_t i = 0; i < w.rows(); ++i) {
    const double si = s[i];
    const double* w_row = w.row(i);
    for (std::size_t j = 0; j < w.cols(); ++j) out[j] += w_row[j] * si;
  }
  return out;
}

// result[i] = sum_j w[i,j] * v[j].
inline Vector matvec(const Matrix& w, const Vector& v) {
  if (w.cols() != v.size()) throw std::invalid_argument("matvec: w.cols != v.len");
  Vector out(w.rows(), 0.0);
  for (std::size_t i = 0; i < w.rows(); ++i) {
    const double* w_row = w.row(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < w.cols(); ++j) acc += w_row[j] * v[j];
    out[i] = acc;
  }
  return out;
}

// acc[i,j] += u[i] * v[j]
inline void outer_accumulate(Matrix& acc, const Vector& u, const Vector& v) {
  if (acc.rows() != u.size() || acc.cols() != v.size())
    throw std::invalid_argument("outer_accumulate: shape mismatch");
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double ui = u[i];
    double* acc_row = acc.row(i);
    for (std::size_t j = 0; j < v.size(); ++j) acc_row[j] += ui * v[j];
  }
}

inline double dot(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace enn
