#pragma once

#include <string>

#include <Eigen/Dense>

#include "smhgc/errors.hpp"

namespace smhgc {

// Row-major dense storage, matching the on-disk feature layout.
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using DenseMatrix = Matrix<double>;
using DenseVector = Vector<double>;

template <typename Derived>
std::string shape_string(const Eigen::MatrixBase<Derived>& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

// Shape-checked product. Throws DimensionError naming both shapes.
template <typename LhsDerived, typename RhsDerived>
Matrix<typename LhsDerived::Scalar> matmul(const Eigen::MatrixBase<LhsDerived>& a,
                                           const Eigen::MatrixBase<RhsDerived>& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("matmul: cannot multiply " + shape_string(a) + " by " + shape_string(b));
  }
  Matrix<typename LhsDerived::Scalar> out = a * b;
  return out;
}

// D^{-1} M for a non-negative matrix; all-zero rows stay zero.
template <typename Derived>
Matrix<typename Derived::Scalar> row_normalize(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  if ((m.array() < Scalar(0)).any()) {
    throw ContractError("row_normalize: matrix has negative entries");
  }
  Matrix<Scalar> out = m;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const Scalar s = out.row(i).sum();
    if (s > Scalar(0)) out.row(i) /= s;
  }
  return out;
}

// L2-normalizes each row; zero rows stay zero.
template <typename Derived>
Matrix<typename Derived::Scalar> l2_row_normalize(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  Matrix<Scalar> out = m;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const Scalar n = out.row(i).norm();
    if (n > Scalar(0)) out.row(i) /= n;
  }
  return out;
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

// Cosine similarity of the vectorized matrices. Zero when either is zero.
template <typename LhsDerived, typename RhsDerived>
typename LhsDerived::Scalar frobenius_cosine(const Eigen::MatrixBase<LhsDerived>& a,
                                             const Eigen::MatrixBase<RhsDerived>& b) {
  using Scalar = typename LhsDerived::Scalar;
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("frobenius_cosine: shapes " + shape_string(a) + " and " + shape_string(b));
  }
  const Scalar na = a.norm();
  const Scalar nb = b.norm();
  if (na == Scalar(0) || nb == Scalar(0)) return Scalar(0);
  return a.cwiseProduct(b).sum() / (na * nb);
}

}  // namespace smhgc
