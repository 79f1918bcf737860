#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>

#include "gsosel/linalg/dense.hpp"
#include "gsosel/linalg/sparse.hpp"

namespace gsosel::linalg {

/// Abstract square linear map v -> M v.
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;

  virtual std::size_t size() const = 0;
  virtual void apply(std::span<const double> x, std::span<double> y) const = 0;
  /// Diagonal of M when cheaply available (used for Jacobi preconditioning).
  virtual std::optional<Vector> diagonal() const { return std::nullopt; }

  Vector operator()(std::span<const double> x) const {
    Vector y(size());
    apply(x, y);
    return y;
  }
};

class SparseOperator final : public LinearOperator {
 public:
  explicit SparseOperator(SparseMatrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) throw std::invalid_argument("SparseOperator: matrix not square");
  }
  std::size_t size() const override { return m_.rows(); }
  void apply(std::span<const double> x, std::span<double> y) const override { m_.multiply(x, y); }
  std::optional<Vector> diagonal() const override { return m_.diagonal(); }
  const SparseMatrix& matrix() const { return m_; }

 private:
  SparseMatrix m_;
};

class DenseOperator final : public LinearOperator {
 public:
  explicit DenseOperator(Matrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) throw std::invalid_argument("DenseOperator: matrix not square");
  }
  std::size_t size() const override { return m_.rows(); }
  void apply(std::span<const double> x, std::span<double> y) const override {
    for (std::size_t i = 0; i < m_.rows(); ++i) y[i] = dot(m_.row(i), x);
  }
  std::optional<Vector> diagonal() const override {
    Vector d(m_.rows());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = m_(i, i);
    return d;
  }

 private:
  Matrix m_;
};

/// base + shift * I. Holds a reference; base must outlive this object.
class ShiftedOperator final : public LinearOperator {
 public:
  ShiftedOperator(const LinearOperator& base, double shift) : base_(base), shift_(shift) {}
  std::size_t size() const override { return base_.size(); }
  void apply(std::span<const double> x, std::span<double> y) const override {
    base_.apply(x, y);
    axpy(shift_, x, y);
  }
  std::optional<Vector> diagonal() const override {
    auto d = base_.diagonal();
    if (d)
      for (double& v : *d) v += shift_;
    return d;
  }

 private:
  const LinearOperator& base_;
  double shift_;
};

class ZeroOperator final : public LinearOperator {
 public:
  explicit ZeroOperator(std::size_t n) : n_(n) {}
  std::size_t size() const override { return n_; }
  void apply(std::span<const double>, std::span<double> y) const override {
    for (double& v : y) v = 0.0;
  }
  std::optional<Vector> diagonal() const override { return Vector(n_, 0.0); }

 private:
  std::size_t n_;
};

/// Materializes an operator column by column. Intended for small n only.
inline Matrix to_dense(const LinearOperator& op) {
  const std::size_t n = op.size();
  Matrix a(n, n);
  Vector e(n, 0.0), col(n);
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    op.apply(e, col);
    a.set_column(j, col);
    e[j] = 0.0;
  }
  return a;
}

}  // namespace gsosel::linalg
