#include "gsosel/linalg/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gsosel::linalg {

SparseMatrix SparseMatrix::from_triplets(std::size_t n_rows, std::size_t n_cols,
                                         std::vector<Triplet> triplets) {
  for (const auto& t : triplets) {
    if (t.row < 0 || t.col < 0 || static_cast<std::size_t>(t.row) >= n_rows ||
        static_cast<std::size_t>(t.col) >= n_cols)
      throw std::invalid_argument("SparseMatrix: triplet index out of range");
    if (!std::isfinite(t.value)) throw std::invalid_argument("SparseMatrix: non-finite value");
  }
  std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });

  SparseMatrix m;
  m.n_rows_ = n_rows;
  m.n_cols_ = n_cols;
  m.row_ptr_.assign(n_rows + 1, 0);
  m.col_idx_.reserve(triplets.size());
  m.values_.reserve(triplets.size());
  for (std::size_t k = 0; k < triplets.size();) {
    const Triplet& head = triplets[k];
    double sum = 0.0;
    while (k < triplets.size() && triplets[k].row == head.row && triplets[k].col == head.col)
      sum += triplets[k++].value;
    m.col_idx_.push_back(head.col);
    m.values_.push_back(sum);
    ++m.row_ptr_[static_cast<std::size_t>(head.row) + 1];
  }
  for (std::size_t i = 0; i < n_rows; ++i) m.row_ptr_[i + 1] += m.row_ptr_[i];
  return m;
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  std::vector<Triplet> t;
  t.reserve(n);
  for (std::size_t i = 0; i < n; ++i) t.push_back({static_cast<int>(i), static_cast<int>(i), 1.0});
  return from_triplets(n, n, std::move(t));
}

SparseMatrix SparseMatrix::from_dense(const Matrix& a, double drop_tolerance) {
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (std::abs(a(i, j)) > drop_tolerance)
        t.push_back({static_cast<int>(i), static_cast<int>(j), a(i, j)});
  return from_triplets(a.rows(), a.cols(), std::move(t));
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  if (x.size() != n_cols_ || y.size() != n_rows_)
    throw std::invalid_argument("spmv: dimension mismatch");
  for (std::size_t i = 0; i < n_rows_; ++i) {
    double s = 0.0;
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p)
      s += values_[p] * x[static_cast<std::size_t>(col_idx_[p])];
    y[i] = s;
  }
}

Vector SparseMatrix::multiply(std::span<const double> x) const {
  Vector y(n_rows_);
  multiply(x, y);
  return y;
}

Matrix SparseMatrix::multiply(const Matrix& x) const {
  if (x.rows() != n_cols_) throw std::invalid_argument("spmm: dimension mismatch");
  Matrix y(n_rows_, x.cols());
  for (std::size_t i = 0; i < n_rows_; ++i) {
    auto out = y.row(i);
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p)
      axpy(values_[p], x.row(static_cast<std::size_t>(col_idx_[p])), out);
  }
  return y;
}

Matrix SparseMatrix::transpose_multiply(const Matrix& x) const {
  if (x.rows() != n_rows_) throw std::invalid_argument("spmm (transposed): dimension mismatch");
  Matrix y(n_cols_, x.cols());
  for (std::size_t i = 0; i < n_rows_; ++i) {
    auto in = x.row(i);
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p)
      axpy(values_[p], in, y.row(static_cast<std::size_t>(col_idx_[p])));
  }
  return y;
}

SparseMatrix SparseMatrix::transpose() const {
  std::vector<Triplet> t;
  t.reserve(nnz());
  for (std::size_t i = 0; i < n_rows_; ++i)
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p)
      t.push_back({col_idx_[p], static_cast<int>(i), values_[p]});
  return from_triplets(n_cols_, n_rows_, std::move(t));
}

Vector SparseMatrix::diagonal() const {
  Vector d(std::min(n_rows_, n_cols_), 0.0);
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = coeff(i, i);
  return d;
}

Vector SparseMatrix::row_sums() const {
  Vector s(n_rows_, 0.0);
  for (std::size_t i = 0; i < n_rows_; ++i)
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) s[i] += values_[p];
  return s;
}

double SparseMatrix::coeff(std::size_t i, std::size_t j) const {
  const auto first = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i]);
  const auto last = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i + 1]);
  const auto it = std::lower_bound(first, last, static_cast<int>(j));
  if (it == last || *it != static_cast<int>(j)) return 0.0;
  return values_[static_cast<std::size_t>(it - col_idx_.begin())];
}

Matrix SparseMatrix::to_dense() const {
  Matrix a(n_rows_, n_cols_);
  for (std::size_t i = 0; i < n_rows_; ++i)
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p)
      a(i, static_cast<std::size_t>(col_idx_[p])) = values_[p];
  return a;
}

bool SparseMatrix::is_symmetric() const {
  if (n_rows_ != n_cols_) return false;
  return transpose() == *this;
}

SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b, double alpha, double beta) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("sparse add: dimension mismatch");
  std::vector<Triplet> t;
  t.reserve(a.nnz() + b.nnz());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t p = a.row_ptr()[i]; p < a.row_ptr()[i + 1]; ++p)
      t.push_back({static_cast<int>(i), a.col_idx()[p], alpha * a.values()[p]});
    for (std::size_t p = b.row_ptr()[i]; p < b.row_ptr()[i + 1]; ++p)
      t.push_back({static_cast<int>(i), b.col_idx()[p], beta * b.values()[p]});
  }
  return SparseMatrix::from_triplets(a.rows(), a.cols(), std::move(t));
}

SparseMatrix permute_symmetric(const SparseMatrix& m, std::span<const int> perm) {
  if (m.rows() != m.cols() || perm.size() != m.rows())
    throw std::invalid_argument("permute_symmetric: dimension mismatch");
  std::vector<Triplet> t;
  t.reserve(m.nnz());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t p = m.row_ptr()[i]; p < m.row_ptr()[i + 1]; ++p)
      t.push_back({perm[i], perm[static_cast<std::size_t>(m.col_idx()[p])], m.values()[p]});
  return SparseMatrix::from_triplets(m.rows(), m.cols(), std::move(t));
}

}  // namespace gsosel::linalg
