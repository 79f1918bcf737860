#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "gsosel/linalg/dense.hpp"

namespace gsosel::linalg {

struct Triplet {
  int row;
  int col;
  double value;
};

/// Compressed sparse row matrix.
///
/// Invariants: row_ptr is non-decreasing with row_ptr.front() == 0 and
/// row_ptr.back() == nnz; column indices are strictly increasing within a
/// row and below n_cols; all stored values are finite. Explicit zeros are
/// allowed (they keep a structural pattern, e.g. for perturbation support).
class SparseMatrix {
 public:
  SparseMatrix() : row_ptr_(1, 0) {}

  /// Duplicate coordinates are summed. Throws std::invalid_argument on
  /// out-of-range indices or non-finite values.
  static SparseMatrix from_triplets(std::size_t n_rows, std::size_t n_cols,
                                    std::vector<Triplet> triplets);
  static SparseMatrix identity(std::size_t n);
  /// Entries with |a_ij| <= drop_tolerance are not stored.
  static SparseMatrix from_dense(const Matrix& a, double drop_tolerance = 0.0);

  std::size_t rows() const { return n_rows_; }
  std::size_t cols() const { return n_cols_; }
  std::size_t nnz() const { return values_.size(); }

  std::span<const std::size_t> row_ptr() const { return row_ptr_; }
  std::span<const int> col_idx() const { return col_idx_; }
  std::span<const double> values() const { return values_; }

  /// y = M x
  void multiply(std::span<const double> x, std::span<double> y) const;
  Vector multiply(std::span<const double> x) const;
  /// Column-wise product M X.
  Matrix multiply(const Matrix& x) const;
  /// Mᵀ X without forming the transpose.
  Matrix transpose_multiply(const Matrix& x) const;

  SparseMatrix transpose() const;
  Vector diagonal() const;
  Vector row_sums() const;
  double coeff(std::size_t i, std::size_t j) const;
  Matrix to_dense() const;

  /// Exact structural and numerical symmetry.
  bool is_symmetric() const;

  bool operator==(const SparseMatrix&) const = default;

 private:
  std::size_t n_rows_ = 0;
  std::size_t n_cols_ = 0;
  std::vector<std::size_t> row_ptr_;
  std::vector<int> col_idx_;
  std::vector<double> values_;
};

/// alpha * a + beta * b over the union pattern.
SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b, double alpha = 1.0,
                 double beta = 1.0);

/// Symmetric permutation P M Pᵀ where perm[i] is the new index of row i.
SparseMatrix permute_symmetric(const SparseMatrix& m, std::span<const int> perm);

}  // namespace gsosel::linalg
