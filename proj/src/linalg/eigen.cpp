#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "gsosel/errors.hpp"
#include "gsosel/linalg/solvers.hpp"

namespace gsosel::linalg {

SymmetricEigen jacobi_eigen(Matrix a, int max_sweeps) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw std::invalid_argument("jacobi_eigen: matrix not square");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double s = 0.5 * (a(i, j) + a(j, i));
      a(i, j) = s;
      a(j, i) = s;
    }
  if (!all_finite(a)) throw NumericalError("jacobi_eigen: non-finite input");

  Matrix v = Matrix::identity(n);
  const double scale = frobenius_norm(a);
  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off <= 1e-30 * scale * scale || off == 0.0) break;

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        // Rotation is negligible relative to both diagonal entries.
        if (std::abs(apq) < 1e-18 * (std::abs(app) + std::abs(aqq))) {
          a(p, q) = a(q, p) = 0.0;
          continue;
        }
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (std::size_t r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const double arp = a(r, p);
          const double arq = a(r, q);
          const double new_rp = c * arp - s * arq;
          const double new_rq = s * arp + c * arq;
          a(r, p) = a(p, r) = new_rp;
          a(r, q) = a(q, r) = new_rq;
        }
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = a(q, p) = 0.0;

        for (std::size_t r = 0; r < n; ++r) {
          const double vrp = v(r, p);
          const double vrq = v(r, q);
          v(r, p) = c * vrp - s * vrq;
          v(r, q) = s * vrp + c * vrq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });
  SymmetricEigen out;
  out.sweeps = sweep;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = v(r, order[k]);
  }
  return out;
}

Matrix cholesky(const Matrix& a) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw std::invalid_argument("cholesky: matrix not square");
  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0) || !std::isfinite(d))
      throw NumericalError("cholesky: matrix is not positive definite (pivot " +
                           std::to_string(j) + ")");
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / ljj;
    }
  }
  return l;
}

namespace {

// Solves L y = b in place (L lower triangular).
void forward_substitute(const Matrix& l, std::span<double> b) {
  for (std::size_t i = 0; i < l.rows(); ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * b[k];
    b[i] = s / l(i, i);
  }
}

// Solves Lᵀ y = b in place.
void backward_substitute_transposed(const Matrix& l, std::span<double> b) {
  for (std::size_t ii = l.rows(); ii-- > 0;) {
    double s = b[ii];
    for (std::size_t k = ii + 1; k < l.rows(); ++k) s -= l(k, ii) * b[k];
    b[ii] = s / l(ii, ii);
  }
}

double quadratic_form(const Matrix& a, std::span<const double> v) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) s += v[i] * dot(a.row(i), v);
  return s;
}

}  // namespace

EigenPair dense_generalized_eig_max(const Matrix& ay, const Matrix& az, std::size_t dense_cap) {
  const std::size_t n = ay.rows();
  if (ay.cols() != n || az.rows() != n || az.cols() != n)
    throw std::invalid_argument("dense_generalized_eig_max: dimension mismatch");
  if (n > dense_cap)
    throw std::invalid_argument("dense_generalized_eig_max: n=" + std::to_string(n) +
                                " exceeds dense cap " + std::to_string(dense_cap));
  if (n == 0) return {};

  const Matrix l = cholesky(az);

  // C = L⁻¹ Ay L⁻ᵀ, built by two passes of row-wise forward substitution.
  // Pass 1: rows of Ayᵀ are columns of Ay, so t = (L⁻¹ Ay)ᵀ = Ay L⁻ᵀ.
  Matrix t = transpose(ay);
  for (std::size_t j = 0; j < n; ++j) forward_substitute(l, t.row(j));
  // Pass 2: rows of tᵀ are columns of Ay L⁻ᵀ, so c = (L⁻¹ Ay L⁻ᵀ)ᵀ = C.
  Matrix c = transpose(t);
  for (std::size_t j = 0; j < n; ++j) forward_substitute(l, c.row(j));

  const SymmetricEigen eig = jacobi_eigen(std::move(c));
  Vector y = eig.vectors.column(n - 1);
  backward_substitute_transposed(l, y);
  const double y_norm = norm2(y);
  if (!(y_norm > 0.0) || !std::isfinite(y_norm))
    throw NumericalError("dense_generalized_eig_max: degenerate eigenvector");
  scale(1.0 / y_norm, y);

  EigenPair out;
  out.lambda = quadratic_form(ay, y) / quadratic_form(az, y);
  out.vector = std::move(y);
  return out;
}

}  // namespace gsosel::linalg
