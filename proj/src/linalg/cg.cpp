#include <cmath>
#include <stdexcept>

#include "gsosel/linalg/solvers.hpp"

namespace gsosel::linalg {

CgResult conjugate_gradient(const LinearOperator& m, std::span<const double> b,
                            const CgOptions& options, std::span<const double> x0) {
  const std::size_t n = m.size();
  if (b.size() != n) throw std::invalid_argument("conjugate_gradient: dimension mismatch");
  if (!x0.empty() && x0.size() != n)
    throw std::invalid_argument("conjugate_gradient: initial guess has wrong size");

  CgResult result;
  result.x.assign(n, 0.0);
  if (!x0.empty()) std::copy(x0.begin(), x0.end(), result.x.begin());

  const double b_norm = norm2(b);
  if (b_norm == 0.0) {
    result.x.assign(n, 0.0);
    result.converged = true;
    return result;
  }

  Vector inv_diag;
  if (options.jacobi_preconditioner) {
    if (auto d = m.diagonal()) {
      inv_diag.resize(n);
      bool usable = true;
      for (std::size_t i = 0; i < n && usable; ++i) {
        usable = (*d)[i] > 0.0;
        if (usable) inv_diag[i] = 1.0 / (*d)[i];
      }
      if (!usable) inv_diag.clear();
    }
  }
  auto precondition = [&](std::span<const double> r, std::span<double> z) {
    if (inv_diag.empty()) {
      std::copy(r.begin(), r.end(), z.begin());
    } else {
      for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    }
  };

  Vector r(n), z(n), p(n), q(n);
  m.apply(result.x, q);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];

  const double target = options.tol * b_norm;
  double r_norm = norm2(r);
  if (r_norm <= target) {
    result.converged = true;
    result.relative_residual = r_norm / b_norm;
    return result;
  }

  precondition(r, z);
  p = z;
  double rz = dot(r, z);
  for (int it = 1; it <= options.max_iter; ++it) {
    m.apply(p, q);
    const double pq = dot(p, q);
    if (!(pq > 0.0)) break;  // operator not SPD along p, or breakdown
    const double alpha = rz / pq;
    axpy(alpha, p, result.x);
    axpy(-alpha, q, r);
    result.iterations = it;
    r_norm = norm2(r);
    if (r_norm <= target) {
      result.converged = true;
      break;
    }
    precondition(r, z);
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }

  m.apply(result.x, q);
  for (std::size_t i = 0; i < n; ++i) q[i] = b[i] - q[i];
  result.relative_residual = norm2(q) / b_norm;
  // The recursive residual can drift from the true one; trust the latter.
  if (result.converged && result.relative_residual > 10.0 * options.tol) result.converged = false;
  return result;
}

}  // namespace gsosel::linalg
