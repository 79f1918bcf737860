#include "gsosel/gnn/bjorck.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "gsosel/errors.hpp"

namespace gsosel::gnn {

using linalg::Matrix;

Matrix bjorck_step(const Matrix& x) {
  return 1.5 * x - 0.5 * linalg::matmul(x, linalg::matmul_tn(x, x));
}

Matrix bjorck_orthonormalize(const Matrix& w, int iters, BjorckTape* tape) {
  if (iters < 0) throw std::invalid_argument("bjorck: iteration count must be >= 0");
  if (w.empty()) throw std::invalid_argument("bjorck: empty matrix");
  const bool transposed = w.rows() < w.cols();
  Matrix x = transposed ? linalg::transpose(w) : w;
  const double fro = linalg::frobenius_norm(x);
  if (!(fro > 0.0) || !std::isfinite(fro))
    throw NumericalError("bjorck: input norm is " + std::to_string(fro));
  linalg::scale(1.0 / fro, x.data());

  if (tape) {
    tape->transposed = transposed;
    tape->frobenius = fro;
    tape->normalized = x;
    tape->iterates.clear();
    tape->iterates.reserve(static_cast<std::size_t>(iters));
  }
  for (int k = 0; k < iters; ++k) {
    if (tape) tape->iterates.push_back(x);
    x = bjorck_step(x);
    if (!linalg::all_finite(x))
      throw NumericalError("bjorck: non-finite iterate at step " + std::to_string(k + 1));
  }
  return transposed ? linalg::transpose(x) : x;
}

Matrix bjorck_backward(const BjorckTape& tape, const Matrix& grad_out) {
  Matrix g = tape.transposed ? linalg::transpose(grad_out) : grad_out;
  for (auto it = tape.iterates.rbegin(); it != tape.iterates.rend(); ++it) {
    const Matrix& x = *it;
    // d/dX of X XᵀX contracted with G: G XᵀX + X Gᵀ X + X Xᵀ G.
    const Matrix xtx = linalg::matmul_tn(x, x);
    const Matrix gtx = linalg::matmul_tn(g, x);
    const Matrix xtg = linalg::matmul_tn(x, g);
    const Matrix cubic = linalg::matmul(g, xtx) + linalg::matmul(x, gtx) + linalg::matmul(x, xtg);
    g = 1.5 * g - 0.5 * cubic;
  }
  // Undo W_0 = W/f: ∂/∂W = G/f − W⟨W, G⟩/f³ = (G − W_0⟨W_0, G⟩)/f.
  const double f = tape.frobenius;
  const Matrix& w0 = tape.normalized;
  const Matrix grad = (1.0 / f) * (g - linalg::inner(w0, g) * w0);
  if (!linalg::all_finite(grad)) throw NumericalError("bjorck: non-finite gradient");
  return tape.transposed ? linalg::transpose(grad) : grad;
}

double orthogonality_error(const Matrix& w) {
  const Matrix gram = w.rows() >= w.cols() ? linalg::matmul_tn(w, w) : linalg::matmul_nt(w, w);
  return linalg::frobenius_norm(gram - Matrix::identity(gram.rows()));
}

}  // namespace gsosel::gnn
