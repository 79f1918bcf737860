#pragma once

#include <vector>

#include "gsosel/linalg/dense.hpp"

namespace gsosel::gnn {

inline constexpr int kDefaultBjorckIters = 10;

/// Intermediate values of one orthonormalization, kept for the backward pass.
struct BjorckTape {
  bool transposed = false;          ///< input had fewer rows than columns
  double frobenius = 0.0;           ///< ‖W‖_F of the (oriented) input
  linalg::Matrix normalized;        ///< W_0
  std::vector<linalg::Matrix> iterates;  ///< W_0 … W_{k−1}, oriented
};

/// One unnormalized step X(I + ½(I − XᵀX)).
linalg::Matrix bjorck_step(const linalg::Matrix& x);

/// W_0 = W/‖W‖_F, W_{j+1} = 1.5·W_j − 0.5·W_j W_jᵀ W_j. Tall inputs converge
/// to orthonormal columns; wide inputs are transposed first, so rows end up
/// orthonormal. Throws NumericalError on a zero or non-finite input.
linalg::Matrix bjorck_orthonormalize(const linalg::Matrix& w, int iters = kDefaultBjorckIters,
                                     BjorckTape* tape = nullptr);

/// Gradient with respect to the raw input given the gradient with respect
/// to the output, differentiating every unrolled step exactly.
linalg::Matrix bjorck_backward(const BjorckTape& tape, const linalg::Matrix& grad_out);

/// ‖WᵀW − I‖_F for tall W, ‖WWᵀ − I‖_F for wide W.
double orthogonality_error(const linalg::Matrix& w);

}  // namespace gsosel::gnn
