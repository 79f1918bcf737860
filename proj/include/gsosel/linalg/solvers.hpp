#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "gsosel/linalg/dense.hpp"
#include "gsosel/linalg/operator.hpp"

namespace gsosel::linalg {

// ---------------------------------------------------------------------------
// Conjugate gradient
// ---------------------------------------------------------------------------

struct CgOptions {
  double tol = 1e-10;  ///< relative residual target ‖Mx − b‖ ≤ tol·‖b‖
  int max_iter = 1000;
  bool jacobi_preconditioner = true;  ///< used when the operator exposes its diagonal
};

struct CgResult {
  Vector x;
  int iterations = 0;
  bool converged = false;
  double relative_residual = 0.0;  ///< true residual, recomputed at exit
};

/// Solves M x = b for symmetric positive definite M. Non-convergence is
/// reported through CgResult::converged, not thrown.
CgResult conjugate_gradient(const LinearOperator& m, std::span<const double> b,
                            const CgOptions& options = {}, std::span<const double> x0 = {});

// ---------------------------------------------------------------------------
// Dense symmetric eigensolvers
// ---------------------------------------------------------------------------

struct SymmetricEigen {
  Vector values;   ///< ascending
  Matrix vectors;  ///< column j pairs with values[j]
  int sweeps = 0;
};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix (only the upper
/// triangle is trusted; the input is symmetrized first).
SymmetricEigen jacobi_eigen(Matrix a, int max_sweeps = 100);

/// Lower-triangular Cholesky factor L with A = L Lᵀ. Throws NumericalError
/// when A is not (numerically) positive definite.
Matrix cholesky(const Matrix& a);

struct EigenPair {
  double lambda = 0.0;
  Vector vector;
};

inline constexpr std::size_t kDefaultDenseCap = 2000;

/// Largest generalized eigenpair of Ay v = λ Az v for symmetric Ay and SPD Az:
/// Cholesky-whiten Az = L Lᵀ, Jacobi-diagonalize L⁻¹ Ay L⁻ᵀ, map back.
/// The returned λ is the generalized Rayleigh quotient of the returned v.
EigenPair dense_generalized_eig_max(const Matrix& ay, const Matrix& az,
                                    std::size_t dense_cap = kDefaultDenseCap);

// ---------------------------------------------------------------------------
// Power iteration on a pencil
// ---------------------------------------------------------------------------

struct PowerOptions {
  /// Stop when Δ_k = |λ_k − λ_{k−1}| ≤ tol·|λ_k| and the extrapolated
  /// remaining error ρΔ_k/(1 − ρ), ρ = Δ_k/Δ_{k−1}, is within the same bound.
  double tol = 1e-6;
  int max_iter = 1000;
  std::uint64_t seed = 0;
  double cg_tol = 1e-12;
  int cg_max_iter = 5000;
};

struct PencilResult {
  double lambda = 0.0;
  Vector vector;
  int iterations = 0;
  long long cg_iterations = 0;
  bool converged = false;
  bool inner_solves_converged = true;
  std::uint64_t seed = 0;
};

/// Largest eigenvalue of the pencil (Ay, Az), Ay symmetric positive
/// semidefinite, Az SPD, via v ← normalize(Az⁻¹ Ay v) with CG inner solves.
/// The start vector is a seeded Gaussian. λ is reported as the Rayleigh
/// quotient (vᵀAy v)/(vᵀAz v) of the returned vector.
PencilResult power_iteration_pencil(const LinearOperator& ay, const LinearOperator& az,
                                    const PowerOptions& options = {});

/// Generalized Rayleigh quotient vᵀAy v / vᵀAz v.
double rayleigh_quotient(const LinearOperator& ay, const LinearOperator& az,
                         std::span<const double> v);

/// Largest |eigenvalue| of a symmetric operator by plain power iteration
/// (used to estimate spectral norms).
double spectral_norm_estimate(const LinearOperator& m, int max_iter = 500, double tol = 1e-10,
                              std::uint64_t seed = 0);

}  // namespace gsosel::linalg
