#include <cmath>
#include <random>
#include <stdexcept>

#include "gsosel/errors.hpp"
#include "gsosel/linalg/solvers.hpp"

namespace gsosel::linalg {

namespace {

Vector seeded_unit_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector v(n);
  for (double& x : v) x = gauss(rng);
  const double nrm = norm2(v);
  scale(1.0 / nrm, v);
  return v;
}

}  // namespace

double rayleigh_quotient(const LinearOperator& ay, const LinearOperator& az,
                         std::span<const double> v) {
  const Vector ay_v = ay(v);
  const Vector az_v = az(v);
  return dot(v, ay_v) / dot(v, az_v);
}

PencilResult power_iteration_pencil(const LinearOperator& ay, const LinearOperator& az,
                                    const PowerOptions& options) {
  const std::size_t n = ay.size();
  if (az.size() != n) throw std::invalid_argument("power_iteration_pencil: dimension mismatch");
  if (options.tol <= 0.0 || options.max_iter < 1)
    throw std::invalid_argument("power_iteration_pencil: tol and max_iter must be positive");

  PencilResult result;
  result.seed = options.seed;
  if (n == 0) {
    result.converged = true;
    return result;
  }

  Vector v = seeded_unit_vector(n, options.seed);
  Vector ay_v = ay(v);
  Vector az_v = az(v);
  double lambda = dot(v, ay_v) / dot(v, az_v);

  const CgOptions cg{options.cg_tol, options.cg_max_iter, true};
  double prev_change = 0.0;
  for (int it = 1; it <= options.max_iter; ++it) {
    result.iterations = it;
    if (norm2(ay_v) == 0.0) {
      // Zero target energy along a generic start vector, e.g. Ay = 0.
      lambda = 0.0;
      result.converged = true;
      break;
    }
    // Warm start: if v is near an eigenvector, Az⁻¹ Ay v ≈ λ v.
    Vector guess = v;
    scale(lambda, guess);
    CgResult solve = conjugate_gradient(az, ay_v, cg, guess);
    result.cg_iterations += solve.iterations;
    if (!solve.converged) result.inner_solves_converged = false;

    const double x_norm = norm2(solve.x);
    if (!std::isfinite(x_norm)) throw NumericalError("power_iteration_pencil: non-finite iterate");
    if (x_norm == 0.0) {
      lambda = 0.0;
      result.converged = true;
      break;
    }
    v = std::move(solve.x);
    scale(1.0 / x_norm, v);

    ay.apply(v, ay_v);
    az.apply(v, az_v);
    const double next = dot(v, ay_v) / dot(v, az_v);
    const double change = std::abs(next - lambda);
    lambda = next;
    // The plain change test stops early when the ratio ρ of successive
    // changes is close to 1; also require the geometric tail ρ·Δ/(1 − ρ).
    const double rho = prev_change > 0.0 ? change / prev_change : 0.0;
    prev_change = change;
    const double target = options.tol * std::abs(lambda);
    const bool roundoff = change <= 1e-14 * std::abs(lambda);
    if (change <= target && (roundoff || (rho < 1.0 && rho * change <= (1.0 - rho) * target))) {
      result.converged = true;
      break;
    }
  }

  result.lambda = lambda;
  result.vector = std::move(v);
  return result;
}

double spectral_norm_estimate(const LinearOperator& m, int max_iter, double tol,
                              std::uint64_t seed) {
  const std::size_t n = m.size();
  if (n == 0) return 0.0;
  Vector v = seeded_unit_vector(n, seed);
  Vector w(n);
  double estimate = 0.0;
  // Power iteration on M² avoids sign oscillation when ±ρ are both eigenvalues.
  for (int it = 0; it < max_iter; ++it) {
    m.apply(v, w);
    m.apply(w, v);
    const double nrm = norm2(v);
    if (nrm == 0.0) return 0.0;
    const double next = std::sqrt(nrm);
    scale(1.0 / nrm, v);
    if (std::abs(next - estimate) <= tol * next) return next;
    estimate = next;
  }
  return estimate;
}

}  // namespace gsosel::linalg
