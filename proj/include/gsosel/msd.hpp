#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gsosel/gso.hpp"
#include "gsosel/linalg/operator.hpp"
#include "gsosel/manifold.hpp"

namespace gsosel {

enum class MsdSolver { DenseAuto, Dense, Iterative };

std::string_view to_string(MsdSolver s);
MsdSolver parse_msd_solver(std::string_view name);

struct MsdConfig {
  ManifoldConfig manifold;
  /// Ridge ε = epsilon_rel · trace(L_Z) / m added to L_Z.
  double epsilon_rel = 1e-3;
  MsdSolver solver = MsdSolver::DenseAuto;
  double tol = 1e-6;
  int max_iter = 1000;
  std::uint64_t seed = 0;
  /// DenseAuto switches to the iterative solver above this subset size.
  std::size_t dense_cap = 256;
};

void validate_msd_config(const MsdConfig& cfg);

/// λ below this is reported without an inverse.
inline constexpr double kInverseMsdFloor = 1e-15;

struct MsdReport {
  std::string gso = "identity";
  int m = 0;
  double lambda_max = 0.0;
  /// 1/λ_max; empty (flagged) when λ_max < kInverseMsdFloor.
  std::optional<double> inverse_msd;
  /// λ(SX) − λ(X) when computed by alignment_gain / rank_gsos.
  std::optional<double> alignment_gain;
  std::optional<double> baseline_lambda;
  std::string solver;
  int solver_iters = 0;
  long long cg_iters = 0;
  bool converged = true;
  double elapsed_ms = 0.0;
  double epsilon_used = 0.0;
  int knn_edges = 0;
  double bandwidth = 0.0;
  std::uint64_t seed = 0;
  /// Maximizing direction over the subset (not serialized).
  linalg::Vector direction;
};

std::optional<double> inverse_msd(double lambda_max);

/// Largest eigenvalue of (L_Y, L_Z + εI) for an arbitrary L_Y operator.
/// ε follows cfg.epsilon_rel; the manifold fields of cfg are ignored.
MsdReport solve_msd_pencil(const linalg::LinearOperator& ly, const linalg::SparseMatrix& lz,
                           const MsdConfig& cfg);

/// MSD of the rows of z against labels (one per row). Subset selection is
/// the caller's job here.
MsdReport compute_msd(const linalg::Matrix& z, std::span<const int> labels, const MsdConfig& cfg);

/// MSD of S·Z on the configured subset of the bundle, with Z = X unless
/// z_override is given (n rows). kind = nullopt means S = I.
MsdReport msd_for_gso(const GsoLibrary& lib, std::optional<GsoKind> kind, const MsdConfig& cfg,
                      const linalg::Matrix* z_override = nullptr);

/// msd_for_gso plus ΔA = A(SZ, Y) − A(Z, Y) under the same configuration.
MsdReport alignment_gain(const GsoLibrary& lib, std::optional<GsoKind> kind, const MsdConfig& cfg,
                         const linalg::Matrix* z_override = nullptr);

/// Reports in ascending λ_max order, ties broken by name.
std::vector<MsdReport> rank_gsos(const GsoLibrary& lib, std::span<const GsoKind> kinds,
                                 const MsdConfig& cfg, const linalg::Matrix* z_override = nullptr);

/// (x − min)/(max − min); all-equal input maps to 0.5 everywhere.
std::vector<double> minmax_normalize(std::span<const double> values);

/// 2·√λ / √N.
double complexity_term(double lambda_max, int n);

struct StabilityRow {
  double delta = 0.0;
  double mean_abs_change = 0.0;
  double std_abs_change = 0.0;
  int trials_ok = 0;
  int trials_failed = 0;
  std::vector<double> abs_changes;
};

/// For each trial, draws a symmetric perturbation E supported on the edges
/// plus as many random non-edges, and for each δ records
/// |A((S + δ·E/‖E‖₂) X, Y) − A(S X, Y)|. Requires RBF manifold mode.
std::vector<StabilityRow> stability_experiment(const GsoLibrary& lib, GsoKind kind,
                                               std::span<const double> deltas, int trials,
                                               std::uint64_t seed, const MsdConfig& cfg);

}  // namespace gsosel
