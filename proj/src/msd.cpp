#include "gsosel/msd.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "gsosel/errors.hpp"
#include "gsosel/linalg/solvers.hpp"

namespace gsosel {

std::string_view to_string(MsdSolver s) {
  switch (s) {
    case MsdSolver::DenseAuto: return "dense-auto";
    case MsdSolver::Dense: return "dense";
    case MsdSolver::Iterative: return "iterative";
  }
  return "?";
}

MsdSolver parse_msd_solver(std::string_view name) {
  if (name == "dense-auto" || name == "auto") return MsdSolver::DenseAuto;
  if (name == "dense") return MsdSolver::Dense;
  if (name == "iterative") return MsdSolver::Iterative;
  throw std::invalid_argument("unknown solver '" + std::string(name) +
                              "' (dense-auto|dense|iterative)");
}

void validate_msd_config(const MsdConfig& cfg) {
  validate_manifold_config(cfg.manifold);
  if (!(cfg.epsilon_rel > 0.0)) throw std::invalid_argument("msd: epsilon_rel must be > 0");
  if (!(cfg.tol > 0.0)) throw std::invalid_argument("msd: tol must be > 0");
  if (cfg.max_iter < 1) throw std::invalid_argument("msd: max_iter must be >= 1");
}

std::optional<double> inverse_msd(double lambda_max) {
  if (!(lambda_max >= kInverseMsdFloor)) return std::nullopt;
  return 1.0 / lambda_max;
}

MsdReport solve_msd_pencil(const linalg::LinearOperator& ly, const linalg::SparseMatrix& lz,
                           const MsdConfig& cfg) {
  validate_msd_config(cfg);
  const std::size_t m = lz.rows();
  if (m == 0) throw InputError("msd: empty subset");
  if (ly.size() != m || lz.cols() != m) throw std::invalid_argument("msd: dimension mismatch");

  const auto start = std::chrono::steady_clock::now();
  double trace = 0.0;
  for (double d : lz.diagonal()) trace += d;
  double eps = cfg.epsilon_rel * trace / static_cast<double>(m);
  if (!(eps > 0.0)) eps = cfg.epsilon_rel;  // edgeless input graph

  MsdReport report;
  report.m = static_cast<int>(m);
  report.epsilon_used = eps;
  report.seed = cfg.seed;

  const bool dense = cfg.solver == MsdSolver::Dense ||
                     (cfg.solver == MsdSolver::DenseAuto && m <= cfg.dense_cap);
  if (dense) {
    linalg::Matrix az = lz.to_dense();
    for (std::size_t i = 0; i < m; ++i) az(i, i) += eps;
    linalg::EigenPair pair = linalg::dense_generalized_eig_max(
        linalg::to_dense(ly), az, std::max(cfg.dense_cap, linalg::kDefaultDenseCap));
    report.solver = "dense";
    report.lambda_max = pair.lambda;
    report.direction = std::move(pair.vector);
  } else {
    const linalg::SparseOperator lz_op(lz);
    const linalg::ShiftedOperator az(lz_op, eps);
    linalg::PowerOptions opts;
    opts.tol = cfg.tol;
    opts.max_iter = cfg.max_iter;
    opts.seed = cfg.seed;
    linalg::PencilResult r = linalg::power_iteration_pencil(ly, az, opts);
    report.solver = "iterative";
    report.lambda_max = r.lambda;
    report.direction = std::move(r.vector);
    report.solver_iters = r.iterations;
    report.cg_iters = r.cg_iterations;
    report.converged = r.converged && r.inner_solves_converged;
  }
  if (!std::isfinite(report.lambda_max)) throw NumericalError("msd: non-finite eigenvalue");
  // Roundoff can leave a tiny negative value for a zero numerator.
  if (report.lambda_max < 0.0 && report.lambda_max > -1e-12) report.lambda_max = 0.0;
  report.inverse_msd = inverse_msd(report.lambda_max);
  report.elapsed_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return report;
}

MsdReport compute_msd(const linalg::Matrix& z, std::span<const int> labels, const MsdConfig& cfg) {
  validate_msd_config(cfg);
  if (z.rows() == 0) throw InputError("msd: empty subset");
  if (labels.size() != z.rows()) throw std::invalid_argument("msd: label count != feature rows");
  const auto start = std::chrono::steady_clock::now();
  InputLaplacian lz = build_knn_laplacian(z, cfg.manifold);
  const LabelLaplacianOp ly(std::vector<int>(labels.begin(), labels.end()));
  MsdReport report = solve_msd_pencil(ly, lz.laplacian, cfg);
  report.knn_edges = lz.edges;
  report.bandwidth = lz.bandwidth;
  report.elapsed_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return report;
}

MsdReport msd_for_gso(const GsoLibrary& lib, std::optional<GsoKind> kind, const MsdConfig& cfg,
                      const linalg::Matrix* z_override) {
  const GraphBundle& b = lib.bundle();
  const linalg::Matrix& z = z_override ? *z_override : b.features;
  if (z.rows() != static_cast<std::size_t>(b.n))
    throw std::invalid_argument("msd: feature override must have n rows");
  const std::vector<int> nodes = select_subset(b, cfg.manifold.subset);
  std::vector<int> labels(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i)
    labels[i] = b.labels[static_cast<std::size_t>(nodes[i])];
  const auto start = std::chrono::steady_clock::now();
  const linalg::Matrix sz = lib.diffuse(kind, z);
  MsdReport report = compute_msd(linalg::select_rows(sz, nodes), labels, cfg);
  report.gso = gso_name(kind);
  report.elapsed_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return report;
}

MsdReport alignment_gain(const GsoLibrary& lib, std::optional<GsoKind> kind, const MsdConfig& cfg,
                         const linalg::Matrix* z_override) {
  const MsdReport base = msd_for_gso(lib, std::nullopt, cfg, z_override);
  MsdReport report = msd_for_gso(lib, kind, cfg, z_override);
  report.baseline_lambda = base.lambda_max;
  report.alignment_gain = report.lambda_max - base.lambda_max;
  return report;
}

std::vector<MsdReport> rank_gsos(const GsoLibrary& lib, std::span<const GsoKind> kinds,
                                 const MsdConfig& cfg, const linalg::Matrix* z_override) {
  if (kinds.empty()) throw std::invalid_argument("rank_gsos: empty GSO list");
  const MsdReport base = msd_for_gso(lib, std::nullopt, cfg, z_override);
  std::vector<MsdReport> out;
  out.reserve(kinds.size());
  for (GsoKind k : kinds) {
    MsdReport r = msd_for_gso(lib, k, cfg, z_override);
    r.baseline_lambda = base.lambda_max;
    r.alignment_gain = r.lambda_max - base.lambda_max;
    out.push_back(std::move(r));
  }
  std::stable_sort(out.begin(), out.end(), [](const MsdReport& a, const MsdReport& b) {
    if (a.lambda_max != b.lambda_max) return a.lambda_max < b.lambda_max;
    return a.gso < b.gso;
  });
  return out;
}

std::vector<double> minmax_normalize(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("minmax_normalize: empty list");
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double min = *lo, max = *hi;
  std::vector<double> out(values.size(), 0.5);
  if (max > min)
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - min) / (max - min);
  return out;
}

double complexity_term(double lambda_max, int n) {
  if (lambda_max < 0.0 || n < 1) throw std::invalid_argument("complexity_term: need λ >= 0, N >= 1");
  return 2.0 * std::sqrt(lambda_max) / std::sqrt(static_cast<double>(n));
}

}  // namespace gsosel
