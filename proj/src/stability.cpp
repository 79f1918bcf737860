#include <cmath>
#include <random>
#include <set>
#include <stdexcept>

#include "gsosel/errors.hpp"
#include "gsosel/linalg/solvers.hpp"
#include "gsosel/msd.hpp"
#include "gsosel/stats.hpp"

namespace gsosel {

namespace {

linalg::SparseMatrix random_perturbation(const GraphBundle& b, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<linalg::Triplet> t;
  auto push = [&](int u, int v) {
    const double w = gauss(rng);
    t.push_back({u, v, w});
    t.push_back({v, u, w});
  };
  for (const Edge& e : b.edges) push(e.u, e.v);

  const long long n = b.n;
  const long long max_non_edges = n * (n - 1) / 2 - static_cast<long long>(b.edges.size());
  const long long want = std::min<long long>(static_cast<long long>(b.edges.size()), max_non_edges);
  std::set<std::pair<int, int>> taken;
  for (const Edge& e : b.edges) taken.emplace(e.u, e.v);
  std::uniform_int_distribution<int> node(0, b.n - 1);
  long long added = 0;
  while (added < want) {
    int u = node(rng), v = node(rng);
    if (u == v) continue;
    if (u > v) std::swap(u, v);
    if (!taken.emplace(u, v).second) continue;
    push(u, v);
    ++added;
  }
  return linalg::SparseMatrix::from_triplets(static_cast<std::size_t>(b.n),
                                             static_cast<std::size_t>(b.n), std::move(t));
}

}  // namespace

std::vector<StabilityRow> stability_experiment(const GsoLibrary& lib, GsoKind kind,
                                               std::span<const double> deltas, int trials,
                                               std::uint64_t seed, const MsdConfig& cfg) {
  if (cfg.manifold.mode != ManifoldMode::Rbf)
    throw std::invalid_argument(
        "stability experiment requires --manifold rbf: binary k-NN weights jump when a "
        "neighbor set changes, so the metric is not Lipschitz in S");
  if (trials < 1) throw std::invalid_argument("stability experiment: trials must be >= 1");
  for (double d : deltas)
    if (!(d >= 0.0)) throw std::invalid_argument("stability experiment: deltas must be >= 0");

  const GraphBundle& b = lib.bundle();
  const linalg::SparseMatrix& s = lib.get(kind);
  const double base = msd_for_gso(lib, kind, cfg).lambda_max;
  const std::vector<int> nodes = select_subset(b, cfg.manifold.subset);
  std::vector<int> labels(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i)
    labels[i] = b.labels[static_cast<std::size_t>(nodes[i])];

  std::vector<StabilityRow> rows(deltas.size());
  for (std::size_t j = 0; j < deltas.size(); ++j) rows[j].delta = deltas[j];

  for (int trial = 0; trial < trials; ++trial) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(trial)};
    std::mt19937_64 rng(seq);
    const linalg::SparseMatrix e = random_perturbation(b, rng);
    const double e_norm = linalg::spectral_norm_estimate(linalg::SparseOperator(e));
    for (std::size_t j = 0; j < deltas.size(); ++j) {
      StabilityRow& row = rows[j];
      try {
        const double scale = e_norm > 0.0 ? deltas[j] / e_norm : 0.0;
        const linalg::SparseMatrix perturbed = linalg::add(s, e, 1.0, scale);
        const linalg::Matrix sx = diffuse(perturbed, b.features);
        const double lambda = compute_msd(linalg::select_rows(sx, nodes), labels, cfg).lambda_max;
        row.abs_changes.push_back(std::abs(lambda - base));
        ++row.trials_ok;
      } catch (const NumericalError&) {
        ++row.trials_failed;
      }
    }
  }
  for (StabilityRow& row : rows) {
    if (row.abs_changes.empty()) continue;
    row.mean_abs_change = mean(row.abs_changes);
    row.std_abs_change = stddev(row.abs_changes);
  }
  return rows;
}

}  // namespace gsosel
