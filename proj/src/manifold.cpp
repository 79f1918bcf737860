#include "gsosel/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <random>
#include <stdexcept>
#include <string>

#include "gsosel/errors.hpp"

namespace gsosel {

std::string_view to_string(ManifoldMode mode) {
  return mode == ManifoldMode::BinaryKnn ? "knn" : "rbf";
}

ManifoldMode parse_manifold_mode(std::string_view name) {
  if (name == "knn") return ManifoldMode::BinaryKnn;
  if (name == "rbf") return ManifoldMode::Rbf;
  throw std::invalid_argument("unknown manifold mode '" + std::string(name) + "' (knn|rbf)");
}

std::string_view to_string(SubsetKind kind) {
  switch (kind) {
    case SubsetKind::All: return "all";
    case SubsetKind::Val: return "val";
    case SubsetKind::Test: return "test";
    case SubsetKind::Sample: return "sample";
  }
  return "?";
}

SubsetKind parse_subset_kind(std::string_view name) {
  if (name == "all") return SubsetKind::All;
  if (name == "val") return SubsetKind::Val;
  if (name == "test") return SubsetKind::Test;
  if (name == "sample") return SubsetKind::Sample;
  throw std::invalid_argument("unknown subset '" + std::string(name) + "' (all|val|test|sample)");
}

void validate_manifold_config(const ManifoldConfig& cfg) {
  if (cfg.k < 1) throw std::invalid_argument("manifold: k must be >= 1");
  if (cfg.bandwidth && !(*cfg.bandwidth > 0.0))
    throw std::invalid_argument("manifold: bandwidth must be > 0");
  if (cfg.subset.kind == SubsetKind::Sample && cfg.subset.sample_size < 1)
    throw std::invalid_argument("manifold: sample size must be >= 1");
}

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double t = a[j] - b[j];
    s += t * t;
  }
  return s;
}

}  // namespace

InputLaplacian build_knn_laplacian(const linalg::Matrix& z, const ManifoldConfig& cfg) {
  validate_manifold_config(cfg);
  const std::size_t m = z.rows();
  const auto k = static_cast<std::size_t>(cfg.k);
  if (k >= m)
    throw std::invalid_argument("k-NN: k=" + std::to_string(cfg.k) + " must be smaller than the " +
                                std::to_string(m) + " selected nodes");
  if (!linalg::all_finite(z)) throw InputError("k-NN: features contain NaN or Inf");

  // Directed k-NN lists, then symmetrize as (min, max) pairs.
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(m * k);
  std::vector<std::pair<double, int>> cand(m - 1);
  for (std::size_t i = 0; i < m; ++i) {
    std::size_t c = 0;
    for (std::size_t j = 0; j < m; ++j)
      if (j != i) cand[c++] = {squared_distance(z.row(i), z.row(j)), static_cast<int>(j)};
    std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(k), cand.end());
    for (std::size_t r = 0; r < k; ++r) {
      const int a = static_cast<int>(i), b = cand[r].second;
      pairs.emplace_back(std::min(a, b), std::max(a, b));
    }
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

  InputLaplacian out;
  out.edges = static_cast<int>(pairs.size());
  std::vector<double> weight(pairs.size(), 1.0);
  if (cfg.mode == ManifoldMode::Rbf) {
    std::vector<double> dist(pairs.size());
    for (std::size_t e = 0; e < pairs.size(); ++e)
      dist[e] = std::sqrt(squared_distance(z.row(static_cast<std::size_t>(pairs[e].first)),
                                           z.row(static_cast<std::size_t>(pairs[e].second))));
    double sigma = 0.0;
    if (cfg.bandwidth) {
      sigma = *cfg.bandwidth;
    } else {
      std::vector<double> sorted = dist;
      std::sort(sorted.begin(), sorted.end());
      const std::size_t h = sorted.size() / 2;
      sigma = sorted.size() % 2 ? sorted[h] : 0.5 * (sorted[h - 1] + sorted[h]);
      if (!(sigma > 0.0)) sigma = 1.0;  // all edges join duplicate points
    }
    out.bandwidth = sigma;
    for (std::size_t e = 0; e < pairs.size(); ++e)
      weight[e] = std::exp(-dist[e] * dist[e] / (2.0 * sigma * sigma));
  }

  out.degrees.assign(m, 0.0);
  std::vector<linalg::Triplet> t;
  t.reserve(2 * pairs.size() + m);
  for (std::size_t e = 0; e < pairs.size(); ++e) {
    const auto [a, b] = pairs[e];
    out.degrees[static_cast<std::size_t>(a)] += weight[e];
    out.degrees[static_cast<std::size_t>(b)] += weight[e];
    t.push_back({a, b, -weight[e]});
    t.push_back({b, a, -weight[e]});
  }
  for (std::size_t i = 0; i < m; ++i)
    t.push_back({static_cast<int>(i), static_cast<int>(i), out.degrees[i]});
  out.laplacian = linalg::SparseMatrix::from_triplets(m, m, std::move(t));
  return out;
}

LabelLaplacianOp::LabelLaplacianOp(std::vector<int> labels) : labels_(std::move(labels)) {
  if (labels_.empty()) throw InputError("label Laplacian: empty subset");
  int c = 0;
  for (int y : labels_) {
    if (y < 0) throw InputError("label Laplacian: negative label");
    c = std::max(c, y + 1);
  }
  counts_.assign(static_cast<std::size_t>(c), 0);
  for (int y : labels_) ++counts_[static_cast<std::size_t>(y)];
}

void LabelLaplacianOp::apply(std::span<const double> x, std::span<double> y) const {
  if (x.size() != labels_.size() || y.size() != labels_.size())
    throw std::invalid_argument("label Laplacian: dimension mismatch");
  std::vector<double> sums(counts_.size(), 0.0);
  for (std::size_t i = 0; i < labels_.size(); ++i) sums[static_cast<std::size_t>(labels_[i])] += x[i];
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    const auto c = static_cast<std::size_t>(labels_[i]);
    y[i] = counts_[c] * x[i] - sums[c];
  }
}

std::optional<linalg::Vector> LabelLaplacianOp::diagonal() const {
  linalg::Vector d(labels_.size());
  for (std::size_t i = 0; i < d.size(); ++i)
    d[i] = counts_[static_cast<std::size_t>(labels_[i])] - 1.0;
  return d;
}

std::vector<int> select_subset(const GraphBundle& b, const SubsetSpec& spec) {
  std::vector<int> out;
  switch (spec.kind) {
    case SubsetKind::All:
      out.resize(static_cast<std::size_t>(b.n));
      for (int i = 0; i < b.n; ++i) out[static_cast<std::size_t>(i)] = i;
      break;
    case SubsetKind::Val:
      out = b.nodes_in(Split::Val);
      break;
    case SubsetKind::Test:
      out = b.nodes_in(Split::Test);
      break;
    case SubsetKind::Sample: {
      if (spec.sample_size < 1) throw std::invalid_argument("sample size must be >= 1");
      std::vector<int> all(static_cast<std::size_t>(b.n));
      for (int i = 0; i < b.n; ++i) all[static_cast<std::size_t>(i)] = i;
      std::mt19937_64 rng(spec.seed);
      const auto m = std::min(static_cast<std::size_t>(spec.sample_size), all.size());
      std::sample(all.begin(), all.end(), std::back_inserter(out), m, rng);
      break;
    }
  }
  if (out.empty())
    throw InputError("subset '" + std::string(to_string(spec.kind)) + "' selects no nodes");
  return out;
}

}  // namespace gsosel
