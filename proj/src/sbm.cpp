#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "gsosel/bundle.hpp"

namespace gsosel {

namespace {

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(tag)};
  return std::mt19937_64(seq);
}

int block_of(int i, int block_size, int c) { return std::min(i / block_size, c - 1); }

// Visits every index in [0, count) independently with probability p, using
// geometric gaps so the cost is proportional to the number of hits.
template <typename F>
void bernoulli_hits(std::uint64_t count, double p, std::mt19937_64& rng, F&& on_hit) {
  if (p <= 0.0 || count == 0) return;
  if (p >= 1.0) {
    for (std::uint64_t k = 0; k < count; ++k) on_hit(k);
    return;
  }
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double log_q = std::log1p(-p);
  std::uint64_t k = 0;
  while (true) {
    const double u = 1.0 - unif(rng);  // (0, 1]
    const double gap = std::floor(std::log(u) / log_q);
    if (gap >= static_cast<double>(count - k)) return;
    k += static_cast<std::uint64_t>(gap);
    on_hit(k);
    if (++k >= count) return;
  }
}

}  // namespace

void validate_sbm_config(const SbmConfig& cfg) {
  if (cfg.n < 1) throw std::invalid_argument("sbm: n must be >= 1");
  if (cfg.c < 1 || cfg.c > cfg.n) throw std::invalid_argument("sbm: need 1 <= c <= n");
  for (double p : {cfg.p_in, cfg.p_out})
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("sbm: probabilities must lie in [0, 1]");
  if (!cfg.heterophilic && cfg.p_out > cfg.p_in)
    throw std::invalid_argument("sbm: p_out > p_in requires heterophilic mode");
  if (cfg.d < 1) throw std::invalid_argument("sbm: d must be >= 1");
  if (cfg.feature_mode == FeatureMode::GaussianPerClass && !(cfg.stddev >= 0.0))
    throw std::invalid_argument("sbm: stddev must be >= 0");
  if (cfg.feature_mode == FeatureMode::OneHotNoisy) {
    if (cfg.d < cfg.c) throw std::invalid_argument("sbm: one-hot features need d >= c");
    if (!(cfg.flip_probability >= 0.0 && cfg.flip_probability <= 1.0))
      throw std::invalid_argument("sbm: flip probability must lie in [0, 1]");
  }
  if (!(cfg.train_fraction >= 0.0 && cfg.val_fraction >= 0.0 &&
        cfg.train_fraction + cfg.val_fraction <= 1.0))
    throw std::invalid_argument("sbm: split fractions must be >= 0 and sum to <= 1");
}

GraphBundle generate_sbm(const SbmConfig& cfg) {
  validate_sbm_config(cfg);
  GraphBundle b;
  b.name = cfg.name;
  b.n = cfg.n;
  b.c = cfg.c;
  b.d = cfg.d;

  const int block_size = cfg.n / cfg.c;
  b.labels.resize(static_cast<std::size_t>(cfg.n));
  for (int i = 0; i < cfg.n; ++i) b.labels[static_cast<std::size_t>(i)] = block_of(i, block_size, cfg.c);

  std::vector<int> start(static_cast<std::size_t>(cfg.c) + 1);
  for (int a = 0; a < cfg.c; ++a) start[static_cast<std::size_t>(a)] = a * block_size;
  start[static_cast<std::size_t>(cfg.c)] = cfg.n;

  // Edges: one Bernoulli stream per block pair, visited in a fixed order.
  auto edge_rng = stream(cfg.seed, 1);
  for (int a = 0; a < cfg.c; ++a) {
    const int a0 = start[static_cast<std::size_t>(a)];
    const int na = start[static_cast<std::size_t>(a) + 1] - a0;
    for (int bb = a; bb < cfg.c; ++bb) {
      const int b0 = start[static_cast<std::size_t>(bb)];
      const int nb = start[static_cast<std::size_t>(bb) + 1] - b0;
      if (a == bb) {
        // Upper-triangle pairs enumerated row by row.
        const auto count = static_cast<std::uint64_t>(na) * static_cast<std::uint64_t>(na - 1) / 2;
        int row = 0;
        std::uint64_t row_start = 0;
        bernoulli_hits(count, cfg.p_in, edge_rng, [&](std::uint64_t k) {
          while (k >= row_start + static_cast<std::uint64_t>(na - 1 - row)) {
            row_start += static_cast<std::uint64_t>(na - 1 - row);
            ++row;
          }
          const int col = row + 1 + static_cast<int>(k - row_start);
          b.edges.push_back({a0 + row, a0 + col});
        });
      } else {
        const auto count = static_cast<std::uint64_t>(na) * static_cast<std::uint64_t>(nb);
        bernoulli_hits(count, cfg.p_out, edge_rng, [&](std::uint64_t k) {
          const auto u = static_cast<int>(k / static_cast<std::uint64_t>(nb));
          const auto v = static_cast<int>(k % static_cast<std::uint64_t>(nb));
          b.edges.push_back({a0 + u, b0 + v});
        });
      }
    }
  }
  std::sort(b.edges.begin(), b.edges.end());

  // Features
  auto feat_rng = stream(cfg.seed, 2);
  std::normal_distribution<double> gauss(0.0, 1.0);
  b.features = linalg::Matrix(static_cast<std::size_t>(cfg.n), static_cast<std::size_t>(cfg.d));
  if (cfg.feature_mode == FeatureMode::GaussianPerClass) {
    linalg::Matrix means(static_cast<std::size_t>(cfg.c), static_cast<std::size_t>(cfg.d));
    for (int a = 0; a < cfg.c; ++a) {
      auto row = means.row(static_cast<std::size_t>(a));
      if (cfg.d >= cfg.c) {
        row[static_cast<std::size_t>(a)] = 1.0;
      } else {
        for (double& x : row) x = gauss(feat_rng);
        linalg::scale(1.0 / linalg::norm2(row), row);
      }
      linalg::scale(cfg.mean_separation, row);
    }
    for (int i = 0; i < cfg.n; ++i) {
      const auto mean = means.row(static_cast<std::size_t>(b.labels[static_cast<std::size_t>(i)]));
      auto row = b.features.row(static_cast<std::size_t>(i));
      for (std::size_t j = 0; j < row.size(); ++j) row[j] = mean[j] + cfg.stddev * gauss(feat_rng);
    }
  } else {
    std::bernoulli_distribution flip(cfg.flip_probability);
    std::uniform_int_distribution<int> any_class(0, cfg.c - 1);
    for (int i = 0; i < cfg.n; ++i) {
      int hot = b.labels[static_cast<std::size_t>(i)];
      if (flip(feat_rng)) hot = any_class(feat_rng);
      b.features(static_cast<std::size_t>(i), static_cast<std::size_t>(hot)) = 1.0;
    }
  }

  // Split: seeded shuffle, then train / val / test prefixes.
  auto split_rng = stream(cfg.seed, 3);
  std::vector<int> order(static_cast<std::size_t>(cfg.n));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), split_rng);
  const auto n_train = static_cast<std::size_t>(std::llround(cfg.train_fraction * cfg.n));
  const auto n_val = std::min(static_cast<std::size_t>(std::llround(cfg.val_fraction * cfg.n)),
                              static_cast<std::size_t>(cfg.n) - n_train);
  b.split.assign(static_cast<std::size_t>(cfg.n), Split::Test);
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (k < n_train)
      b.split[static_cast<std::size_t>(order[k])] = Split::Train;
    else if (k < n_train + n_val)
      b.split[static_cast<std::size_t>(order[k])] = Split::Val;
  }
  return b;
}

}  // namespace gsosel
