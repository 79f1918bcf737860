#include "gsosel/gso.hpp"

#include <cmath>
#include <mutex>

#include "gsosel/errors.hpp"

namespace gsosel {

using linalg::SparseMatrix;
using linalg::Triplet;

std::string_view to_string(GsoKind kind) {
  switch (kind) {
    case GsoKind::A: return "A";
    case GsoKind::L: return "L";
    case GsoKind::Q: return "Q";
    case GsoKind::Lrw: return "L_rw";
    case GsoKind::Lsym: return "L_sym";
    case GsoKind::Ahat: return "A_hat";
    case GsoKind::H: return "H";
  }
  return "?";
}

GsoKind parse_gso_kind(std::string_view name) {
  for (GsoKind k : kAllGsoKinds)
    if (to_string(k) == name) return k;
  throw InputError("unknown GSO kind '" + std::string(name) +
                   "' (expected one of A, L, Q, L_rw, L_sym, A_hat, H)");
}

std::string gso_name(std::optional<GsoKind> kind) {
  return kind ? std::string(to_string(*kind)) : std::string("identity");
}

SparseMatrix adjacency_matrix(const GraphBundle& b) {
  std::vector<Triplet> t;
  t.reserve(2 * b.edges.size());
  for (const Edge& e : b.edges) {
    t.push_back({e.u, e.v, 1.0});
    t.push_back({e.v, e.u, 1.0});
  }
  return SparseMatrix::from_triplets(static_cast<std::size_t>(b.n), static_cast<std::size_t>(b.n),
                                     std::move(t));
}

namespace {

double safe_inverse(double x) { return x > 0.0 ? 1.0 / x : 0.0; }
double safe_inv_sqrt(double x) { return x > 0.0 ? 1.0 / std::sqrt(x) : 0.0; }

}  // namespace

SparseMatrix build_gso(const GraphBundle& b, GsoKind kind, const GsoOptions& options) {
  const std::size_t n = static_cast<std::size_t>(b.n);
  std::vector<double> deg(n, 0.0);
  for (const Edge& e : b.edges) {
    deg[static_cast<std::size_t>(e.u)] += 1.0;
    deg[static_cast<std::size_t>(e.v)] += 1.0;
  }

  std::vector<Triplet> t;
  t.reserve(2 * b.edges.size() + n);
  auto add_edges = [&](auto weight) {
    for (const Edge& e : b.edges) {
      const double w = weight(static_cast<std::size_t>(e.u), static_cast<std::size_t>(e.v));
      t.push_back({e.u, e.v, w});
      t.push_back({e.v, e.u, w});
    }
  };
  auto add_diagonal = [&](auto value) {
    for (std::size_t i = 0; i < n; ++i) {
      const int ii = static_cast<int>(i);
      t.push_back({ii, ii, value(i)});
    }
  };

  switch (kind) {
    case GsoKind::A:
      add_edges([](std::size_t, std::size_t) { return 1.0; });
      break;
    case GsoKind::L:
      add_diagonal([&](std::size_t i) { return deg[i]; });
      add_edges([](std::size_t, std::size_t) { return -1.0; });
      break;
    case GsoKind::Q:
      add_diagonal([&](std::size_t i) { return deg[i]; });
      add_edges([](std::size_t, std::size_t) { return 1.0; });
      break;
    case GsoKind::Lrw:
      add_diagonal([](std::size_t) { return 1.0; });
      for (const Edge& e : b.edges) {
        const auto u = static_cast<std::size_t>(e.u), v = static_cast<std::size_t>(e.v);
        t.push_back({e.u, e.v, -safe_inverse(deg[u])});
        t.push_back({e.v, e.u, -safe_inverse(deg[v])});
      }
      break;
    case GsoKind::Lsym:
      add_diagonal([](std::size_t) { return 1.0; });
      add_edges([&](std::size_t u, std::size_t v) {
        return -safe_inv_sqrt(deg[u]) * safe_inv_sqrt(deg[v]);
      });
      break;
    case GsoKind::Ahat:
      if (options.ahat_plain) {
        add_edges([&](std::size_t u, std::size_t v) {
          return safe_inv_sqrt(deg[u]) * safe_inv_sqrt(deg[v]);
        });
      } else {
        add_diagonal([&](std::size_t i) { return 1.0 / (deg[i] + 1.0); });
        add_edges([&](std::size_t u, std::size_t v) {
          return 1.0 / std::sqrt((deg[u] + 1.0) * (deg[v] + 1.0));
        });
      }
      break;
    case GsoKind::H:
      for (const Edge& e : b.edges) {
        const auto u = static_cast<std::size_t>(e.u), v = static_cast<std::size_t>(e.v);
        t.push_back({e.u, e.v, safe_inverse(deg[u])});
        t.push_back({e.v, e.u, safe_inverse(deg[v])});
      }
      break;
  }
  return SparseMatrix::from_triplets(n, n, std::move(t));
}

linalg::Matrix diffuse(const SparseMatrix& s, const linalg::Matrix& x) {
  if (s.cols() != x.rows())
    throw std::invalid_argument("diffuse: operator is " + std::to_string(s.rows()) + "x" +
                                std::to_string(s.cols()) + " but features have " +
                                std::to_string(x.rows()) + " rows");
  linalg::Matrix out = s.multiply(x);
  if (!linalg::all_finite(out)) throw NumericalError("diffuse: non-finite output");
  return out;
}

GsoLibrary::GsoLibrary(const GraphBundle& b, GsoOptions options) : bundle_(b), options_(options) {}

const SparseMatrix& GsoLibrary::get(GsoKind kind) const {
  {
    std::shared_lock lock(mutex_);
    auto it = cache_.find(kind);
    if (it != cache_.end()) return *it->second;
  }
  auto built = std::make_unique<SparseMatrix>(build_gso(bundle_, kind, options_));
  std::unique_lock lock(mutex_);
  return *cache_.emplace(kind, std::move(built)).first->second;
}

linalg::Matrix GsoLibrary::diffuse(std::optional<GsoKind> kind, const linalg::Matrix& x) const {
  if (!kind) return x;
  return gsosel::diffuse(get(*kind), x);
}

}  // namespace gsosel
