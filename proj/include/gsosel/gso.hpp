#pragma once

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "gsosel/bundle.hpp"
#include "gsosel/linalg/sparse.hpp"

namespace gsosel {

enum class GsoKind { A, L, Q, Lrw, Lsym, Ahat, H };

inline constexpr std::array<GsoKind, 7> kAllGsoKinds = {
    GsoKind::A, GsoKind::L, GsoKind::Q, GsoKind::Lrw, GsoKind::Lsym, GsoKind::Ahat, GsoKind::H};

/// Canonical names: "A", "L", "Q", "L_rw", "L_sym", "A_hat", "H".
std::string_view to_string(GsoKind kind);
/// Throws InputError("unknown GSO kind ...") for anything else.
GsoKind parse_gso_kind(std::string_view name);

/// Name used in reports; an absent kind is the identity passthrough.
std::string gso_name(std::optional<GsoKind> kind);

struct GsoOptions {
  /// Use D^{-1/2} A D^{-1/2} for A_hat instead of the renormalized
  /// D̃^{-1/2} (A + I) D̃^{-1/2} with D̃ = D + I.
  bool ahat_plain = false;
};

linalg::SparseMatrix adjacency_matrix(const GraphBundle& b);

/// Zero-degree convention: d⁻¹ = d^{-1/2} = 0.
linalg::SparseMatrix build_gso(const GraphBundle& b, GsoKind kind, const GsoOptions& options = {});

/// S X, or X itself when kind is absent.
linalg::Matrix diffuse(const linalg::SparseMatrix& s, const linalg::Matrix& x);

/// Lazily built GSOs of one bundle, cached by kind. Concurrent readers share
/// a lock; the first build of a kind takes it exclusively.
class GsoLibrary {
 public:
  explicit GsoLibrary(const GraphBundle& b, GsoOptions options = {});

  const linalg::SparseMatrix& get(GsoKind kind) const;
  /// S X for the given kind; X unchanged for nullopt.
  linalg::Matrix diffuse(std::optional<GsoKind> kind, const linalg::Matrix& x) const;

  const GraphBundle& bundle() const { return bundle_; }

 private:
  const GraphBundle& bundle_;
  GsoOptions options_;
  mutable std::shared_mutex mutex_;
  mutable std::map<GsoKind, std::unique_ptr<linalg::SparseMatrix>> cache_;
};

}  // namespace gsosel
