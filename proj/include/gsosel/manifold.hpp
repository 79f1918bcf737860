#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "gsosel/bundle.hpp"
#include "gsosel/linalg/operator.hpp"
#include "gsosel/linalg/sparse.hpp"

namespace gsosel {

enum class ManifoldMode { BinaryKnn, Rbf };

std::string_view to_string(ManifoldMode mode);
/// Accepts "knn" and "rbf".
ManifoldMode parse_manifold_mode(std::string_view name);

enum class SubsetKind { All, Val, Test, Sample };

std::string_view to_string(SubsetKind kind);
SubsetKind parse_subset_kind(std::string_view name);

struct SubsetSpec {
  SubsetKind kind = SubsetKind::Val;
  int sample_size = 2000;  ///< sample mode only; clamped to n
  std::uint64_t seed = 0;  ///< sample mode only
};

struct ManifoldConfig {
  int k = 2;
  ManifoldMode mode = ManifoldMode::BinaryKnn;
  /// RBF bandwidth σ; nullopt selects the median edge distance.
  std::optional<double> bandwidth;
  SubsetSpec subset;
};

/// Throws std::invalid_argument on k < 1 or a non-positive explicit bandwidth.
void validate_manifold_config(const ManifoldConfig& cfg);

struct InputLaplacian {
  linalg::SparseMatrix laplacian;  ///< L_Z = D − W over the subset
  std::vector<int> node_map;       ///< subset index -> bundle index (may be empty)
  std::vector<double> degrees;     ///< weighted degrees
  int edges = 0;                   ///< undirected edges of the symmetrized graph
  double bandwidth = 0.0;          ///< σ used in RBF mode, 0 otherwise
};

/// Exhaustive symmetrized k-NN Laplacian of the rows of z. Neighbors are
/// ranked by (squared L2 distance, index). Throws std::invalid_argument
/// when k >= m.
InputLaplacian build_knn_laplacian(const linalg::Matrix& z, const ManifoldConfig& cfg);

/// Matrix-free L_Y = D_Y − W_Y for the "same label" graph:
/// (L_Y v)_i = n_{y_i} v_i − Σ_{j : y_j = y_i} v_j.
class LabelLaplacianOp final : public linalg::LinearOperator {
 public:
  /// Labels must be >= 0. Throws InputError on an empty label vector.
  explicit LabelLaplacianOp(std::vector<int> labels);

  std::size_t size() const override { return labels_.size(); }
  void apply(std::span<const double> x, std::span<double> y) const override;
  std::optional<linalg::Vector> diagonal() const override;

  const std::vector<int>& labels() const { return labels_; }
  const std::vector<int>& class_counts() const { return counts_; }

 private:
  std::vector<int> labels_;
  std::vector<int> counts_;
};

/// Node indices (ascending) selected by the spec. Sample mode draws
/// min(sample_size, n) distinct nodes uniformly with a seeded generator.
/// Throws InputError when the selection is empty.
std::vector<int> select_subset(const GraphBundle& b, const SubsetSpec& spec);

}  // namespace gsosel
