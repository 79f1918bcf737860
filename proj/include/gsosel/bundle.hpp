#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gsosel/linalg/dense.hpp"

namespace gsosel {

enum class Split : std::uint8_t { Train, Val, Test };

std::string_view to_string(Split s);
/// Parses "train" / "val" / "test"; throws InputError otherwise.
Split parse_split(std::string_view token);

/// Undirected edge stored canonically with u < v.
struct Edge {
  int u = 0;
  int v = 0;
  auto operator<=>(const Edge&) const = default;
};

/// A node-classification dataset: graph, features, labels and split tags.
///
/// Invariants (checked by check_invariants and on load): endpoints in [0, n),
/// u < v, edges sorted and unique; labels in [0, c); features n×d finite.
struct GraphBundle {
  std::string name;
  int n = 0;
  int d = 0;
  int c = 0;
  std::vector<Edge> edges;
  linalg::Matrix features;
  std::vector<int> labels;
  std::vector<Split> split;

  bool operator==(const GraphBundle&) const = default;

  std::vector<int> nodes_in(Split s) const;
};

/// Throws InputError describing the first violated invariant.
void check_invariants(const GraphBundle& b);

/// Sorts, canonicalizes (u < v) and deduplicates an edge list, dropping
/// self-loops. Returns the cleaned list; counts go to the out-parameters.
std::vector<Edge> canonicalize_edges(std::vector<std::pair<int, int>> raw, int* self_loops,
                                     int* duplicates);

struct LoadStats {
  int self_loops_removed = 0;
  int duplicate_edges_removed = 0;
  bool features_from_f32 = false;
};

struct LoadedBundle {
  GraphBundle bundle;
  LoadStats stats;
};

enum class FeatureFormat { Tsv, F32 };

/// Reads a bundle directory (meta.json, edges.tsv, features.tsv|features.f32,
/// labels.tsv, split.tsv). Throws InputError on any malformed content.
LoadedBundle load_bundle(const std::filesystem::path& dir);

/// Writes the canonical on-disk form. Tsv features use shortest round-trip
/// decimal formatting so that load(save(b)) == b.
void save_bundle(const GraphBundle& b, const std::filesystem::path& dir,
                 FeatureFormat format = FeatureFormat::Tsv);

struct BundleDiagnostics {
  int nodes = 0;
  int edges = 0;
  int components = 0;
  int isolated_nodes = 0;
  std::map<int, int> degree_histogram;  ///< degree -> node count
  std::vector<int> class_counts;
  int train = 0;
  int val = 0;
  int test = 0;
  /// Fraction of edges joining equal labels; empty for an edgeless graph.
  std::optional<double> homophily;
};

BundleDiagnostics validate_bundle(const GraphBundle& b);

// ---------------------------------------------------------------------------
// Synthetic stochastic block model
// ---------------------------------------------------------------------------

enum class FeatureMode { GaussianPerClass, OneHotNoisy };

struct SbmConfig {
  int n = 300;
  int c = 3;
  double p_in = 0.15;
  double p_out = 0.01;
  /// Allows p_out > p_in.
  bool heterophilic = false;
  FeatureMode feature_mode = FeatureMode::GaussianPerClass;
  int d = 16;
  double mean_separation = 1.0;  ///< gaussian mode: class mean = μ·e_class
  double stddev = 1.0;           ///< gaussian mode
  double flip_probability = 0.1; ///< one-hot mode
  double train_fraction = 0.6;
  double val_fraction = 0.2;
  std::uint64_t seed = 0;
  std::string name = "sbm";
};

/// Throws std::invalid_argument on an inconsistent config.
void validate_sbm_config(const SbmConfig& cfg);

/// Deterministic in cfg. Blocks are contiguous of size ⌊n/c⌋ with the
/// remainder in the last block; every node pair is an independent Bernoulli
/// draw (p_in within a block, p_out across).
GraphBundle generate_sbm(const SbmConfig& cfg);

}  // namespace gsosel
