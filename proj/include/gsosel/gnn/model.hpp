#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "gsosel/gnn/bjorck.hpp"
#include "gsosel/gso.hpp"
#include "gsosel/linalg/dense.hpp"

namespace gsosel::gnn {

struct GnnLayer {
  std::optional<GsoKind> gso;  ///< nullopt: identity operator
  linalg::Matrix w_raw;        ///< d_in × d_out
};

/// Stack of H ← σ(S H W̃) layers with W̃ = Björck(W_raw), followed by an
/// optional plain linear readout and a log-softmax head. σ is ReLU on every
/// layer except the last one when there is no readout.
struct GnnModel {
  std::vector<GnnLayer> layers;
  std::optional<linalg::Matrix> readout;  ///< d_last × c, not orthonormalized
  int bjorck_iters = kDefaultBjorckIters;

  std::size_t input_dim() const;
  std::size_t output_dim() const;
  bool relu_after(std::size_t layer) const;
};

/// Throws std::invalid_argument when layer dimensions do not chain.
void check_model(const GnnModel& model);

/// Uniform in [−1/√d_in, 1/√d_in], deterministic in seed.
linalg::Matrix init_weight(std::size_t d_in, std::size_t d_out, std::uint64_t seed);

/// Builds `dims.size() − 1` layers (dims[0] → dims[1] → …), one GSO per layer.
GnnModel make_model(std::span<const std::size_t> dims, std::span<const std::optional<GsoKind>> gsos,
                    std::uint64_t seed, bool with_readout = false, std::size_t classes = 0);

struct LayerCache {
  linalg::Matrix input;        ///< H
  linalg::Matrix propagated;   ///< S H
  linalg::Matrix weight;       ///< W̃
  BjorckTape tape;
  linalg::Matrix pre;          ///< S H W̃
  linalg::Matrix output;       ///< σ(pre)
};

struct ForwardResult {
  linalg::Matrix log_probs;  ///< n × c
  std::vector<LayerCache> layers;
  linalg::Matrix readout_input;
};

ForwardResult forward(const GnnModel& model, const GsoLibrary& lib, const linalg::Matrix& x);

struct LossAndGrads {
  double loss = 0.0;      ///< mean cross-entropy over the mask
  double penalty = 0.0;   ///< ½·wd·Σ‖W_raw‖² (its gradient is included below)
  std::vector<linalg::Matrix> layer_grads;
  std::optional<linalg::Matrix> readout_grad;
};

LossAndGrads loss_and_grads(const GnnModel& model, const GsoLibrary& lib, const linalg::Matrix& x,
                            std::span<const int> mask, double weight_decay);

/// Mean negative log-likelihood of the labels over mask.
double nll(const linalg::Matrix& log_probs, std::span<const int> labels, std::span<const int> mask);

/// Fraction of mask nodes whose argmax (lowest index on ties) equals the label.
double accuracy(const linalg::Matrix& scores, std::span<const int> labels, std::span<const int> mask);

}  // namespace gsosel::gnn
