#pragma once

#include <span>
#include <vector>

#include "gsosel/gnn/train.hpp"
#include "gsosel/msd.hpp"

namespace gsosel::gnn {

struct MsdOConfig {
  int layers = 2;
  std::size_t hidden = 64;
  MsdConfig msd;
  TrainConfig train;
};

struct MsdOLayer {
  GsoKind selected = GsoKind::A;
  std::vector<MsdReport> ranking;  ///< ascending λ on H^(i−1)
  TrainResult training;            ///< layer + temporary readout
};

struct MsdOResult {
  std::vector<GsoKind> selected;
  std::vector<MsdOLayer> per_layer;
  GnnModel model;  ///< frozen stack + the last readout
  double val_acc = 0.0;
  double test_acc = 0.0;
};

/// Layer-wise selection: rank the kinds by MSD on the current features,
/// train the winning layer with a fresh linear readout on frozen inputs,
/// freeze it, propagate H ← ReLU(S H W̃) and continue. Layer i trains with
/// seed cfg.train.seed + i.
MsdOResult msd_o_select_and_train(const GsoLibrary& lib, std::span<const GsoKind> kinds,
                                  const MsdOConfig& cfg);

/// ReLU(S H W̃) for one frozen layer.
linalg::Matrix propagate_layer(const GnnLayer& layer, int bjorck_iters, const GsoLibrary& lib,
                               const linalg::Matrix& h);

}  // namespace gsosel::gnn
