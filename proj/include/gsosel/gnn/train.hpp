#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gsosel/gnn/model.hpp"

namespace gsosel::gnn {

struct TrainConfig {
  double lr = 0.01;
  double weight_decay = 5e-4;
  int max_epochs = 200;
  int patience = 20;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 0;
  int bjorck_iters = kDefaultBjorckIters;
};

/// Throws std::invalid_argument on a non-positive field or patience > max_epochs.
/// lr = 0 is accepted (frozen run).
void validate_train_config(const TrainConfig& cfg);

struct EpochRecord {
  int epoch = 0;
  double loss = 0.0;
  double train_acc = 0.0;
  double val_acc = 0.0;
};

struct TrainResult {
  GnnModel model;  ///< weights of the best validation epoch
  std::vector<EpochRecord> history;
  int best_epoch = 0;
  double best_val_acc = 0.0;
};

/// Adam on every W_raw (and the readout), early stopping on validation
/// accuracy with the configured patience. The model's weights are used as
/// the starting point; cfg.bjorck_iters overrides model.bjorck_iters.
TrainResult train(GnnModel model, const GsoLibrary& lib, const linalg::Matrix& x,
                  const TrainConfig& cfg);

/// Accuracy of the model's predictions on the given nodes.
double evaluate(const GnnModel& model, const GsoLibrary& lib, const linalg::Matrix& x,
                std::span<const int> mask);

}  // namespace gsosel::gnn
