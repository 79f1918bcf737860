#include "gsosel/gnn/train.hpp"

#include <cmath>
#include <stdexcept>

#include "gsosel/errors.hpp"

namespace gsosel::gnn {

using linalg::Matrix;

void validate_train_config(const TrainConfig& cfg) {
  if (!(cfg.lr >= 0.0)) throw std::invalid_argument("train: lr must be >= 0");
  if (!(cfg.weight_decay >= 0.0)) throw std::invalid_argument("train: weight decay must be >= 0");
  if (cfg.max_epochs < 1) throw std::invalid_argument("train: max_epochs must be >= 1");
  if (cfg.patience < 1 || cfg.patience > cfg.max_epochs)
    throw std::invalid_argument("train: need 1 <= patience <= max_epochs");
  if (!(cfg.beta1 > 0.0 && cfg.beta1 < 1.0 && cfg.beta2 > 0.0 && cfg.beta2 < 1.0))
    throw std::invalid_argument("train: Adam betas must lie in (0, 1)");
  if (!(cfg.adam_eps > 0.0)) throw std::invalid_argument("train: adam_eps must be > 0");
  if (cfg.bjorck_iters < 1) throw std::invalid_argument("train: bjorck_iters must be >= 1");
}

namespace {

struct AdamSlot {
  Matrix m;
  Matrix v;
};

void adam_step(Matrix& w, const Matrix& g, AdamSlot& slot, const TrainConfig& cfg, int t) {
  if (slot.m.empty()) {
    slot.m = Matrix(w.rows(), w.cols());
    slot.v = Matrix(w.rows(), w.cols());
  }
  const double c1 = 1.0 - std::pow(cfg.beta1, t);
  const double c2 = 1.0 - std::pow(cfg.beta2, t);
  auto wd = w.data();
  const auto gd = g.data();
  auto md = slot.m.data();
  auto vd = slot.v.data();
  for (std::size_t k = 0; k < wd.size(); ++k) {
    md[k] = cfg.beta1 * md[k] + (1.0 - cfg.beta1) * gd[k];
    vd[k] = cfg.beta2 * vd[k] + (1.0 - cfg.beta2) * gd[k] * gd[k];
    wd[k] -= cfg.lr * (md[k] / c1) / (std::sqrt(vd[k] / c2) + cfg.adam_eps);
  }
}

}  // namespace

double evaluate(const GnnModel& model, const GsoLibrary& lib, const Matrix& x,
                std::span<const int> mask) {
  return accuracy(forward(model, lib, x).log_probs, lib.bundle().labels, mask);
}

TrainResult train(GnnModel model, const GsoLibrary& lib, const Matrix& x, const TrainConfig& cfg) {
  validate_train_config(cfg);
  const GraphBundle& b = lib.bundle();
  const std::vector<int> train_nodes = b.nodes_in(Split::Train);
  const std::vector<int> val_nodes = b.nodes_in(Split::Val);
  if (train_nodes.empty() || val_nodes.empty())
    throw InputError("train: train and val splits must be non-empty");
  model.bjorck_iters = cfg.bjorck_iters;
  check_model(model);

  TrainResult result;
  result.model = model;
  result.best_val_acc = -1.0;
  std::vector<AdamSlot> slots(model.layers.size());
  AdamSlot readout_slot;
  int since_best = 0;

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    const LossAndGrads lg = loss_and_grads(model, lib, x, train_nodes, cfg.weight_decay);
    for (std::size_t l = 0; l < model.layers.size(); ++l)
      adam_step(model.layers[l].w_raw, lg.layer_grads[l], slots[l], cfg, epoch);
    if (model.readout) adam_step(*model.readout, *lg.readout_grad, readout_slot, cfg, epoch);

    const Matrix log_probs = forward(model, lib, x).log_probs;
    EpochRecord rec;
    rec.epoch = epoch;
    rec.loss = lg.loss;
    rec.train_acc = accuracy(log_probs, b.labels, train_nodes);
    rec.val_acc = accuracy(log_probs, b.labels, val_nodes);
    result.history.push_back(rec);

    if (rec.val_acc > result.best_val_acc) {
      result.best_val_acc = rec.val_acc;
      result.best_epoch = epoch;
      result.model = model;
      since_best = 0;
    } else if (++since_best >= cfg.patience) {
      break;
    }
  }
  return result;
}

}  // namespace gsosel::gnn
