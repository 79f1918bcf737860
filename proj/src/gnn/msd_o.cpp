#include "gsosel/gnn/msd_o.hpp"

#include <algorithm>
#include <stdexcept>

namespace gsosel::gnn {

using linalg::Matrix;

Matrix propagate_layer(const GnnLayer& layer, int bjorck_iters, const GsoLibrary& lib,
                       const Matrix& h) {
  Matrix out = linalg::matmul(lib.diffuse(layer.gso, h), bjorck_orthonormalize(layer.w_raw, bjorck_iters));
  for (double& v : out.data()) v = std::max(v, 0.0);
  return out;
}

MsdOResult msd_o_select_and_train(const GsoLibrary& lib, std::span<const GsoKind> kinds,
                                  const MsdOConfig& cfg) {
  if (cfg.layers < 1) throw std::invalid_argument("msd-o: layers must be >= 1");
  if (cfg.hidden < 1) throw std::invalid_argument("msd-o: hidden width must be >= 1");
  if (kinds.empty()) throw std::invalid_argument("msd-o: empty GSO library");
  validate_train_config(cfg.train);
  const GraphBundle& b = lib.bundle();
  const auto classes = static_cast<std::size_t>(b.c);

  MsdOResult result;
  Matrix h = b.features;
  for (int i = 0; i < cfg.layers; ++i) {
    MsdOLayer layer;
    layer.ranking = rank_gsos(lib, kinds, cfg.msd, &h);
    layer.selected = parse_gso_kind(layer.ranking.front().gso);

    TrainConfig tc = cfg.train;
    tc.seed = cfg.train.seed + static_cast<std::uint64_t>(i);
    GnnModel stage;
    stage.layers.push_back({layer.selected, init_weight(h.cols(), cfg.hidden, tc.seed)});
    stage.readout = init_weight(cfg.hidden, classes, tc.seed + 1000003u);
    layer.training = train(std::move(stage), lib, h, tc);

    const GnnModel& trained = layer.training.model;
    result.model.layers.push_back(trained.layers.front());
    result.model.readout = trained.readout;
    result.model.bjorck_iters = trained.bjorck_iters;
    result.selected.push_back(layer.selected);
    if (i + 1 < cfg.layers) h = propagate_layer(trained.layers.front(), trained.bjorck_iters, lib, h);
    result.per_layer.push_back(std::move(layer));
  }

  const Matrix log_probs = forward(result.model, lib, b.features).log_probs;
  result.val_acc = accuracy(log_probs, b.labels, b.nodes_in(Split::Val));
  const std::vector<int> test_nodes = b.nodes_in(Split::Test);
  result.test_acc = test_nodes.empty() ? 0.0 : accuracy(log_probs, b.labels, test_nodes);
  return result;
}

}  // namespace gsosel::gnn
