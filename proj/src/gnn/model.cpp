#include "gsosel/gnn/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "gsosel/errors.hpp"

namespace gsosel::gnn {

using linalg::Matrix;

std::size_t GnnModel::input_dim() const { return layers.empty() ? 0 : layers.front().w_raw.rows(); }

std::size_t GnnModel::output_dim() const {
  if (readout) return readout->cols();
  return layers.empty() ? 0 : layers.back().w_raw.cols();
}

bool GnnModel::relu_after(std::size_t layer) const {
  return readout.has_value() || layer + 1 < layers.size();
}

void check_model(const GnnModel& model) {
  if (model.layers.empty()) throw std::invalid_argument("model has no layers");
  if (model.bjorck_iters < 0) throw std::invalid_argument("bjorck_iters must be >= 0");
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const Matrix& w = model.layers[l].w_raw;
    if (w.empty()) throw std::invalid_argument("layer " + std::to_string(l) + " has an empty weight");
    if (l > 0 && model.layers[l - 1].w_raw.cols() != w.rows())
      throw std::invalid_argument("layer " + std::to_string(l) + " input width does not chain");
  }
  if (model.readout && model.readout->rows() != model.layers.back().w_raw.cols())
    throw std::invalid_argument("readout input width does not match the last layer");
}

Matrix init_weight(std::size_t d_in, std::size_t d_out, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double bound = 1.0 / std::sqrt(static_cast<double>(d_in));
  std::uniform_real_distribution<double> unif(-bound, bound);
  Matrix w(d_in, d_out);
  for (double& v : w.data()) v = unif(rng);
  return w;
}

GnnModel make_model(std::span<const std::size_t> dims, std::span<const std::optional<GsoKind>> gsos,
                    std::uint64_t seed, bool with_readout, std::size_t classes) {
  if (dims.size() < 2 || gsos.size() != dims.size() - 1)
    throw std::invalid_argument("make_model: need one GSO per layer and at least two widths");
  GnnModel model;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l)
    model.layers.push_back({gsos[l], init_weight(dims[l], dims[l + 1], seed + l)});
  if (with_readout) model.readout = init_weight(dims.back(), classes, seed + dims.size());
  check_model(model);
  return model;
}

namespace {

void log_softmax_rows(Matrix& m) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto row = m.row(i);
    const double mx = *std::max_element(row.begin(), row.end());
    double s = 0.0;
    for (double v : row) s += std::exp(v - mx);
    const double lse = mx + std::log(s);
    for (double& v : row) v -= lse;
  }
}

}  // namespace

ForwardResult forward(const GnnModel& model, const GsoLibrary& lib, const Matrix& x) {
  check_model(model);
  if (x.cols() != model.input_dim())
    throw std::invalid_argument("forward: feature width " + std::to_string(x.cols()) +
                                " != model input " + std::to_string(model.input_dim()));
  ForwardResult out;
  out.layers.resize(model.layers.size());
  const Matrix* h = &x;
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    LayerCache& c = out.layers[l];
    c.input = *h;
    c.propagated = lib.diffuse(model.layers[l].gso, c.input);
    c.weight = bjorck_orthonormalize(model.layers[l].w_raw, model.bjorck_iters, &c.tape);
    c.pre = linalg::matmul(c.propagated, c.weight);
    c.output = c.pre;
    if (model.relu_after(l))
      for (double& v : c.output.data()) v = std::max(v, 0.0);
    if (!linalg::all_finite(c.output))
      throw NumericalError("forward: non-finite activation in layer " + std::to_string(l));
    h = &c.output;
  }
  if (model.readout) {
    out.readout_input = *h;
    out.log_probs = linalg::matmul(*h, *model.readout);
  } else {
    out.log_probs = *h;
  }
  log_softmax_rows(out.log_probs);
  return out;
}

double nll(const Matrix& log_probs, std::span<const int> labels, std::span<const int> mask) {
  if (mask.empty()) throw std::invalid_argument("nll: empty mask");
  double s = 0.0;
  for (int i : mask)
    s -= log_probs(static_cast<std::size_t>(i), static_cast<std::size_t>(labels[static_cast<std::size_t>(i)]));
  return s / static_cast<double>(mask.size());
}

double accuracy(const Matrix& scores, std::span<const int> labels, std::span<const int> mask) {
  if (mask.empty()) throw std::invalid_argument("accuracy: empty mask");
  int hits = 0;
  for (int i : mask) {
    const auto row = scores.row(static_cast<std::size_t>(i));
    const auto best = std::max_element(row.begin(), row.end()) - row.begin();
    if (best == labels[static_cast<std::size_t>(i)]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(mask.size());
}

LossAndGrads loss_and_grads(const GnnModel& model, const GsoLibrary& lib, const Matrix& x,
                            std::span<const int> mask, double weight_decay) {
  const std::vector<int>& labels = lib.bundle().labels;
  ForwardResult fw = forward(model, lib, x);
  LossAndGrads out;
  out.loss = nll(fw.log_probs, labels, mask);

  // d loss / d logits = (softmax − onehot)/|mask| on mask rows, 0 elsewhere.
  Matrix g(fw.log_probs.rows(), fw.log_probs.cols());
  const double inv = 1.0 / static_cast<double>(mask.size());
  for (int i : mask) {
    const auto r = static_cast<std::size_t>(i);
    for (std::size_t j = 0; j < g.cols(); ++j) g(r, j) += std::exp(fw.log_probs(r, j)) * inv;
    g(r, static_cast<std::size_t>(labels[r])) -= inv;
  }

  if (model.readout) {
    out.readout_grad = linalg::matmul_tn(fw.readout_input, g) + weight_decay * *model.readout;
    out.penalty += 0.5 * weight_decay * linalg::inner(*model.readout, *model.readout);
    g = linalg::matmul_nt(g, *model.readout);
  }

  out.layer_grads.resize(model.layers.size());
  for (std::size_t l = model.layers.size(); l-- > 0;) {
    const LayerCache& c = fw.layers[l];
    if (model.relu_after(l))
      for (std::size_t k = 0; k < g.size(); ++k)
        if (!(c.pre.data()[k] > 0.0)) g.data()[k] = 0.0;
    const Matrix grad_weight = linalg::matmul_tn(c.propagated, g);
    const Matrix& w_raw = model.layers[l].w_raw;
    out.layer_grads[l] = bjorck_backward(c.tape, grad_weight) + weight_decay * w_raw;
    out.penalty += 0.5 * weight_decay * linalg::inner(w_raw, w_raw);
    if (l == 0) break;
    const Matrix grad_prop = linalg::matmul_nt(g, c.weight);
    g = model.layers[l].gso ? lib.get(*model.layers[l].gso).transpose_multiply(grad_prop)
                            : grad_prop;
  }
  return out;
}

}  // namespace gsosel::gnn
