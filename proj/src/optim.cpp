#include "gmconv/optim.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "gmconv/parallel.hpp"

namespace gmconv {

void adam_step(AdamState& state, std::span<const std::span<double>> params,
               std::span<const std::vector<double>> grads) {
  if (params.size() != grads.size()) throw std::domain_error("adam: parameter and gradient block counts differ");
  if (state.m.empty() && state.step == 0) {
    for (const auto& p : params) {
      state.m.emplace_back(p.size(), 0.0);
      state.v.emplace_back(p.size(), 0.0);
    }
  }
  if (state.m.size() != params.size()) throw std::domain_error("adam: block count changed between steps");
  for (std::size_t b = 0; b < params.size(); ++b) {
    if (params[b].size() != grads[b].size() || state.m[b].size() != params[b].size()) {
      throw std::domain_error("adam: shape mismatch in block " + std::to_string(b));
    }
  }
  const AdamConfig& c = state.config;
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(c.beta1, t);
  const double correction2 = 1.0 - std::pow(c.beta2, t);
  for (std::size_t b = 0; b < params.size(); ++b) {
    auto& m = state.m[b];
    auto& v = state.v[b];
    for (std::size_t k = 0; k < params[b].size(); ++k) {
      const double g = grads[b][k];
      m[k] = c.beta1 * m[k] + (1.0 - c.beta1) * g;
      v[k] = c.beta2 * v[k] + (1.0 - c.beta2) * g * g;
      const double m_hat = m[k] / correction1;
      const double v_hat = v[k] / correction2;
      params[b][k] -= c.lr * m_hat / (std::sqrt(v_hat) + c.epsilon);
    }
  }
}

std::uint64_t uniform_index(std::uint64_t n, std::mt19937_64& rng) {
  if (n == 0) throw std::domain_error("uniform_index over an empty range");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

void check_compatible(const Network& model, const Dataset& data) {
  if (data.empty()) throw std::domain_error(data.split + " split is empty");
  const AttributedGraph& g = data.examples.front().graph;
  const NetworkConfig& c = model.config;
  if (g.vertex_dim() != c.input_vertex_dim) {
    throw std::domain_error(data.split + " graphs have vertex dimension " + std::to_string(g.vertex_dim()) +
                            " but the model expects " + std::to_string(c.input_vertex_dim));
  }
  if (c.edge_matching && g.edge_dim() != c.input_edge_dim) {
    throw std::domain_error(data.split + " graphs have edge dimension " + std::to_string(g.edge_dim()) +
                            " but the model expects " + std::to_string(c.input_edge_dim));
  }
  if (data.num_classes > c.num_classes) {
    throw std::domain_error(data.split + " split has " + std::to_string(data.num_classes) +
                            " classes but the model predicts " + std::to_string(c.num_classes));
  }
}

TrainResult train(Network model, const Dataset& train_set, const Dataset& valid_set, const TrainConfig& config,
                  const EpochCallback& on_epoch) {
  if (config.epochs < 1) throw std::domain_error("epochs must be >= 1");
  if (!(config.lr > 0.0)) throw std::domain_error("learning rate must be positive");
  check_compatible(model, train_set);
  if (!valid_set.empty()) check_compatible(model, valid_set);

  std::mt19937_64 rng(config.seed);
  AdamState adam;
  adam.config.lr = config.lr;
  TrainResult result{model, {}, 0};
  double best_acc = -1.0;
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    for (std::size_t k = order.size(); k > 1; --k) std::swap(order[k - 1], order[uniform_index(k, rng)]);
    double loss_sum = 0.0;
    for (std::size_t idx : order) {
      const Example& ex = train_set.examples[idx];
      const ForwardTrace trace = forward(model, ex.graph, config.threads);
      const LossResult loss = softmax_cross_entropy(trace.logits, ex.label);
      if (!std::isfinite(loss.loss)) throw std::runtime_error("non-finite training loss");
      loss_sum += loss.loss;
      const auto grads = backward(model, trace, loss.grad);
      const auto params = model.parameters();
      adam_step(adam, params, grads);
    }
    EpochRecord rec{epoch, loss_sum / static_cast<double>(order.size()), std::numeric_limits<double>::quiet_NaN()};
    if (!valid_set.empty()) rec.valid_acc = evaluate(model, valid_set, config.threads).accuracy();
    result.history.push_back(rec);
    if (valid_set.empty() || rec.valid_acc > best_acc) {
      best_acc = valid_set.empty() ? best_acc : rec.valid_acc;
      result.model = model;
      result.best_epoch = epoch;
    }
    if (on_epoch) on_epoch(rec);
  }
  return result;
}

EvalResult evaluate(const Network& model, const Dataset& data, unsigned threads) {
  check_compatible(model, data);
  const std::size_t nc = model.config.num_classes;
  std::vector<std::size_t> predicted(data.size());
  std::vector<double> losses(data.size());
  // Examples are independent; parallelize across them, not inside.
  parallel_for(data.size(), threads, [&](std::size_t k) {
    const ForwardTrace trace = forward(model, data.examples[k].graph, 1);
    predicted[k] = predict(trace);
    losses[k] = softmax_cross_entropy(trace.logits, data.examples[k].label).loss;
  });
  EvalResult r;
  r.total = data.size();
  r.confusion.assign(nc, std::vector<std::size_t>(nc, 0));
  for (std::size_t k = 0; k < data.size(); ++k) {
    const std::size_t truth = data.examples[k].label;
    ++r.confusion[truth][predicted[k]];
    r.correct += predicted[k] == truth;
    r.mean_loss += losses[k];
  }
  r.mean_loss /= static_cast<double>(r.total);
  return r;
}

}  // namespace gmconv
