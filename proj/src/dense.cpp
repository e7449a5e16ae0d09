#include "gmconv/dense.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace gmconv {

std::vector<double> relu_forward(std::span<const double> x) {
  std::vector<double> y(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) y[k] = x[k] > 0.0 ? x[k] : 0.0;
  return y;
}

std::vector<double> relu_backward(std::span<const double> x, std::span<const double> upstream) {
  if (x.size() != upstream.size()) throw std::domain_error("relu gradient shape mismatch");
  std::vector<double> g(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) g[k] = x[k] > 0.0 ? upstream[k] : 0.0;
  return g;
}

DenseLayer DenseLayer::make(std::size_t inputs, std::size_t outputs, std::mt19937_64& rng) {
  if (inputs == 0 || outputs == 0) throw std::domain_error("dense layer needs positive sizes");
  DenseLayer layer{inputs, outputs, std::vector<double>(inputs * outputs), std::vector<double>(outputs, 0.0)};
  const double bound = std::sqrt(6.0 / static_cast<double>(inputs + outputs));
  for (double& w : layer.weights) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    w = (2.0 * u - 1.0) * bound;
  }
  return layer;
}

std::vector<double> dense_forward(const DenseLayer& layer, std::span<const double> x) {
  if (x.size() != layer.inputs) {
    throw std::domain_error("dense layer expects " + std::to_string(layer.inputs) + " inputs, got " +
                            std::to_string(x.size()));
  }
  std::vector<double> y(layer.bias);
  for (std::size_t o = 0; o < layer.outputs; ++o) {
    for (std::size_t i = 0; i < layer.inputs; ++i) y[o] += layer.weights[o * layer.inputs + i] * x[i];
  }
  return y;
}

DenseGradients dense_backward(const DenseLayer& layer, std::span<const double> x,
                              std::span<const double> upstream) {
  if (x.size() != layer.inputs || upstream.size() != layer.outputs) {
    throw std::domain_error("dense gradient shape mismatch");
  }
  DenseGradients g{std::vector<double>(layer.weights.size()), std::vector<double>(upstream.begin(), upstream.end()),
                   std::vector<double>(layer.inputs, 0.0)};
  for (std::size_t o = 0; o < layer.outputs; ++o) {
    for (std::size_t i = 0; i < layer.inputs; ++i) {
      g.weights[o * layer.inputs + i] = upstream[o] * x[i];
      g.input[i] += layer.weights[o * layer.inputs + i] * upstream[o];
    }
  }
  return g;
}

LossResult softmax_cross_entropy(std::span<const double> logits, std::size_t label) {
  if (logits.empty() || label >= logits.size()) {
    throw std::domain_error("label " + std::to_string(label) + " out of range for " +
                            std::to_string(logits.size()) + " classes");
  }
  const double peak = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double l : logits) z += std::exp(l - peak);
  const double log_z = peak + std::log(z);
  LossResult r{log_z - logits[label], std::vector<double>(logits.size()), std::vector<double>(logits.size())};
  for (std::size_t k = 0; k < logits.size(); ++k) {
    r.probabilities[k] = std::exp(logits[k] - log_z);
    r.grad[k] = r.probabilities[k] - (k == label ? 1.0 : 0.0);
  }
  return r;
}

}  // namespace gmconv
