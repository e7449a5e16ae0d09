#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <vector>

namespace gmconv {

/// max(x, 0) element-wise; -0 maps to +0.
std::vector<double> relu_forward(std::span<const double> x);
/// upstream where the forward input was positive, else 0.
std::vector<double> relu_backward(std::span<const double> x, std::span<const double> upstream);

/// Affine map y = W x + b with W stored row-major (outputs x inputs).
struct DenseLayer {
  std::size_t inputs = 0;
  std::size_t outputs = 0;
  std::vector<double> weights;
  std::vector<double> bias;

  static DenseLayer make(std::size_t inputs, std::size_t outputs, std::mt19937_64& rng);
};

struct DenseGradients {
  std::vector<double> weights;
  std::vector<double> bias;
  std::vector<double> input;
};

std::vector<double> dense_forward(const DenseLayer& layer, std::span<const double> x);
DenseGradients dense_backward(const DenseLayer& layer, std::span<const double> x,
                              std::span<const double> upstream);

struct LossResult {
  double loss;
  std::vector<double> grad;  ///< d loss / d logits = softmax - onehot
  std::vector<double> probabilities;
};

/// Categorical cross-entropy of softmax(logits), stabilized by log-sum-exp.
LossResult softmax_cross_entropy(std::span<const double> logits, std::size_t label);

}  // namespace gmconv
