#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "gmconv/dataset.hpp"
#include "gmconv/network.hpp"

namespace gmconv {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  AdamConfig config;
  std::uint64_t step = 0;
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
};

/// One bias-corrected Adam update over parameter blocks. Moments are sized
/// on the first call; later calls must present the same block shapes.
void adam_step(AdamState& state, std::span<const std::span<double>> params,
               std::span<const std::vector<double>> grads);

struct TrainConfig {
  std::size_t epochs = 50;
  double lr = 1e-3;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct EpochRecord {
  std::size_t epoch;
  double loss;        ///< mean training loss over the epoch
  double valid_acc;   ///< accuracy on the validation split, NaN if absent
};

struct TrainResult {
  Network model;  ///< weights of the epoch with the best validation accuracy
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Per-example Adam over shuffled training examples. The model is checked
/// against the first training example before any update. Keeps the
/// best-validation epoch (the last epoch when `valid` is empty; earliest on
/// ties).
TrainResult train(Network model, const Dataset& train_set, const Dataset& valid_set, const TrainConfig& config,
                  const EpochCallback& on_epoch = {});

struct EvalResult {
  std::size_t correct = 0;
  std::size_t total = 0;
  std::vector<std::vector<std::size_t>> confusion;  ///< [true][predicted]
  double mean_loss = 0.0;

  double accuracy() const { return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total); }
};

/// Argmax-class accuracy. Throws std::domain_error on an empty dataset.
EvalResult evaluate(const Network& model, const Dataset& data, unsigned threads = 1);

/// Throws std::domain_error if the network cannot consume `example`.
void check_compatible(const Network& model, const Dataset& data);

/// Uniform integer in [0, n) from 64-bit draws by rejection; identical on
/// every platform, unlike std::uniform_int_distribution.
std::uint64_t uniform_index(std::uint64_t n, std::mt19937_64& rng);

}  // namespace gmconv
