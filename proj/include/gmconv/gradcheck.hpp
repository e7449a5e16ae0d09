#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gmconv {

struct GradcheckOptions {
  std::uint64_t seed = 1;
  std::size_t instances = 20;   ///< accepted instances per layer type
  std::size_t max_vertices = 8;  ///< input graphs have 3..max_vertices vertices
  double h = 1e-6;
  double tolerance = 1e-4;
  /// Test hook: perturbs every analytic gradient so the check must fail.
  bool corrupt = false;
};

struct LayerCheck {
  std::string layer;
  std::size_t instances = 0;
  /// Instances discarded because a +-h step changed the matching, the
  /// partition or an argmax (non-differentiable point).
  std::size_t rejected = 0;
  double max_rel_error = 0.0;
  bool passed = false;
};

struct GradcheckReport {
  std::vector<LayerCheck> layers;
  bool passed() const;
};

/// Central finite differences against every backward pass (conv in both
/// models and both theta modes, Louvain pooling, global average pooling,
/// dense, ReLU, softmax cross-entropy) on seeded random instances. Relative
/// error is ||analytic - numeric|| / (||analytic|| + ||numeric||) over all
/// parameters and inputs of one instance.
GradcheckReport run_gradcheck(const GradcheckOptions& options);

}  // namespace gmconv
