#pragma once

#include <cstddef>
#include <cstdint>

#include "sparsecp/dataset.hpp"

namespace sparsecp {

// Gaussian classes with means on a sphere. Class means are drawn uniformly on
// the sphere of radius `separation` in `dim` dimensions; an instance of class y
// is x = mean_y + noise * eps, and its logits are <mean_k, x> / noise^2, i.e.
// the log-likelihood ratios of the generating model.
struct SyntheticSpec {
  std::size_t num_classes = 10;
  std::size_t dim = 16;
  double separation = 2.5;
  double noise = 1.0;
};

// The class means depend only on `means_seed`; instances are drawn from
// `seed`. Splitting one call's output keeps calibration and test exchangeable.
LabeledLogitDataset make_synthetic(const SyntheticSpec& spec, std::size_t n,
                                   std::uint64_t seed, std::uint64_t means_seed = 0);

}  // namespace sparsecp
