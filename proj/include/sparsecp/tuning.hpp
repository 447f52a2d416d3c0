#pragma once

// Seeded data splits and average-set-size hyperparameter search (the entmax
// gamma, and the RAPS regularization pair). Each search calibrates on one
// part of the calibration data and measures set size on the other, so the
// data used for the final threshold never scores its own tuning.

#include <cstdint>
#include <vector>

#include "sparsecp/conformal.hpp"
#include "sparsecp/dataset.hpp"
#include "sparsecp/scores.hpp"

namespace sparsecp {

struct SplitSpec {
  std::vector<double> fractions;
  std::uint64_t seed = 0;

  // 60% calibration / 40% tuning.
  static SplitSpec tuning(std::uint64_t seed) { return {{0.6, 0.4}, seed}; }
};

// Seeded Fisher-Yates shuffle of the instances, then contiguous parts. Every
// part but the last gets floor(fraction * n); the last takes the remainder.
std::vector<LabeledLogitDataset> split(const LabeledLogitDataset& data, const SplitSpec& spec);

struct TuningEntry {
  ScoreKind candidate;
  double avg_set_size;
};

struct TuningResult {
  ScoreKind chosen;
  double objective;
  // Ordered by parameter: ascending gamma, or lexicographic (lambda_reg, k_reg).
  std::vector<TuningEntry> table;
};

inline const std::vector<double>& default_gamma_grid() {
  static const std::vector<double> grid{1.1, 1.2, 1.3, 1.4, 1.5, 1.6, 1.7, 1.8, 1.9};
  return grid;
}
inline const std::vector<double>& default_lambda_grid() {
  static const std::vector<double> grid{0.001, 0.01, 0.1, 1.0};
  return grid;
}
inline const std::vector<int>& default_k_grid() {
  static const std::vector<int> grid{1, 5, 10, 50};
  return grid;
}

// Mean prediction-set size of `pred` over `data`. Randomized RAPS draws its
// u values from Rng(u_seed).
double average_set_size(const CalibratedPredictor& pred, const LabeledLogitDataset& data,
                        std::uint64_t u_seed = 0);

TuningResult tune_gamma(const LabeledLogitDataset& cal, double alpha,
                        const std::vector<double>& grid, const SplitSpec& spec);

// `base` supplies the randomization flag and seed shared by every candidate.
TuningResult tune_raps(const LabeledLogitDataset& cal, double alpha,
                       const std::vector<double>& lambda_grid, const std::vector<int>& k_grid,
                       const SplitSpec& spec, const RapsParams& base = {});

}  // namespace sparsecp
