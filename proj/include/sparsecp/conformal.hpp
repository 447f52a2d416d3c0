#pragma once

// Split conformal calibration and prediction sets.
//
// Calibration takes the ceil((n+1)(1-alpha))-th smallest calibration score as
// the threshold q_hat. For the sparsemax and entmax scores this threshold is
// also a temperature: the prediction set {y : s(z, y) <= q_hat} is the
// support of gamma-entmax(beta z) with 1/beta = (gamma - 1) q_hat.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "sparsecp/activations.hpp"
#include "sparsecp/dataset.hpp"
#include "sparsecp/scores.hpp"

namespace sparsecp {

struct PredictionSet {
  std::vector<std::size_t> labels;  // ascending

  std::size_t size() const noexcept { return labels.size(); }
  bool contains(std::size_t label) const;

  bool operator==(const PredictionSet&) const = default;
};

struct CalibratedPredictor {
  ScoreKind score_kind = ScoreKind::sparsemax();
  double alpha = 0.1;
  double q_hat = 0.0;                 // may be +infinity
  std::optional<double> beta_inv;     // only for kinds with a temperature
  std::size_t calib_n = 0;
  std::size_t num_classes = 0;
};

// Returns +infinity when ceil((n+1)(1-alpha)) > n.
double conformal_quantile(std::span<const double> scores, double alpha);

// Randomized RAPS draws one u per calibration instance, in order, from
// Rng(rng_seed).
CalibratedPredictor calibrate(const LabeledLogitDataset& cal, const ScoreKind& kind,
                              double alpha);

// `u` feeds randomized RAPS and is ignored otherwise.
PredictionSet predict_set(const LogitVector& z, const CalibratedPredictor& pred, double u = 1.0);

// Support of entmax(beta z) computed by the activation itself, not through
// the score inequality.
PredictionSet support_set_via_entmax(const LogitVector& z, double beta, double gamma);

}  // namespace sparsecp
