#include "sparsecp/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sparsecp/error.hpp"
#include "sparsecp/random.hpp"

namespace sparsecp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(Errc::kInvalidInput, "alpha must lie in (0, 1)");
  }
}

}  // namespace

bool PredictionSet::contains(std::size_t label) const {
  return std::binary_search(labels.begin(), labels.end(), label);
}

double conformal_quantile(std::span<const double> scores, double alpha) {
  if (scores.empty()) throw Error(Errc::kEmptyCalibration, "no calibration scores");
  check_alpha(alpha);
  for (double s : scores) {
    if (!std::isfinite(s)) throw Error(Errc::kInvalidInput, "non-finite calibration score");
  }
  const std::size_t n = scores.size();
  // The slack absorbs representation error in alpha, e.g. (n+1)(1-0.1)
  // landing a hair above an integer.
  const double position = static_cast<double>(n + 1) * (1.0 - alpha);
  const auto rank = static_cast<std::size_t>(std::ceil(position - 1e-9));
  if (rank > n) return kInf;
  std::vector<double> sorted(scores.begin(), scores.end());
  const auto nth = sorted.begin() + static_cast<std::ptrdiff_t>(rank == 0 ? 0 : rank - 1);
  std::nth_element(sorted.begin(), nth, sorted.end());
  return *nth;
}

CalibratedPredictor calibrate(const LabeledLogitDataset& cal, const ScoreKind& kind,
                              double alpha) {
  check_alpha(alpha);
  if (cal.empty()) throw Error(Errc::kEmptyCalibration, "calibration set is empty");

  const bool randomized =
      kind.family() == ScoreKind::Family::kRaps && kind.raps_params().randomized;
  Rng rng(kind.raps_params().rng_seed);
  std::vector<double> scores;
  scores.reserve(cal.size());
  for (const auto& inst : cal.instances) {
    const double u = randomized ? rng.uniform() : 1.0;
    scores.push_back(score(inst.logits, inst.label, kind, u));
  }

  CalibratedPredictor pred;
  pred.score_kind = kind;
  pred.alpha = alpha;
  pred.q_hat = conformal_quantile(scores, alpha);
  pred.calib_n = cal.size();
  pred.num_classes = cal.num_classes;
  if (kind.has_temperature()) {
    // 1/beta = q_hat / delta, delta = 1/(gamma - 1).
    pred.beta_inv = pred.q_hat * (kind.gamma() - 1.0);
  }
  return pred;
}

PredictionSet predict_set(const LogitVector& z, const CalibratedPredictor& pred, double u) {
  if (pred.num_classes != 0 && z.size() != pred.num_classes) {
    throw Error(Errc::kDimensionMismatch, "predictor calibrated for " +
                                              std::to_string(pred.num_classes) +
                                              " classes, got " + std::to_string(z.size()));
  }
  PredictionSet out;
  if (pred.q_hat == kInf) {
    out.labels.resize(z.size());
    for (std::size_t j = 0; j < z.size(); ++j) out.labels[j] = j;
    return out;
  }
  out.labels = labels_within(z, pred.score_kind, pred.q_hat, u);
  return out;
}

PredictionSet support_set_via_entmax(const LogitVector& z, double beta, double gamma) {
  if (!(gamma > 1.0 && gamma <= 2.0)) {
    throw Error(Errc::kInvalidGamma, "support needs gamma in (1, 2]");
  }
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw Error(Errc::kInvalidInput, "inverse temperature must be finite and > 0");
  }
  EntmaxConfig cfg;
  cfg.gamma = gamma;
  return PredictionSet{entmax(scale(z, beta), cfg).support};
}

}  // namespace sparsecp
