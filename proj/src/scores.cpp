#include "sparsecp/scores.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sparsecp/error.hpp"

namespace sparsecp {

namespace {

void check_label(const LogitVector& z, std::size_t y) {
  if (y >= z.size()) {
    throw Error(Errc::kLabelOutOfRange, "label " + std::to_string(y) +
                                            " outside 0.." + std::to_string(z.size() - 1));
  }
}

void check_entmax_gamma(double gamma) {
  if (!(gamma > 1.0 && gamma <= 2.0)) {
    throw Error(Errc::kInvalidGamma,
                "entmax score needs gamma in (1, 2], got " + std::to_string(gamma));
  }
}

void check_raps(const RapsParams& params, double u) {
  if (!(params.lambda_reg >= 0.0) || !std::isfinite(params.lambda_reg) || params.k_reg < 1) {
    throw Error(Errc::kInvalidInput, "RAPS needs lambda_reg >= 0 and k_reg >= 1");
  }
  if (!(u >= 0.0 && u <= 1.0)) {
    throw Error(Errc::kInvalidInput, "RAPS randomization u must lie in [0, 1]");
  }
}

std::vector<double> sorted_values(const LogitVector& z, const std::vector<std::size_t>& order) {
  std::vector<double> v(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) v[i] = z[order[i]];
  return v;
}

// Sum of gaps to every higher-ranked entry, by the recurrence
// s_1 = 0, s_r = s_{r-1} + (r - 1) (v_{r-1} - v_r). Every increment is
// non-negative, so the result is exactly 0 for ties and monotone in r.
class GapSum {
 public:
  explicit GapSum(const std::vector<double>& sorted) : v_(sorted) {}

  double advance() {
    if (r_ > 0) sum_ += static_cast<double>(r_) * (v_[r_ - 1] - v_[r_]);
    ++r_;
    return sum_;
  }

 private:
  const std::vector<double>& v_;
  std::size_t r_ = 0;
  double sum_ = 0.0;
};

double gap_sum_at_rank(const std::vector<double>& sorted, std::size_t rank) {
  GapSum walk(sorted);
  double s = 0.0;
  for (std::size_t r = 0; r < rank; ++r) s = walk.advance();
  return s;
}

// delta-norm of (v_k - v_{rank-1}) for k < rank-1, scaled by the largest gap
// (the first one) so large delta neither overflows nor underflows. The
// result is never below that largest gap.
double gap_norm_at_rank(const std::vector<double>& sorted, std::size_t rank, double delta) {
  if (rank <= 1) return 0.0;
  const double zr = sorted[rank - 1];
  const double largest = sorted[0] - zr;
  if (largest <= 0.0) return 0.0;
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < rank; ++k) {
    acc += std::pow((sorted[k] - zr) / largest, delta);
  }
  return largest * std::pow(acc, 1.0 / delta);
}

double family_score_at_rank(const std::vector<double>& sorted, std::size_t rank,
                            const ScoreKind& kind) {
  switch (kind.family()) {
    case ScoreKind::Family::kSparsemax:
      return gap_sum_at_rank(sorted, rank);
    case ScoreKind::Family::kEntmax:
      return gap_norm_at_rank(sorted, rank, 1.0 / (kind.gamma() - 1.0));
    case ScoreKind::Family::kLogMargin:
      return sorted[0] - sorted[rank - 1];
    default:
      break;
  }
  return 0.0;
}

std::vector<double> raps_scores_sorted(const std::vector<double>& probs_sorted,
                                       const RapsParams& params, double u) {
  std::vector<double> out(probs_sorted.size());
  double cum = 0.0;
  for (std::size_t i = 0; i < probs_sorted.size(); ++i) {
    const double rank = static_cast<double>(i + 1);
    const double over = std::max(0.0, rank - static_cast<double>(params.k_reg));
    out[i] = cum + u * probs_sorted[i] + params.lambda_reg * over;
    cum += probs_sorted[i];
  }
  return out;
}

}  // namespace

ScoreKind ScoreKind::sparsemax() { return ScoreKind(Family::kSparsemax, 2.0); }

ScoreKind ScoreKind::entmax(double gamma) {
  if (!(gamma > 1.0 && gamma < 2.0)) {
    throw Error(Errc::kInvalidGamma,
                "entmax score kind needs gamma strictly inside (1, 2); use sparsemax for 2");
  }
  return ScoreKind(Family::kEntmax, gamma);
}

ScoreKind ScoreKind::log_margin() { return ScoreKind(Family::kLogMargin, 1.0); }

ScoreKind ScoreKind::inv_prob() { return ScoreKind(Family::kInvProb, 0.0); }

ScoreKind ScoreKind::raps(const RapsParams& params) {
  check_raps(params, 1.0);
  ScoreKind kind(Family::kRaps, 0.0);
  kind.raps_ = params;
  return kind;
}

std::string ScoreKind::name() const {
  switch (family_) {
    case Family::kSparsemax: return "sparsemax";
    case Family::kEntmax: {
      std::ostringstream os;
      os << "entmax-" << gamma_;
      return os.str();
    }
    case Family::kLogMargin: return "log_margin";
    case Family::kInvProb: return "inv_prob";
    case Family::kRaps: return "raps";
  }
  return "unknown";
}

std::size_t rank_of_label(const LogitVector& z, std::size_t y) {
  check_label(z, y);
  std::size_t rank = 1;
  for (std::size_t j = 0; j < z.size(); ++j) {
    if (z[j] > z[y] || (j < y && z[j] == z[y])) ++rank;
  }
  return rank;
}

double score_sparsemax(const LogitVector& z, std::size_t y) {
  check_label(z, y);
  const auto order = descending_order(z.values());
  return gap_sum_at_rank(sorted_values(z, order), rank_of_label(z, y));
}

double score_entmax(const LogitVector& z, std::size_t y, double gamma) {
  check_entmax_gamma(gamma);
  if (gamma == 2.0) return score_sparsemax(z, y);
  check_label(z, y);
  const auto order = descending_order(z.values());
  return gap_norm_at_rank(sorted_values(z, order), rank_of_label(z, y), 1.0 / (gamma - 1.0));
}

double score_log_margin(const LogitVector& z, std::size_t y) {
  check_label(z, y);
  const auto values = z.values();
  return *std::max_element(values.begin(), values.end()) - z[y];
}

double score_inv_prob(const LogitVector& z, std::size_t y) {
  check_label(z, y);
  return 1.0 - softmax(z).probs[y];
}

double score_raps(const LogitVector& z, std::size_t y, const RapsParams& params, double u) {
  check_label(z, y);
  check_raps(params, u);
  const auto order = descending_order(z.values());
  const auto probs = softmax(z).probs;
  const std::size_t rank = rank_of_label(z, y);
  std::vector<double> sorted_probs(rank);
  for (std::size_t i = 0; i < rank; ++i) sorted_probs[i] = probs[order[i]];
  return raps_scores_sorted(sorted_probs, params, u)[rank - 1];
}

double score(const LogitVector& z, std::size_t y, const ScoreKind& kind, double u) {
  switch (kind.family()) {
    case ScoreKind::Family::kSparsemax: return score_sparsemax(z, y);
    case ScoreKind::Family::kEntmax: return score_entmax(z, y, kind.gamma());
    case ScoreKind::Family::kLogMargin: return score_log_margin(z, y);
    case ScoreKind::Family::kInvProb: return score_inv_prob(z, y);
    case ScoreKind::Family::kRaps: return score_raps(z, y, kind.raps_params(), u);
  }
  return 0.0;
}

std::vector<double> all_scores(const LogitVector& z, const ScoreKind& kind, double u) {
  std::vector<double> out(z.size());
  if (kind.family() == ScoreKind::Family::kInvProb) {
    const auto probs = softmax(z).probs;
    for (std::size_t j = 0; j < z.size(); ++j) out[j] = 1.0 - probs[j];
    return out;
  }
  const auto order = descending_order(z.values());
  if (kind.family() == ScoreKind::Family::kRaps) {
    check_raps(kind.raps_params(), u);
    const auto probs = softmax(z).probs;
    std::vector<double> sorted_probs(z.size());
    for (std::size_t i = 0; i < order.size(); ++i) sorted_probs[i] = probs[order[i]];
    const auto sorted_scores = raps_scores_sorted(sorted_probs, kind.raps_params(), u);
    for (std::size_t i = 0; i < order.size(); ++i) out[order[i]] = sorted_scores[i];
    return out;
  }
  const auto sorted = sorted_values(z, order);
  if (kind.family() == ScoreKind::Family::kSparsemax) {
    GapSum walk(sorted);
    for (std::size_t i = 0; i < order.size(); ++i) out[order[i]] = walk.advance();
    return out;
  }
  for (std::size_t i = 0; i < order.size(); ++i) {
    out[order[i]] = family_score_at_rank(sorted, i + 1, kind);
  }
  return out;
}

std::vector<std::size_t> labels_within(const LogitVector& z, const ScoreKind& kind,
                                       double threshold, double u) {
  std::vector<std::size_t> labels;
  if (!kind.is_sparse_family()) {
    const auto scores = all_scores(z, kind, u);
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (scores[j] <= threshold) labels.push_back(j);
    }
    return labels;
  }
  const auto order = descending_order(z.values());
  const auto sorted = sorted_values(z, order);
  GapSum walk(sorted);
  for (std::size_t i = 0; i < order.size(); ++i) {
    double s = 0.0;
    double lower_bound = 0.0;
    if (kind.family() == ScoreKind::Family::kSparsemax) {
      s = walk.advance();
      lower_bound = s;
    } else {
      s = family_score_at_rank(sorted, i + 1, kind);
      lower_bound = sorted[0] - sorted[i];
    }
    if (s <= threshold) labels.push_back(order[i]);
    // Later ranks have a larger lower bound, so none of them can qualify.
    if (lower_bound > threshold) break;
  }
  std::sort(labels.begin(), labels.end());
  return labels;
}

}  // namespace sparsecp
