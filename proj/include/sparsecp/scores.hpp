#pragma once

// Non-conformity scores. Lower means "more conforming"; a label enters the
// prediction set when its score is at most the calibrated threshold.
//
// The sparse family scores the gap vector between label y and every label
// ranked above it:
//   sparsemax   sum of gaps                      (delta = 1, gamma = 2)
//   entmax      delta-norm of gaps, delta = 1/(gamma - 1)
//   log-margin  largest gap, z_(1) - z_y         (delta -> infinity, gamma -> 1)
// Baselines: inv-prob (1 - softmax_y) and RAPS (regularized adaptive sets).

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "sparsecp/activations.hpp"

namespace sparsecp {

struct RapsParams {
  double lambda_reg = 0.0;
  // Ranks beyond k_reg are penalized. Values above K simply disable the
  // penalty, so grids written for large label sets stay usable on small ones.
  int k_reg = 1;
  bool randomized = false;
  std::uint64_t rng_seed = 0;

  bool operator==(const RapsParams&) const = default;
};

class ScoreKind {
 public:
  enum class Family { kSparsemax, kEntmax, kLogMargin, kInvProb, kRaps };

  static ScoreKind sparsemax();
  // gamma strictly inside (1, 2); the endpoints have their own kinds.
  static ScoreKind entmax(double gamma);
  static ScoreKind log_margin();
  static ScoreKind inv_prob();
  static ScoreKind raps(const RapsParams& params);

  Family family() const noexcept { return family_; }
  // 2 for sparsemax, the entmax gamma, 1 for log-margin; 0 for baselines.
  double gamma() const noexcept { return gamma_; }
  const RapsParams& raps_params() const noexcept { return raps_; }

  // True for the kinds whose calibrated threshold is an entmax temperature.
  bool has_temperature() const noexcept {
    return family_ == Family::kSparsemax || family_ == Family::kEntmax;
  }
  bool is_sparse_family() const noexcept {
    return has_temperature() || family_ == Family::kLogMargin;
  }

  std::string name() const;

  bool operator==(const ScoreKind&) const = default;

 private:
  ScoreKind(Family family, double gamma) : family_(family), gamma_(gamma) {}

  Family family_;
  double gamma_;
  RapsParams raps_{};
};

// 1-based position of label y under descending_order(z).
std::size_t rank_of_label(const LogitVector& z, std::size_t y);

double score_sparsemax(const LogitVector& z, std::size_t y);
// gamma in (1, 2]; at gamma = 2 the result is bit-identical to score_sparsemax.
double score_entmax(const LogitVector& z, std::size_t y, double gamma);
double score_log_margin(const LogitVector& z, std::size_t y);
double score_inv_prob(const LogitVector& z, std::size_t y);
// u in [0, 1] is the randomization draw; u = 1 gives the deterministic score.
double score_raps(const LogitVector& z, std::size_t y, const RapsParams& params,
                  double u);

// Dispatch on kind. `u` is only read by RAPS.
double score(const LogitVector& z, std::size_t y, const ScoreKind& kind, double u = 1.0);

// All K scores of one instance, sorting z once. Entry j is the score of label j
// and equals score(z, j, kind, u) bit for bit.
std::vector<double> all_scores(const LogitVector& z, const ScoreKind& kind, double u = 1.0);

// Labels whose score is <= threshold, ascending. Equivalent to filtering
// all_scores, but the sparse family stops at the first rank that exceeds the
// threshold since those scores are non-decreasing in rank.
std::vector<std::size_t> labels_within(const LogitVector& z, const ScoreKind& kind,
                                       double threshold, double u = 1.0);

}  // namespace sparsecp
