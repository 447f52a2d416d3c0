#include "sparsecp/conformal.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "sparsecp/error.hpp"
#include "sparsecp/synthetic.hpp"
#include "test_support.hpp"

namespace sparsecp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const LogitVector kZ({1.0, -1.0, -0.2, 0.4, -0.5});

LabeledLogitDataset make_dataset(std::size_t k,
                                 const std::vector<std::pair<std::vector<double>, std::size_t>>& rows) {
  LabeledLogitDataset data;
  data.num_classes = k;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    data.add(LogitVector(rows[i].first), rows[i].second, i);
  }
  return data;
}

CalibratedPredictor fixed_predictor(const ScoreKind& kind, double q_hat, std::size_t k) {
  CalibratedPredictor pred;
  pred.score_kind = kind;
  pred.q_hat = q_hat;
  pred.num_classes = k;
  pred.calib_n = 1;
  return pred;
}

LabeledLogitDataset make_synthetic_like() {
  SyntheticSpec spec;
  spec.num_classes = 6;
  spec.separation = 2.0;
  return make_synthetic(spec, 300, 17);
}

std::vector<std::size_t> all_labels(std::size_t k) {
  std::vector<std::size_t> out(k);
  for (std::size_t j = 0; j < k; ++j) out[j] = j;
  return out;
}

TEST(ConformalQuantileTest, Examples) {
  const std::vector<double> s{0.1, 0.2, 0.3, 0.4};
  EXPECT_EQ(conformal_quantile(s, 0.5), 0.3);
  EXPECT_EQ(conformal_quantile(s, 0.1), kInf);
  EXPECT_EQ(conformal_quantile(std::vector<double>{7.0}, 0.4), kInf);
  EXPECT_EQ(conformal_quantile(std::vector<double>{0.4, 0.1, 0.3, 0.2}, 0.5), 0.3);
}

TEST(ConformalQuantileTest, Errors) {
  try {
    conformal_quantile(std::vector<double>{}, 0.1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kEmptyCalibration);
  }
  EXPECT_THROW(conformal_quantile(std::vector<double>{1.0}, 0.0), Error);
  EXPECT_THROW(conformal_quantile(std::vector<double>{1.0}, 1.0), Error);
  EXPECT_THROW(conformal_quantile(std::vector<double>{NAN}, 0.5), Error);
}

// alpha = a / 100 lets the rank be computed in exact integer arithmetic.
TEST(ConformalQuantileTest, MatchesIntegerOrderStatistic) {
  Rng rng(1);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = 1 + rng.below(60);
    std::vector<double> s(n);
    for (double& v : s) v = std::round(20.0 * rng.uniform()) / 4.0;  // duplicates
    const std::uint64_t a = 1 + rng.below(99);
    const std::uint64_t num = (n + 1) * (100 - a);
    const std::size_t r = static_cast<std::size_t>((num + 99) / 100);
    const double expected = r > n ? kInf : testing::order_statistic(s, r);
    ASSERT_EQ(conformal_quantile(s, static_cast<double>(a) / 100.0), expected)
        << "n=" << n << " a=" << a;
  }
}

TEST(CalibrateTest, SparsemaxToySet) {
  // Sparsemax scores by hand: 0, 1, (3-0)+(1-0) = 4, (1-0)+(0.5-0) = 1.5.
  const auto cal = make_dataset(3, {{{2, 1, 0}, 0}, {{2, 1, 0}, 1}, {{0, 1, 3}, 0}, {{1, 0.5, 0}, 2}});
  const auto half = calibrate(cal, ScoreKind::sparsemax(), 0.5);
  EXPECT_DOUBLE_EQ(half.q_hat, 1.5);  // r = ceil(2.5) = 3
  ASSERT_TRUE(half.beta_inv.has_value());
  EXPECT_DOUBLE_EQ(*half.beta_inv, 1.5);
  EXPECT_EQ(half.calib_n, 4u);
  EXPECT_EQ(half.num_classes, 3u);
  EXPECT_DOUBLE_EQ(calibrate(cal, ScoreKind::sparsemax(), 0.3).q_hat, 4.0);  // r = 4

  const auto vacuous = calibrate(cal, ScoreKind::sparsemax(), 0.1);  // r = 5 > 4
  EXPECT_EQ(vacuous.q_hat, kInf);
  EXPECT_EQ(predict_set(LogitVector({5, 0, -5}), vacuous).labels, all_labels(3));
}

TEST(CalibrateTest, EntmaxTemperature) {
  const auto cal = make_dataset(2, {{{1, 0}, 0}, {{1, 0}, 1}, {{1, 0}, 1}, {{3, 0}, 1}});
  const auto pred = calibrate(cal, ScoreKind::entmax(1.5), 0.5);
  EXPECT_DOUBLE_EQ(pred.q_hat, 1.0);
  ASSERT_TRUE(pred.beta_inv.has_value());
  EXPECT_DOUBLE_EQ(*pred.beta_inv, 0.5);
  EXPECT_FALSE(calibrate(cal, ScoreKind::log_margin(), 0.5).beta_inv.has_value());
  EXPECT_FALSE(calibrate(cal, ScoreKind::inv_prob(), 0.5).beta_inv.has_value());
}

TEST(CalibrateTest, Errors) {
  LabeledLogitDataset empty;
  empty.num_classes = 3;
  try {
    calibrate(empty, ScoreKind::sparsemax(), 0.1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kEmptyCalibration);
  }
  const auto cal = make_dataset(2, {{{1, 0}, 0}});
  EXPECT_THROW(calibrate(cal, ScoreKind::sparsemax(), 1.5), Error);
}

TEST(CalibrateTest, RandomizedRapsIsSeeded) {
  const auto cal = make_synthetic_like();
  RapsParams params;
  params.lambda_reg = 0.01;
  params.k_reg = 2;
  params.randomized = true;
  params.rng_seed = 99;
  const auto a = calibrate(cal, ScoreKind::raps(params), 0.2);
  const auto b = calibrate(cal, ScoreKind::raps(params), 0.2);
  EXPECT_EQ(a.q_hat, b.q_hat);
  params.randomized = false;
  const auto det = calibrate(cal, ScoreKind::raps(params), 0.2);
  // u <= 1 can only lower every calibration score.
  EXPECT_LE(a.q_hat, det.q_hat);
}

TEST(PredictSetTest, Examples) {
  EXPECT_EQ(predict_set(kZ, fixed_predictor(ScoreKind::sparsemax(), 0.0, 5)).labels,
            (std::vector<std::size_t>{0}));
  EXPECT_EQ(predict_set(kZ, fixed_predictor(ScoreKind::entmax(1.5), 0.0, 5)).labels,
            (std::vector<std::size_t>{0}));
  EXPECT_EQ(predict_set(kZ, fixed_predictor(ScoreKind::sparsemax(), kInf, 5)).labels,
            all_labels(5));
  const auto set = predict_set(kZ, fixed_predictor(ScoreKind::sparsemax(), 0.7, 5));
  EXPECT_EQ(set.labels, (std::vector<std::size_t>{0, 3}));
  EXPECT_EQ(set.labels, support_set_via_entmax(kZ, 1.0 / 0.7, 2.0).labels);
  EXPECT_TRUE(set.contains(3));
  EXPECT_FALSE(set.contains(2));
}

TEST(PredictSetTest, DimensionMismatch) {
  try {
    predict_set(LogitVector({1, 2}), fixed_predictor(ScoreKind::sparsemax(), 1.0, 3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kDimensionMismatch);
  }
}

TEST(SupportSetViaEntmaxTest, Examples) {
  EXPECT_EQ(support_set_via_entmax(kZ, 1.0 / 0.7, 2.0).labels, (std::vector<std::size_t>{0, 3}));
  for (double gamma : {1.25, 1.5, 2.0}) {
    EXPECT_EQ(support_set_via_entmax(kZ, 1e6, gamma).labels, (std::vector<std::size_t>{0}));
    EXPECT_EQ(support_set_via_entmax(kZ, 1e-6, gamma).labels, all_labels(5));
  }
  EXPECT_THROW(support_set_via_entmax(kZ, 1.0, 1.0), Error);
  EXPECT_THROW(support_set_via_entmax(kZ, 0.0, 1.5), Error);
}

// The conformal set under the delta-norm score with threshold q equals the
// support of entmax at beta = delta / q.
TEST(ConformalPropertyTest, ThresholdEqualsEntmaxSupport) {
  Rng rng(2);
  for (int trial = 0; trial < 2000; ++trial) {
    const double gamma = std::vector<double>{1.25, 1.5, 1.75, 2.0}[rng.below(4)];
    const double q = std::vector<double>{0.1, 0.5, 1.0, 3.0}[rng.below(4)];
    const auto z = testing::random_logits(rng, 2 + rng.below(9), -5, 5);
    const ScoreKind kind = gamma == 2.0 ? ScoreKind::sparsemax() : ScoreKind::entmax(gamma);
    bool near_boundary = false;
    for (std::size_t y = 0; y < z.size(); ++y) {
      if (std::abs(score(z, y, kind) - q) <= 1e-9) near_boundary = true;
    }
    if (near_boundary) continue;
    const double delta = 1.0 / (gamma - 1.0);
    ASSERT_EQ(predict_set(z, fixed_predictor(kind, q, z.size())),
              support_set_via_entmax(z, delta / q, gamma));
  }
}

// At gamma = 2: j is in the support iff the sum of gaps above it is below 1/beta.
TEST(ConformalPropertyTest, SparsemaxSupportCondition) {
  Rng rng(3);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto z = testing::random_logits(rng, 2 + rng.below(9), -5, 5);
    const double beta = std::exp(-3.0 + 6.0 * rng.uniform());
    std::vector<std::size_t> expected;
    for (std::size_t j = 0; j < z.size(); ++j) {
      double gaps = 0.0;
      for (std::size_t k = 0; k < z.size(); ++k) {
        if (z[k] > z[j]) gaps += z[k] - z[j];
      }
      if (gaps < 1.0 / beta) expected.push_back(j);
    }
    ASSERT_EQ(support_set_via_entmax(z, beta, 2.0).labels, expected);
  }
}

TEST(ConformalPropertyTest, NestedInAlphaAndThreshold) {
  const auto data = make_synthetic_like();
  for (const auto& kind : {ScoreKind::sparsemax(), ScoreKind::entmax(1.5),
                           ScoreKind::log_margin(), ScoreKind::inv_prob()}) {
    double previous_q = kInf;
    std::vector<PredictionSet> previous;
    for (double alpha : {0.02, 0.05, 0.1, 0.2, 0.4}) {
      const auto pred = calibrate(data, kind, alpha);
      EXPECT_LE(pred.q_hat, previous_q);
      previous_q = pred.q_hat;
      std::vector<PredictionSet> sets;
      for (const auto& inst : data.instances) sets.push_back(predict_set(inst.logits, pred));
      for (std::size_t i = 0; i < previous.size(); ++i) {
        for (std::size_t label : sets[i].labels) ASSERT_TRUE(previous[i].contains(label));
      }
      previous = std::move(sets);
    }
  }
}

}  // namespace
}  // namespace sparsecp
