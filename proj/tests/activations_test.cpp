#include "sparsecp/activations.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sparsecp/error.hpp"
#include "test_support.hpp"

namespace sparsecp {
namespace {

using testing::projection_by_enumeration;
using testing::random_logits;

const std::vector<double> kWorkedLogits{1.0, -1.0, -0.2, 0.4, -0.5};

double sum_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

EntmaxConfig with_gamma(double gamma) {
  EntmaxConfig cfg;
  cfg.gamma = gamma;
  return cfg;
}

TEST(LogitVectorTest, RejectsDegenerateInput) {
  EXPECT_THROW(LogitVector({1.0}), Error);
  EXPECT_THROW(LogitVector({1.0, NAN}), Error);
  EXPECT_THROW(LogitVector({1.0, INFINITY}), Error);
  EXPECT_NO_THROW(LogitVector({1.0, -1.0}));
}

TEST(ScaleTest, Examples) {
  EXPECT_EQ(scale(LogitVector({1, -1}), 2.0), LogitVector({2, -2}));
  EXPECT_EQ(scale(LogitVector(kWorkedLogits), 1.0), LogitVector(kWorkedLogits));
  EXPECT_EQ(scale(LogitVector({3, 7}), 0.0), LogitVector({0, 0}));
  EXPECT_THROW(scale(LogitVector({3, 7}), -1.0), Error);
}

TEST(DescendingOrderTest, TiesKeepLowerIndexFirst) {
  const std::vector<double> v{0.5, 2.0, 0.5, 2.0, -1.0};
  EXPECT_EQ(descending_order(v), (std::vector<std::size_t>{1, 3, 0, 2, 4}));
}

TEST(SoftmaxTest, Examples) {
  const auto uniform = softmax(LogitVector({0, 0, 0}));
  for (double p : uniform.probs) EXPECT_NEAR(p, 1.0 / 3.0, 1e-15);
  EXPECT_EQ(uniform.support.size(), 3u);
  EXPECT_EQ(uniform.gamma, 1.0);

  for (double c : {-3.0, 0.0, 7.5, 500.0}) {
    const auto p = softmax(LogitVector({c, c + std::log(3.0)}));
    EXPECT_NEAR(p.probs[0], 0.25, 1e-12) << c;
    EXPECT_NEAR(p.probs[1], 0.75, 1e-12) << c;
  }

  double previous = 0.0;
  for (double beta = 1.0; beta < 1e4; beta *= 2.0) {
    const double p0 = softmax(scale(LogitVector({1, 0}), beta)).probs[0];
    EXPECT_GE(p0, previous);
    previous = p0;
  }
  EXPECT_NEAR(previous, 1.0, 1e-12);
}

TEST(SoftmaxTest, TauIsLogPartition) {
  const LogitVector z(kWorkedLogits);
  const auto p = softmax(z);
  for (std::size_t j = 0; j < z.size(); ++j) {
    EXPECT_NEAR(p.probs[j], std::exp(z[j] - p.tau), 1e-15);
  }
}

TEST(SparsemaxTest, WorkedExample) {
  const auto p = sparsemax(LogitVector(kWorkedLogits));
  const std::vector<double> expected{0.8, 0.0, 0.0, 0.2, 0.0};
  const auto oracle = projection_by_enumeration(kWorkedLogits);
  for (std::size_t j = 0; j < expected.size(); ++j) {
    EXPECT_NEAR(p.probs[j], expected[j], 1e-12);
    EXPECT_NEAR(p.probs[j], oracle[j], 1e-9);
  }
  EXPECT_NEAR(p.tau, 0.2, 1e-12);
  EXPECT_EQ(p.support, (std::vector<std::size_t>{0, 3}));
  EXPECT_EQ(p.gamma, 2.0);
}

TEST(SparsemaxTest, EqualEntriesGiveUniform) {
  for (std::size_t k : {2u, 3u, 7u}) {
    const auto p = sparsemax(LogitVector(std::vector<double>(k, 1.7)));
    for (double v : p.probs) EXPECT_NEAR(v, 1.0 / static_cast<double>(k), 1e-12);
    EXPECT_EQ(p.support.size(), k);
  }
}

TEST(SparsemaxTest, DominantEntrySaturates) {
  const auto p = sparsemax(LogitVector({10, 0}));
  EXPECT_EQ(p.probs, (std::vector<double>{1.0, 0.0}));
  EXPECT_EQ(p.support, (std::vector<std::size_t>{0}));
}

// Every vector over a small grid, K = 2..4, plus random grid draws for K = 5, 6.
TEST(SparsemaxTest, MatchesEnumeratedProjectionOnGrid) {
  const std::vector<double> grid{-1.0, -0.5, -0.25, 0.0, 0.3, 0.5, 1.0};
  auto check = [](const std::vector<double>& z) {
    const auto p = sparsemax(LogitVector(z));
    const auto oracle = projection_by_enumeration(z);
    for (std::size_t j = 0; j < z.size(); ++j) ASSERT_NEAR(p.probs[j], oracle[j], 1e-9);
  };
  for (std::size_t k = 2; k <= 4; ++k) {
    std::vector<std::size_t> digits(k, 0);
    while (true) {
      std::vector<double> z(k);
      for (std::size_t j = 0; j < k; ++j) z[j] = grid[digits[j]];
      check(z);
      std::size_t pos = 0;
      while (pos < k && ++digits[pos] == grid.size()) digits[pos++] = 0;
      if (pos == k) break;
    }
  }
  Rng rng(11);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t k = 5 + rng.below(2);
    std::vector<double> z(k);
    for (double& v : z) v = grid[rng.below(grid.size())];
    check(z);
  }
}

TEST(EntmaxTest, SymmetricPairIsUniform) {
  const auto p = entmax(LogitVector({0, 0}), with_gamma(1.5));
  EXPECT_NEAR(p.probs[0], 0.5, 1e-12);
  EXPECT_NEAR(p.probs[1], 0.5, 1e-12);
}

TEST(EntmaxTest, EndpointsDelegate) {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const auto z = random_logits(rng, 2 + rng.below(8), -3, 3);
    const auto two = entmax(z, with_gamma(2.0));
    const auto sm = sparsemax(z);
    for (std::size_t j = 0; j < z.size(); ++j) EXPECT_NEAR(two.probs[j], sm.probs[j], 1e-6);
    EXPECT_EQ(entmax(z, with_gamma(1.0)).probs, softmax(z).probs);
  }
}

TEST(EntmaxTest, WorkedExampleMaximizesObjective) {
  const LogitVector z(kWorkedLogits);
  const auto p = entmax(z, with_gamma(1.5));
  const double best = entmax_objective(p.probs, z, 1.5);
  Rng rng(5);
  for (int trial = 0; trial < 1000; ++trial) {
    const double weight = std::pow(10.0, -6.0 + 6.0 * rng.uniform());
    const auto q = testing::perturb_on_simplex(rng, p.probs, weight);
    ASSERT_LE(entmax_objective(q, z, 1.5), best + 1e-9);
  }
}

TEST(EntmaxTest, RampFormHolds) {
  Rng rng(8);
  for (double gamma : {1.1, 1.25, 1.5, 1.75, 1.9}) {
    const auto z = random_logits(rng, 6, -2, 2);
    const auto p = entmax(z, with_gamma(gamma));
    for (std::size_t j = 0; j < z.size(); ++j) {
      const double ramp = std::max((gamma - 1.0) * z[j] - p.tau, 0.0);
      EXPECT_NEAR(p.probs[j], std::pow(ramp, 1.0 / (gamma - 1.0)), 1e-9);
      const bool in_support = std::binary_search(p.support.begin(), p.support.end(), j);
      EXPECT_EQ(in_support, p.probs[j] > 0.0);
    }
  }
}

TEST(EntmaxTest, Errors) {
  const LogitVector z({1, 2, 3});
  EXPECT_THROW(entmax(z, with_gamma(0.5)), Error);
  EXPECT_THROW(entmax(z, with_gamma(2.5)), Error);
  try {
    entmax(z, with_gamma(2.5));
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kInvalidGamma);
  }
  EntmaxConfig bad = with_gamma(1.5);
  bad.bisect_tol = 0.0;
  EXPECT_THROW(entmax(z, bad), Error);

  EntmaxConfig starved = with_gamma(1.5);
  starved.max_iters = 1;
  try {
    entmax(LogitVector({1.0, 0.9, 0.8, 0.7}), starved);
    FAIL() << "expected NonConvergence";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kNonConvergence);
  }
}

TEST(TsallisEntropyTest, Examples) {
  for (double gamma : {1.0, 1.5, 2.0}) {
    EXPECT_NEAR(tsallis_entropy(std::vector<double>{1, 0, 0, 0}, gamma), 0.0, 1e-15);
  }
  EXPECT_NEAR(tsallis_entropy(std::vector<double>{0.5, 0.5}, 1.0), std::log(2.0), 1e-15);
  EXPECT_NEAR(tsallis_entropy(std::vector<double>{0.5, 0.5}, 2.0), 0.25, 1e-15);
  EXPECT_THROW(tsallis_entropy(std::vector<double>{1.1, -0.1}, 1.5), Error);
  EXPECT_THROW(tsallis_entropy(std::vector<double>{0.5, 0.5}, 0.0), Error);
}

TEST(TsallisEntropyTest, ContinuousInGamma) {
  const std::vector<double> p{0.2, 0.3, 0.5};
  EXPECT_NEAR(tsallis_entropy(p, 1.0 + 1e-7), tsallis_entropy(p, 1.0), 1e-6);
}

TEST(EntmaxObjectiveTest, Examples) {
  EXPECT_NEAR(entmax_objective(std::vector<double>{1, 0}, LogitVector({10, 0}), 2.0), 10.0, 1e-15);
  EXPECT_NEAR(entmax_objective(std::vector<double>{0.5, 0.5}, LogitVector({0, 0}), 1.0),
              std::log(2.0), 1e-15);
  EXPECT_THROW(entmax_objective(std::vector<double>{1, 0, 0}, LogitVector({0, 0}), 1.0), Error);
}

// Properties over random inputs.

TEST(EntmaxPropertyTest, NormalizedAndNonnegative) {
  Rng rng(21);
  for (int trial = 0; trial < 500; ++trial) {
    const auto z = random_logits(rng, 2 + rng.below(30), -8, 8);
    const double gamma = 1.0 + rng.uniform();
    const auto p = entmax(z, with_gamma(gamma));
    EXPECT_NEAR(sum_of(p.probs), 1.0, 1e-8);
    for (double v : p.probs) EXPECT_GE(v, 0.0);
  }
}

TEST(EntmaxPropertyTest, ShiftInvariant) {
  Rng rng(22);
  for (int trial = 0; trial < 300; ++trial) {
    const auto z = random_logits(rng, 2 + rng.below(10), -4, 4);
    const double c = -50.0 + 100.0 * rng.uniform();
    std::vector<double> shifted(z.values().begin(), z.values().end());
    for (double& v : shifted) v += c;
    for (double gamma : {1.0, 1.3, 1.5, 1.8, 2.0}) {
      const auto a = entmax(z, with_gamma(gamma));
      const auto b = entmax(LogitVector(shifted), with_gamma(gamma));
      for (std::size_t j = 0; j < z.size(); ++j) ASSERT_NEAR(a.probs[j], b.probs[j], 1e-8);
    }
  }
}

TEST(EntmaxPropertyTest, PermutationEquivariant) {
  Rng rng(23);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t k = 2 + rng.below(9);
    const auto z = random_logits(rng, k, -4, 4);
    std::vector<std::size_t> perm(k);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    rng.shuffle(std::span<std::size_t>(perm));
    std::vector<double> permuted(k);
    for (std::size_t j = 0; j < k; ++j) permuted[j] = z[perm[j]];
    for (double gamma : {1.0, 1.5, 1.7, 2.0}) {
      const auto a = entmax(z, with_gamma(gamma));
      const auto b = entmax(LogitVector(permuted), with_gamma(gamma));
      for (std::size_t j = 0; j < k; ++j) ASSERT_NEAR(b.probs[j], a.probs[perm[j]], 1e-12);
    }
  }
}

TEST(EntmaxPropertyTest, ContinuousAtEndpoints) {
  Rng rng(24);
  for (int trial = 0; trial < 200; ++trial) {
    const auto z = random_logits(rng, 2 + rng.below(9), -3, 3);
    const auto near_one = entmax(z, with_gamma(1.0 + 1e-6));
    const auto near_two = entmax(z, with_gamma(2.0 - 1e-6));
    const auto soft = softmax(z);
    const auto sparse = sparsemax(z);
    for (std::size_t j = 0; j < z.size(); ++j) {
      ASSERT_NEAR(near_one.probs[j], soft.probs[j], 1e-3);
      ASSERT_NEAR(near_two.probs[j], sparse.probs[j], 1e-3);
    }
  }
}

TEST(EntmaxPropertyTest, SaturatesAtFiniteTemperature) {
  Rng rng(25);
  for (int trial = 0; trial < 100; ++trial) {
    const auto z = random_logits(rng, 2 + rng.below(9), -3, 3);
    for (double gamma : {1.1, 1.5, 1.9, 2.0}) {
      double beta = 1.0;
      while (entmax(scale(z, beta), with_gamma(gamma)).support.size() > 1) {
        beta *= 2.0;
        ASSERT_LT(beta, 0x1.0p64) << "no saturation";
      }
    }
  }
}

TEST(EntmaxPropertyTest, DominatesRandomSimplexPoints) {
  Rng rng(26);
  for (int trial = 0; trial < 100; ++trial) {
    const auto z = random_logits(rng, 2 + rng.below(6), -2, 2);
    const double gamma = 1.0 + rng.uniform();
    const auto p = entmax(z, with_gamma(gamma));
    const double best = entmax_objective(p.probs, z, gamma);
    for (int s = 0; s < 100; ++s) {
      const auto q = testing::random_simplex_point(rng, z.size());
      ASSERT_LE(entmax_objective(q, z, gamma), best + 1e-9);
    }
  }
}

}  // namespace
}  // namespace sparsecp
