#include "sparsecp/activations.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sparsecp/error.hpp"

namespace sparsecp {

namespace {

constexpr double kSimplexTol = 1e-6;
constexpr double kNegativeTol = 1e-9;
constexpr double kNonConvergenceMass = 1e-4;

void check_simplex(std::span<const double> p) {
  double sum = 0.0;
  for (double v : p) {
    if (!std::isfinite(v) || v < -kNegativeTol) {
      throw Error(Errc::kInvalidInput,
                  "probability vector has a negative or non-finite entry");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > kSimplexTol) {
    throw Error(Errc::kInvalidInput, "probability vector does not sum to one");
  }
}

// Sum of [a_j - tau]_+^delta.
double ramp_mass(std::span<const double> a, double tau, double delta) {
  double mass = 0.0;
  for (double v : a) {
    const double x = v - tau;
    if (x > 0.0) mass += std::pow(x, delta);
  }
  return mass;
}

}  // namespace

LogitVector::LogitVector(std::vector<double> values) : values_(std::move(values)) {
  if (values_.size() < 2) {
    throw Error(Errc::kInvalidInput, "logit vector needs at least two classes");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) {
      throw Error(Errc::kInvalidInput, "logit vector has a non-finite entry");
    }
  }
}

std::vector<std::size_t> descending_order(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  return order;
}

LogitVector scale(const LogitVector& z, double beta) {
  if (!std::isfinite(beta) || beta < 0.0) {
    throw Error(Errc::kInvalidInput, "temperature scale must be finite and >= 0");
  }
  std::vector<double> out(z.values().begin(), z.values().end());
  for (double& v : out) v *= beta;
  return LogitVector(std::move(out));
}

SparseDistribution softmax(const LogitVector& z) {
  const auto values = z.values();
  const double max_z = *std::max_element(values.begin(), values.end());
  SparseDistribution out;
  out.gamma = 1.0;
  out.probs.resize(values.size());
  double sum = 0.0;
  for (std::size_t j = 0; j < values.size(); ++j) {
    out.probs[j] = std::exp(values[j] - max_z);
    sum += out.probs[j];
  }
  for (double& p : out.probs) p /= sum;
  // tau is the log-partition function: p_j = exp(z_j - tau).
  out.tau = max_z + std::log(sum);
  out.support.resize(values.size());
  std::iota(out.support.begin(), out.support.end(), std::size_t{0});
  return out;
}

SparseDistribution sparsemax(const LogitVector& z) {
  const auto values = z.values();
  const auto order = descending_order(values);

  // Largest j with 1 + j z_(j) > z_(1) + ... + z_(j). j = 1 always qualifies.
  std::size_t support_size = 1;
  double cumsum = 0.0;
  double support_sum = 0.0;
  for (std::size_t j = 1; j <= order.size(); ++j) {
    const double zj = values[order[j - 1]];
    cumsum += zj;
    if (1.0 + static_cast<double>(j) * zj > cumsum) {
      support_size = j;
      support_sum = cumsum;
    }
  }

  SparseDistribution out;
  out.gamma = 2.0;
  out.tau = (support_sum - 1.0) / static_cast<double>(support_size);
  out.probs.resize(values.size());
  for (std::size_t j = 0; j < values.size(); ++j) {
    out.probs[j] = std::max(values[j] - out.tau, 0.0);
  }
  out.support.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(support_size));
  std::sort(out.support.begin(), out.support.end());
  return out;
}

SparseDistribution entmax(const LogitVector& z, const EntmaxConfig& cfg) {
  if (!(cfg.gamma >= 1.0 && cfg.gamma <= 2.0)) {
    throw Error(Errc::kInvalidGamma,
                "gamma must lie in [1, 2], got " + std::to_string(cfg.gamma));
  }
  if (!(cfg.bisect_tol > 0.0) || cfg.max_iters < 1) {
    throw Error(Errc::kInvalidInput, "entmax needs bisect_tol > 0 and max_iters >= 1");
  }
  if (cfg.gamma == 1.0) return softmax(z);
  if (cfg.gamma == 2.0) return sparsemax(z);

  const double gm1 = cfg.gamma - 1.0;
  const double delta = 1.0 / gm1;
  std::vector<double> a(z.values().begin(), z.values().end());
  for (double& v : a) v *= gm1;
  const double max_a = *std::max_element(a.begin(), a.end());

  // mass(lo) >= 1 since the top entry alone contributes 1; mass(hi) = 0.
  double lo = max_a - 1.0;
  double hi = max_a;
  double tau = lo;
  double mass = ramp_mass(a, tau, delta);
  for (int it = 0; it < cfg.max_iters; ++it) {
    const double mid = lo + 0.5 * (hi - lo);
    if (!(mid > lo && mid < hi)) break;  // bracket is down to adjacent doubles
    const double m = ramp_mass(a, mid, delta);
    if (m >= 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    tau = mid;
    mass = m;
    if (std::abs(m - 1.0) <= cfg.bisect_tol) break;
  }
  if (std::abs(mass - 1.0) > kNonConvergenceMass) {
    throw Error(Errc::kNonConvergence, "entmax bisection did not bracket the threshold");
  }

  SparseDistribution out;
  out.gamma = cfg.gamma;
  out.tau = tau;
  out.probs.assign(a.size(), 0.0);
  double sum = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double x = a[j] - tau;
    if (x > 0.0) {
      out.probs[j] = std::pow(x, delta);
      sum += out.probs[j];
      out.support.push_back(j);
    }
  }
  for (double& p : out.probs) p /= sum;
  return out;
}

double tsallis_entropy(std::span<const double> p, double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw Error(Errc::kInvalidInput, "entropy index gamma must be > 0");
  }
  check_simplex(p);
  if (std::abs(gamma - 1.0) < 1e-12) {
    double h = 0.0;
    for (double v : p) {
      if (v > 0.0) h -= v * std::log(v);
    }
    return h;
  }
  double power_sum = 0.0;
  for (double v : p) {
    if (v > 0.0) power_sum += std::pow(v, gamma);
  }
  return (1.0 - power_sum) / (gamma * (gamma - 1.0));
}

double entmax_objective(std::span<const double> p, const LogitVector& z, double gamma) {
  if (p.size() != z.size()) {
    throw Error(Errc::kDimensionMismatch, "probability and logit dimensions differ");
  }
  double dot = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) dot += p[j] * z[j];
  return dot + tsallis_entropy(p, gamma);
}

}  // namespace sparsecp
