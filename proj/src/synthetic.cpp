#include "sparsecp/synthetic.hpp"

#include <cmath>
#include <vector>

#include "sparsecp/error.hpp"
#include "sparsecp/random.hpp"

namespace sparsecp {

LabeledLogitDataset make_synthetic(const SyntheticSpec& spec, std::size_t n,
                                   std::uint64_t seed, std::uint64_t means_seed) {
  if (spec.num_classes < 2 || spec.dim < 1 || !(spec.noise > 0.0) ||
      !(spec.separation >= 0.0)) {
    throw Error(Errc::kInvalidInput, "synthetic task needs K >= 2, dim >= 1, noise > 0");
  }
  const std::size_t K = spec.num_classes;
  const std::size_t d = spec.dim;

  Rng mean_rng(means_seed);
  std::vector<std::vector<double>> means(K, std::vector<double>(d));
  for (auto& mu : means) {
    double norm = 0.0;
    do {
      norm = 0.0;
      for (double& v : mu) {
        v = mean_rng.normal();
        norm += v * v;
      }
    } while (norm == 0.0);
    norm = std::sqrt(norm);
    for (double& v : mu) v *= spec.separation / norm;
  }

  Rng rng(seed);
  const double inv_var = 1.0 / (spec.noise * spec.noise);
  LabeledLogitDataset data;
  data.num_classes = K;
  data.instances.reserve(n);
  std::vector<double> x(d);
  for (std::size_t i = 0; i < n; ++i) {
    const auto y = static_cast<std::size_t>(rng.below(K));
    for (std::size_t t = 0; t < d; ++t) x[t] = means[y][t] + spec.noise * rng.normal();
    std::vector<double> z(K);
    for (std::size_t k = 0; k < K; ++k) {
      double dot = 0.0;
      for (std::size_t t = 0; t < d; ++t) dot += means[k][t] * x[t];
      z[k] = dot * inv_var;
    }
    data.add(LogitVector(std::move(z)), y, i);
  }
  return data;
}

}  // namespace sparsecp
