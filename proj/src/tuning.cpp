#include "sparsecp/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sparsecp/error.hpp"
#include "sparsecp/random.hpp"

namespace sparsecp {

namespace {

// Offsets the RAPS seed so tuning-set draws differ from calibration draws.
constexpr std::uint64_t kTuneStreamOffset = 0x9E3779B97F4A7C15ULL;

std::pair<LabeledLogitDataset, LabeledLogitDataset> tuning_parts(
    const LabeledLogitDataset& cal, const SplitSpec& spec) {
  if (spec.fractions.size() != 2) {
    throw Error(Errc::kInvalidFractions, "tuning needs a two-part split");
  }
  if (cal.size() < 2) {
    throw Error(Errc::kInsufficientData, "tuning needs at least two calibration instances");
  }
  auto parts = split(cal, spec);
  if (parts[0].empty() || parts[1].empty()) {
    throw Error(Errc::kInsufficientData, "tuning split left an empty part");
  }
  return {std::move(parts[0]), std::move(parts[1])};
}

TuningResult pick_minimum(std::vector<TuningEntry> table) {
  // Table is already in parameter order; the first minimum wins ties.
  std::size_t best = 0;
  for (std::size_t i = 1; i < table.size(); ++i) {
    if (table[i].avg_set_size < table[best].avg_set_size) best = i;
  }
  TuningResult result{table[best].candidate, table[best].avg_set_size, {}};
  result.table = std::move(table);
  return result;
}

}  // namespace

std::vector<LabeledLogitDataset> split(const LabeledLogitDataset& data, const SplitSpec& spec) {
  if (spec.fractions.empty()) throw Error(Errc::kInvalidFractions, "no split fractions");
  double total = 0.0;
  for (double f : spec.fractions) {
    if (!(f > 0.0) || !std::isfinite(f)) {
      throw Error(Errc::kInvalidFractions, "split fractions must be positive");
    }
    total += f;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw Error(Errc::kInvalidFractions, "split fractions must sum to one");
  }
  const std::size_t n = data.size();
  if (n < spec.fractions.size()) {
    throw Error(Errc::kInsufficientData, "fewer instances than split parts");
  }

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(spec.seed);
  rng.shuffle(std::span<std::size_t>(idx));

  std::vector<LabeledLogitDataset> parts(spec.fractions.size());
  std::size_t offset = 0;
  for (std::size_t p = 0; p < parts.size(); ++p) {
    std::size_t count = n - offset;
    if (p + 1 < parts.size()) {
      count = static_cast<std::size_t>(std::floor(spec.fractions[p] * static_cast<double>(n) + 1e-9));
      count = std::min(count, n - offset);
    }
    parts[p].num_classes = data.num_classes;
    parts[p].instances.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
      parts[p].instances.push_back(data.instances[idx[offset + i]]);
    }
    offset += count;
  }
  return parts;
}

double average_set_size(const CalibratedPredictor& pred, const LabeledLogitDataset& data,
                        std::uint64_t u_seed) {
  if (data.empty()) throw Error(Errc::kInsufficientData, "no instances to measure");
  const bool randomized = pred.score_kind.family() == ScoreKind::Family::kRaps &&
                          pred.score_kind.raps_params().randomized;
  Rng rng(u_seed);
  double total = 0.0;
  for (const auto& inst : data.instances) {
    const double u = randomized ? rng.uniform() : 1.0;
    total += static_cast<double>(predict_set(inst.logits, pred, u).size());
  }
  return total / static_cast<double>(data.size());
}

TuningResult tune_gamma(const LabeledLogitDataset& cal, double alpha,
                        const std::vector<double>& grid, const SplitSpec& spec) {
  if (grid.empty()) throw Error(Errc::kInvalidInput, "gamma grid is empty");
  std::vector<double> gammas = grid;
  std::sort(gammas.begin(), gammas.end());
  gammas.erase(std::unique(gammas.begin(), gammas.end()), gammas.end());
  for (double g : gammas) {
    if (!(g > 1.0 && g < 2.0)) {
      throw Error(Errc::kInvalidGamma, "tuning grid gamma must lie in (1, 2)");
    }
  }
  const auto [calib, tune] = tuning_parts(cal, spec);

  std::vector<TuningEntry> table;
  table.reserve(gammas.size());
  for (double g : gammas) {
    const auto kind = ScoreKind::entmax(g);
    const auto pred = calibrate(calib, kind, alpha);
    table.push_back({kind, average_set_size(pred, tune)});
  }
  return pick_minimum(std::move(table));
}

TuningResult tune_raps(const LabeledLogitDataset& cal, double alpha,
                       const std::vector<double>& lambda_grid, const std::vector<int>& k_grid,
                       const SplitSpec& spec, const RapsParams& base) {
  if (lambda_grid.empty() || k_grid.empty()) {
    throw Error(Errc::kInvalidInput, "RAPS grids must be nonempty");
  }
  std::vector<double> lambdas = lambda_grid;
  std::sort(lambdas.begin(), lambdas.end());
  lambdas.erase(std::unique(lambdas.begin(), lambdas.end()), lambdas.end());
  std::vector<int> ks = k_grid;
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  const auto [calib, tune] = tuning_parts(cal, spec);

  std::vector<TuningEntry> table;
  table.reserve(lambdas.size() * ks.size());
  for (double lambda : lambdas) {
    for (int k : ks) {
      RapsParams params = base;
      params.lambda_reg = lambda;
      params.k_reg = k;
      const auto kind = ScoreKind::raps(params);
      const auto pred = calibrate(calib, kind, alpha);
      table.push_back({kind, average_set_size(pred, tune, base.rng_seed ^ kTuneStreamOffset)});
    }
  }
  return pick_minimum(std::move(table));
}

}  // namespace sparsecp
