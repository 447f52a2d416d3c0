#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sparsecp/conformal.hpp"

namespace sparsecp {

struct EvaluationRun {
  std::vector<PredictionSet> sets;
  std::vector<std::size_t> labels;
  double alpha = 0.1;
  std::string method_name;
};

// Inclusive set-size ranges partitioning {0..K}.
class SizeBins {
 public:
  explicit SizeBins(std::vector<std::pair<std::size_t, std::size_t>> ranges);

  // {0-1, 2-3, 4-6, 7-10, 11-K}, clipped to K for small label sets.
  static SizeBins standard(std::size_t num_classes);
  // One bin {0..K}.
  static SizeBins single(std::size_t num_classes);

  const std::vector<std::pair<std::size_t, std::size_t>>& ranges() const noexcept {
    return ranges_;
  }
  std::size_t upper() const noexcept { return ranges_.back().second; }
  // Index of the bin holding `size`; throws InvalidInput beyond the last edge.
  std::size_t bin_of(std::size_t size) const;

 private:
  std::vector<std::pair<std::size_t, std::size_t>> ranges_;
};

struct BinCoverage {
  std::size_t lo = 0;
  std::size_t hi = 0;
  std::size_t n = 0;
  std::optional<double> coverage;  // absent for empty bins
};

struct SingletonStats {
  double ratio = 0.0;
  std::optional<double> coverage;  // absent when nothing is a singleton
};

struct MetricsReport {
  double coverage = 0.0;
  double avg_set_size = 0.0;
  double singleton_ratio = 0.0;
  std::optional<double> singleton_coverage;
  std::vector<BinCoverage> stratified;
  std::optional<double> sscv;
};

double empirical_coverage(const EvaluationRun& run);
double avg_set_size(const EvaluationRun& run);
SingletonStats singleton_stats(const EvaluationRun& run);
std::vector<BinCoverage> size_stratified_coverage(const EvaluationRun& run, const SizeBins& bins);
// Largest |bin coverage - (1 - alpha)| over nonempty bins.
double sscv(const EvaluationRun& run, const SizeBins& bins);

MetricsReport evaluate(const EvaluationRun& run, const SizeBins& bins);

}  // namespace sparsecp
