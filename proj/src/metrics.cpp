#include "sparsecp/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "sparsecp/error.hpp"

namespace sparsecp {

namespace {

void check_run(const EvaluationRun& run) {
  if (run.sets.size() != run.labels.size()) {
    throw Error(Errc::kInvalidInput, "run has " + std::to_string(run.sets.size()) +
                                         " sets but " + std::to_string(run.labels.size()) +
                                         " labels");
  }
  if (run.sets.empty()) throw Error(Errc::kEmptyRun, "evaluation run is empty");
}

double ratio(std::size_t num, std::size_t den) {
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

SizeBins::SizeBins(std::vector<std::pair<std::size_t, std::size_t>> ranges)
    : ranges_(std::move(ranges)) {
  if (ranges_.empty()) throw Error(Errc::kInvalidInput, "size bins are empty");
  std::size_t expect = 0;
  for (const auto& [lo, hi] : ranges_) {
    if (lo != expect || hi < lo) {
      throw Error(Errc::kInvalidInput,
                  "size bins must be ordered, disjoint and contiguous from 0");
    }
    expect = hi + 1;
  }
}

SizeBins SizeBins::standard(std::size_t num_classes) {
  static constexpr std::pair<std::size_t, std::size_t> kEdges[] = {
      {0, 1}, {2, 3}, {4, 6}, {7, 10}};
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  for (const auto& [lo, hi] : kEdges) {
    if (lo > num_classes) break;
    ranges.emplace_back(lo, std::min(hi, num_classes));
  }
  if (num_classes >= 11) ranges.emplace_back(11, num_classes);
  return SizeBins(std::move(ranges));
}

SizeBins SizeBins::single(std::size_t num_classes) { return SizeBins({{0, num_classes}}); }

std::size_t SizeBins::bin_of(std::size_t size) const {
  for (std::size_t g = 0; g < ranges_.size(); ++g) {
    if (size <= ranges_[g].second) return g;
  }
  throw Error(Errc::kInvalidInput,
              "set size " + std::to_string(size) + " beyond the last size bin");
}

double empirical_coverage(const EvaluationRun& run) {
  check_run(run);
  std::size_t covered = 0;
  for (std::size_t i = 0; i < run.sets.size(); ++i) {
    if (run.sets[i].contains(run.labels[i])) ++covered;
  }
  return ratio(covered, run.sets.size());
}

double avg_set_size(const EvaluationRun& run) {
  check_run(run);
  std::size_t total = 0;
  for (const auto& s : run.sets) total += s.size();
  return ratio(total, run.sets.size());
}

SingletonStats singleton_stats(const EvaluationRun& run) {
  check_run(run);
  std::size_t singletons = 0;
  std::size_t covered = 0;
  for (std::size_t i = 0; i < run.sets.size(); ++i) {
    if (run.sets[i].size() != 1) continue;
    ++singletons;
    if (run.sets[i].labels.front() == run.labels[i]) ++covered;
  }
  SingletonStats stats;
  stats.ratio = ratio(singletons, run.sets.size());
  if (singletons > 0) stats.coverage = ratio(covered, singletons);
  return stats;
}

std::vector<BinCoverage> size_stratified_coverage(const EvaluationRun& run,
                                                  const SizeBins& bins) {
  check_run(run);
  std::vector<BinCoverage> out;
  std::vector<std::size_t> covered(bins.ranges().size(), 0);
  for (const auto& [lo, hi] : bins.ranges()) out.push_back({lo, hi, 0, std::nullopt});
  for (std::size_t i = 0; i < run.sets.size(); ++i) {
    const std::size_t g = bins.bin_of(run.sets[i].size());
    ++out[g].n;
    if (run.sets[i].contains(run.labels[i])) ++covered[g];
  }
  for (std::size_t g = 0; g < out.size(); ++g) {
    if (out[g].n > 0) out[g].coverage = ratio(covered[g], out[g].n);
  }
  return out;
}

double sscv(const EvaluationRun& run, const SizeBins& bins) {
  const auto strata = size_stratified_coverage(run, bins);
  const double target = 1.0 - run.alpha;
  double worst = 0.0;
  for (const auto& bin : strata) {
    if (bin.coverage) worst = std::max(worst, std::abs(*bin.coverage - target));
  }
  return worst;
}

MetricsReport evaluate(const EvaluationRun& run, const SizeBins& bins) {
  MetricsReport report;
  report.coverage = empirical_coverage(run);
  report.avg_set_size = avg_set_size(run);
  const auto singles = singleton_stats(run);
  report.singleton_ratio = singles.ratio;
  report.singleton_coverage = singles.coverage;
  report.stratified = size_stratified_coverage(run, bins);
  report.sscv = sscv(run, bins);
  return report;
}

}  // namespace sparsecp
