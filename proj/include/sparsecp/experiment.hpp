#pragma once

// Multi-split experiment driver: for each seeded calibration/test split, each
// method and each alpha, (optionally tune) -> calibrate -> predict -> measure.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sparsecp/conformal.hpp"
#include "sparsecp/dataset.hpp"
#include "sparsecp/metrics.hpp"
#include "sparsecp/scores.hpp"
#include "sparsecp/serialization.hpp"
#include "sparsecp/tuning.hpp"

namespace sparsecp {

struct MethodSpec {
  enum class Tuning { kNone, kGamma, kRaps };

  ScoreKind kind = ScoreKind::sparsemax();
  Tuning tuning = Tuning::kNone;
  std::vector<double> gamma_grid = default_gamma_grid();
  std::vector<double> lambda_grid = default_lambda_grid();
  std::vector<int> k_grid = default_k_grid();
  std::string label;  // overrides the derived name when nonempty

  static MethodSpec fixed(const ScoreKind& kind);
  static MethodSpec opt_entmax(std::vector<double> grid = default_gamma_grid());
  static MethodSpec tuned_raps(const RapsParams& base = {});

  std::string name() const;
};

struct ExperimentConfig {
  std::string input_path;
  std::vector<MethodSpec> methods;
  std::vector<double> alphas;
  int n_splits = 5;
  double cal_fraction = 0.4;
  std::uint64_t base_seed = 0;
  // Empty means SizeBins::standard(K) for the loaded data.
  std::vector<std::pair<std::size_t, std::size_t>> bins;
  std::string output_path;

  void validate() const;
};

ExperimentConfig config_from_json(const Json& in);
Json to_json(const ExperimentConfig& cfg);
Json to_json(const MethodSpec& method);

struct CellResult {
  std::string method;
  double alpha = 0.0;
  int split = 0;
  std::uint64_t seed = 0;
  ScoreKind used_kind = ScoreKind::sparsemax();  // after tuning
  CalibratedPredictor predictor;
  std::optional<TuningResult> tuning;
  std::size_t n_cal = 0;
  std::size_t n_test = 0;
  MetricsReport metrics;
};

struct Aggregate {
  std::string method;
  double alpha = 0.0;
  std::string metric;
  std::size_t n = 0;
  double mean = 0.0;
  std::optional<double> stddev;  // sample (n - 1) deviation; absent for n = 1
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<std::uint64_t> split_seeds;
  std::vector<CellResult> cells;  // method (config order), alpha, split
  std::vector<Aggregate> aggregates;
};

// Sees every dataset the driver hands to a stage, so tests can audit that
// tuning and calibration never touch test rows.
class ExperimentObserver {
 public:
  virtual ~ExperimentObserver() = default;
  // stage is one of "tune", "calibrate", "test".
  virtual void on_data(std::string_view stage, std::string_view method, double alpha,
                       int split, const LabeledLogitDataset& data) = 0;
};

ExperimentReport run_experiment(const ExperimentConfig& cfg);
ExperimentReport run_experiment(const ExperimentConfig& cfg, const LabeledLogitDataset& data,
                                ExperimentObserver* observer = nullptr);

Json to_json(const ExperimentReport& report);

// Long-format CSV: method,alpha,split,metric,value with 6-decimal reals,
// sorted by (method, alpha, split, metric). Absent metrics are omitted.
void write_plot_data(std::ostream& out, const ExperimentReport& report);
void emit_plot_data(const ExperimentReport& report, const std::string& path);

// Loads the config, runs it, and writes <out_dir>/report.json and
// <out_dir>/plotdata.csv.
void run_sweep(const std::string& config_path, const std::string& out_dir);

}  // namespace sparsecp
