#include "sparsecp/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "sparsecp/error.hpp"
#include "sparsecp/random.hpp"

namespace sparsecp {

namespace {

// Keeps test-set RAPS draws independent of calibration draws.
constexpr std::uint64_t kTestStreamOffset = 0xD1B54A32D192ED03ULL;

const char* const kPlotMetrics[] = {"avg_set_size", "coverage", "singleton_coverage",
                                    "singleton_ratio"};

std::string format_real(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

template <typename T>
T field(const Json& in, const char* key, T fallback) {
  if (!in.contains(key)) return fallback;
  try {
    return in.at(key).get<T>();
  } catch (const Json::exception&) {
    throw Error(Errc::kParseError, std::string("config field '") + key + "' has the wrong type");
  }
}

MethodSpec method_from_json(const Json& in) {
  if (!in.is_object()) throw Error(Errc::kParseError, "each method must be a JSON object");
  const auto kind_name = field<std::string>(in, "score_kind", "");
  MethodSpec method;
  if (kind_name == "opt_entmax") {
    method = MethodSpec::opt_entmax(field(in, "gamma_grid", default_gamma_grid()));
  } else {
    method = MethodSpec::fixed(read_score_kind(in));
    if (method.kind.family() == ScoreKind::Family::kRaps && field(in, "tune", false)) {
      method = MethodSpec::tuned_raps(method.kind.raps_params());
      method.lambda_grid = field(in, "lambda_grid", default_lambda_grid());
      method.k_grid = field(in, "k_grid", default_k_grid());
    }
  }
  method.label = field<std::string>(in, "name", "");
  return method;
}

std::optional<double> metric_value(const MetricsReport& m, std::string_view metric) {
  if (metric == "coverage") return m.coverage;
  if (metric == "avg_set_size") return m.avg_set_size;
  if (metric == "singleton_ratio") return m.singleton_ratio;
  if (metric == "singleton_coverage") return m.singleton_coverage;
  if (metric == "sscv") return m.sscv;
  return std::nullopt;
}

Error with_context(const Error& e, const std::string& method, double alpha, int split) {
  return Error(e.code(), "method " + method + ", alpha " + format_real(alpha) + ", split " +
                             std::to_string(split) + ": " + e.what());
}

Json to_json(const CellResult& cell) {
  Json out = Json::object();
  out["method"] = cell.method;
  out["alpha"] = cell.alpha;
  out["split"] = cell.split;
  out["seed"] = cell.seed;
  out["n_cal"] = cell.n_cal;
  out["n_test"] = cell.n_test;
  out["predictor"] = to_json(cell.predictor);
  if (cell.tuning) out["tuning"] = to_json(*cell.tuning);
  out["metrics"] = to_json(cell.metrics);
  return out;
}

}  // namespace

MethodSpec MethodSpec::fixed(const ScoreKind& kind) {
  MethodSpec m;
  m.kind = kind;
  return m;
}

MethodSpec MethodSpec::opt_entmax(std::vector<double> grid) {
  MethodSpec m;
  m.kind = ScoreKind::entmax(1.5);
  m.tuning = Tuning::kGamma;
  m.gamma_grid = std::move(grid);
  return m;
}

MethodSpec MethodSpec::tuned_raps(const RapsParams& base) {
  MethodSpec m;
  m.kind = ScoreKind::raps(base);
  m.tuning = Tuning::kRaps;
  return m;
}

std::string MethodSpec::name() const {
  if (!label.empty()) return label;
  switch (tuning) {
    case Tuning::kGamma: return "opt_entmax";
    case Tuning::kRaps: return "raps";
    case Tuning::kNone: break;
  }
  if (kind.family() == ScoreKind::Family::kRaps) {
    return "raps-" + format_real(kind.raps_params().lambda_reg) + "-" +
           std::to_string(kind.raps_params().k_reg);
  }
  return kind.name();
}

void ExperimentConfig::validate() const {
  if (methods.empty()) throw Error(Errc::kInvalidInput, "config lists no methods");
  if (alphas.empty()) throw Error(Errc::kInvalidInput, "config lists no alphas");
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (!(alphas[i] > 0.0 && alphas[i] < 1.0)) {
      throw Error(Errc::kInvalidInput, "alphas must lie in (0, 1)");
    }
    if (i > 0 && !(alphas[i] > alphas[i - 1])) {
      throw Error(Errc::kInvalidInput, "alphas must be strictly ascending");
    }
  }
  if (n_splits < 1) throw Error(Errc::kInvalidInput, "n_splits must be >= 1");
  if (!(cal_fraction > 0.0 && cal_fraction < 1.0)) {
    throw Error(Errc::kInvalidInput, "cal_fraction must lie in (0, 1)");
  }
  std::set<std::string> names;
  for (const auto& m : methods) {
    if (!names.insert(m.name()).second) {
      throw Error(Errc::kInvalidInput, "duplicate method name '" + m.name() + "'");
    }
  }
  if (!bins.empty()) SizeBins{bins};
}

ExperimentConfig config_from_json(const Json& in) {
  if (!in.is_object()) throw Error(Errc::kParseError, "config must be a JSON object");
  ExperimentConfig cfg;
  cfg.input_path = field<std::string>(in, "input_path", "");
  if (!in.contains("methods") || !in.at("methods").is_array()) {
    throw Error(Errc::kParseError, "config needs a 'methods' array");
  }
  for (const auto& m : in.at("methods")) cfg.methods.push_back(method_from_json(m));
  cfg.alphas = field(in, "alphas", std::vector<double>{});
  cfg.n_splits = field(in, "n_splits", 5);
  cfg.cal_fraction = field(in, "cal_fraction", 0.4);
  cfg.base_seed = field<std::uint64_t>(in, "base_seed", 0);
  if (in.contains("bins") && !in.at("bins").is_null()) {
    for (const auto& b : in.at("bins")) {
      if (!b.is_array() || b.size() != 2) {
        throw Error(Errc::kParseError, "each bin must be a [lo, hi] pair");
      }
      cfg.bins.emplace_back(b[0].get<std::size_t>(), b[1].get<std::size_t>());
    }
  }
  cfg.output_path = field<std::string>(in, "output_path", "");
  cfg.validate();
  return cfg;
}

Json to_json(const MethodSpec& method) {
  Json out = Json::object();
  out["name"] = method.name();
  switch (method.tuning) {
    case MethodSpec::Tuning::kGamma:
      out["score_kind"] = "opt_entmax";
      out["gamma_grid"] = method.gamma_grid;
      break;
    case MethodSpec::Tuning::kRaps:
      write_score_kind(out, method.kind);
      out["tune"] = true;
      out["lambda_grid"] = method.lambda_grid;
      out["k_grid"] = method.k_grid;
      break;
    case MethodSpec::Tuning::kNone:
      write_score_kind(out, method.kind);
      break;
  }
  return out;
}

Json to_json(const ExperimentConfig& cfg) {
  Json out = Json::object();
  out["input_path"] = cfg.input_path;
  Json methods = Json::array();
  for (const auto& m : cfg.methods) methods.push_back(to_json(m));
  out["methods"] = std::move(methods);
  out["alphas"] = cfg.alphas;
  out["n_splits"] = cfg.n_splits;
  out["cal_fraction"] = cfg.cal_fraction;
  out["base_seed"] = cfg.base_seed;
  Json bins = Json::array();
  for (const auto& [lo, hi] : cfg.bins) bins.push_back(Json::array({lo, hi}));
  out["bins"] = std::move(bins);
  out["output_path"] = cfg.output_path;
  return out;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  return run_experiment(cfg, load_dataset(cfg.input_path));
}

ExperimentReport run_experiment(const ExperimentConfig& cfg, const LabeledLogitDataset& data,
                                ExperimentObserver* observer) {
  cfg.validate();
  const SizeBins bins = cfg.bins.empty() ? SizeBins::standard(data.num_classes) : SizeBins(cfg.bins);
  if (bins.upper() < data.num_classes) {
    throw Error(Errc::kInvalidInput, "size bins do not reach the class count");
  }

  ExperimentReport report;
  report.config = cfg;
  const SplitSpec base_split{{cfg.cal_fraction, 1.0 - cfg.cal_fraction}, 0};
  for (int s = 0; s < cfg.n_splits; ++s) {
    report.split_seeds.push_back(cfg.base_seed + static_cast<std::uint64_t>(s));
  }

  std::vector<CellResult> cells;
  for (int s = 0; s < cfg.n_splits; ++s) {
    const std::uint64_t seed = report.split_seeds[static_cast<std::size_t>(s)];
    SplitSpec spec = base_split;
    spec.seed = seed;
    const auto parts = split(data, spec);
    const auto& cal = parts[0];
    const auto& test = parts[1];

    for (const auto& method : cfg.methods) {
      const std::string name = method.name();
      for (double alpha : cfg.alphas) {
        CellResult cell;
        cell.method = name;
        cell.alpha = alpha;
        cell.split = s;
        cell.seed = seed;
        try {
          const LabeledLogitDataset* calib_data = &cal;
          LabeledLogitDataset calib_part;
          ScoreKind kind = method.kind;
          if (method.tuning != MethodSpec::Tuning::kNone) {
            if (observer) observer->on_data("tune", name, alpha, s, cal);
            const auto tune_spec = SplitSpec::tuning(seed);
            cell.tuning = method.tuning == MethodSpec::Tuning::kGamma
                              ? tune_gamma(cal, alpha, method.gamma_grid, tune_spec)
                              : tune_raps(cal, alpha, method.lambda_grid, method.k_grid,
                                          tune_spec, method.kind.raps_params());
            kind = cell.tuning->chosen;
            // The final threshold comes from the tuning split's calibration
            // part; the tuning part has already been used to pick parameters.
            calib_part = std::move(split(cal, tune_spec)[0]);
            calib_data = &calib_part;
          }
          if (observer) observer->on_data("calibrate", name, alpha, s, *calib_data);
          cell.used_kind = kind;
          cell.predictor = calibrate(*calib_data, kind, alpha);
          cell.n_cal = calib_data->size();

          if (observer) observer->on_data("test", name, alpha, s, test);
          const bool randomized =
              kind.family() == ScoreKind::Family::kRaps && kind.raps_params().randomized;
          Rng rng(kind.raps_params().rng_seed ^ kTestStreamOffset ^ seed);
          EvaluationRun run;
          run.alpha = alpha;
          run.method_name = name;
          for (const auto& inst : test.instances) {
            const double u = randomized ? rng.uniform() : 1.0;
            run.sets.push_back(predict_set(inst.logits, cell.predictor, u));
            run.labels.push_back(inst.label);
          }
          cell.n_test = test.size();
          cell.metrics = evaluate(run, bins);
        } catch (const Error& e) {
          throw with_context(e, name, alpha, s);
        }
        cells.push_back(std::move(cell));
      }
    }
  }

  // Collate by (method in config order, alpha, split) regardless of loop order.
  std::map<std::string, std::size_t> method_rank;
  for (std::size_t i = 0; i < cfg.methods.size(); ++i) method_rank[cfg.methods[i].name()] = i;
  std::stable_sort(cells.begin(), cells.end(), [&](const CellResult& a, const CellResult& b) {
    return std::make_tuple(method_rank[a.method], a.alpha, a.split) <
           std::make_tuple(method_rank[b.method], b.alpha, b.split);
  });
  report.cells = std::move(cells);

  const char* const metrics[] = {"avg_set_size", "coverage", "singleton_coverage",
                                 "singleton_ratio", "sscv"};
  for (const auto& method : cfg.methods) {
    for (double alpha : cfg.alphas) {
      for (const char* metric : metrics) {
        std::vector<double> values;
        for (const auto& cell : report.cells) {
          if (cell.method != method.name() || cell.alpha != alpha) continue;
          if (auto v = metric_value(cell.metrics, metric)) values.push_back(*v);
        }
        // Aggregate only metrics present in every split.
        if (values.size() != static_cast<std::size_t>(cfg.n_splits)) continue;
        Aggregate agg;
        agg.method = method.name();
        agg.alpha = alpha;
        agg.metric = metric;
        agg.n = values.size();
        double sum = 0.0;
        for (double v : values) sum += v;
        agg.mean = sum / static_cast<double>(values.size());
        if (values.size() > 1) {
          double ss = 0.0;
          for (double v : values) ss += (v - agg.mean) * (v - agg.mean);
          agg.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
        }
        report.aggregates.push_back(std::move(agg));
      }
    }
  }
  return report;
}

Json to_json(const ExperimentReport& report) {
  Json out = Json::object();
  out["config"] = to_json(report.config);
  out["split_seeds"] = report.split_seeds;
  Json cells = Json::array();
  for (const auto& cell : report.cells) cells.push_back(to_json(cell));
  out["cells"] = std::move(cells);
  Json aggs = Json::array();
  for (const auto& a : report.aggregates) {
    Json j{{"method", a.method}, {"alpha", a.alpha}, {"metric", a.metric},
           {"n", a.n},           {"mean", a.mean}};
    j["std"] = a.stddev ? Json(*a.stddev) : Json(nullptr);
    aggs.push_back(std::move(j));
  }
  out["aggregates"] = std::move(aggs);
  return out;
}

void write_plot_data(std::ostream& out, const ExperimentReport& report) {
  struct Row {
    std::string method;
    double alpha;
    int split;
    std::string metric;
    double value;
  };
  std::vector<Row> rows;
  for (const auto& cell : report.cells) {
    for (const char* metric : kPlotMetrics) {
      if (auto v = metric_value(cell.metrics, metric)) {
        rows.push_back({cell.method, cell.alpha, cell.split, metric, *v});
      }
    }
  }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return std::tie(a.method, a.alpha, a.split, a.metric) <
           std::tie(b.method, b.alpha, b.split, b.metric);
  });
  out << "method,alpha,split,metric,value\n";
  for (const auto& r : rows) {
    out << r.method << ',' << fixed6(r.alpha) << ',' << r.split << ',' << r.metric << ','
        << fixed6(r.value) << '\n';
  }
}

void emit_plot_data(const ExperimentReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::kIoError, "cannot write " + path);
  write_plot_data(out, report);
  if (!out) throw Error(Errc::kIoError, "failed writing " + path);
}

void run_sweep(const std::string& config_path, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::ifstream in(config_path);
  if (!in) throw Error(Errc::kIoError, "cannot open " + config_path);
  Json raw;
  try {
    raw = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(Errc::kParseError, config_path + ": " + e.what());
  }
  ExperimentConfig cfg = config_from_json(raw);
  fs::path input(cfg.input_path);
  if (input.is_relative()) input = fs::path(config_path).parent_path() / input;

  const auto report = run_experiment(cfg, load_dataset(input.string()));

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(Errc::kIoError, "cannot create " + out_dir + ": " + ec.message());
  const auto report_path = (fs::path(out_dir) / "report.json").string();
  std::ofstream out(report_path, std::ios::binary);
  if (!out) throw Error(Errc::kIoError, "cannot write " + report_path);
  out << to_json(report).dump(2) << '\n';
  if (!out) throw Error(Errc::kIoError, "failed writing " + report_path);
  emit_plot_data(report, (fs::path(out_dir) / "plotdata.csv").string());
}

}  // namespace sparsecp
