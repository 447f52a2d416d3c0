// sparsecp: conformal prediction with sparse-activation scores.
//
//   sparsecp transform --gamma G --beta B < logits.csv
//   sparsecp calibrate --input F --score S [--gamma G] --alpha A --seed N --out pred.json
//   sparsecp evaluate  --predictor pred.json --input F --out report.json
//   sparsecp sweep     --config cfg.json --out-dir D
//   sparsecp synth     --n N --seed S --out F [--classes K --dim D --separation R --noise S]
//
// Exit codes: 0 success, 2 parse/validation error, 3 runtime error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "sparsecp/activations.hpp"
#include "sparsecp/conformal.hpp"
#include "sparsecp/dataset.hpp"
#include "sparsecp/error.hpp"
#include "sparsecp/experiment.hpp"
#include "sparsecp/metrics.hpp"
#include "sparsecp/random.hpp"
#include "sparsecp/serialization.hpp"
#include "sparsecp/synthetic.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;
// Matches the offset the experiment driver uses for test-set RAPS draws.
constexpr std::uint64_t kEvalStreamOffset = 0xD1B54A32D192ED03ULL;

using sparsecp::Errc;
using sparsecp::Error;
using sparsecp::Json;

void write_json(const std::string& path, const Json& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::kIoError, "cannot write " + path);
  out << doc.dump(2) << '\n';
  if (!out) throw Error(Errc::kIoError, "failed writing " + path);
}

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kIoError, "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(Errc::kParseError, path + ": " + e.what());
  }
}

// Rows of logits on stdin; a leading `label` column is accepted and ignored.
void run_transform(double gamma, double beta) {
  std::string line;
  std::size_t line_no = 0;
  bool has_label = false;
  bool header_seen = false;
  std::size_t width = 0;
  sparsecp::EntmaxConfig cfg;
  cfg.gamma = gamma;
  char buf[64];
  while (std::getline(std::cin, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (!header_seen) {
      header_seen = true;
      has_label = !fields.empty() && fields[0] == "label";
      width = fields.size() - (has_label ? 1 : 0);
      if (width < 2) throw Error(Errc::kParseError, "need at least two logit columns");
      for (std::size_t j = 0; j < width; ++j) std::cout << (j ? "," : "") << 'p' << j;
      std::cout << '\n';
      continue;
    }
    if (fields.size() != width + (has_label ? 1 : 0)) {
      throw Error(Errc::kInconsistentWidth, "line " + std::to_string(line_no) +
                                                ": expected " + std::to_string(width) +
                                                " logits");
    }
    std::vector<double> z;
    for (std::size_t j = has_label ? 1 : 0; j < fields.size(); ++j) {
      try {
        std::size_t used = 0;
        z.push_back(std::stod(fields[j], &used));
        if (used != fields[j].size()) throw std::invalid_argument(fields[j]);
      } catch (const std::exception&) {
        throw Error(Errc::kParseError,
                    "line " + std::to_string(line_no) + ": bad real '" + fields[j] + "'");
      }
    }
    const auto dist = sparsecp::entmax(sparsecp::scale(sparsecp::LogitVector(std::move(z)), beta), cfg);
    for (std::size_t j = 0; j < dist.probs.size(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.6f", dist.probs[j]);
      std::cout << (j ? "," : "") << buf;
    }
    std::cout << '\n';
  }
}

sparsecp::ScoreKind parse_score(const std::string& name, double gamma, double lambda_reg,
                                int k_reg, bool randomized, std::uint64_t seed) {
  Json spec{{"score_kind", name}, {"gamma", gamma}};
  if (name == "raps") {
    spec["raps_params"] = Json{{"lambda_reg", lambda_reg},
                               {"k_reg", k_reg},
                               {"randomized", randomized},
                               {"rng_seed", seed}};
  }
  return sparsecp::read_score_kind(spec);
}

void run_evaluate(const std::string& predictor_path, const std::string& input,
                  const std::string& out_path) {
  const auto pred = sparsecp::predictor_from_json(read_json(predictor_path));
  const auto data = sparsecp::load_dataset(input);
  const bool randomized = pred.score_kind.family() == sparsecp::ScoreKind::Family::kRaps &&
                          pred.score_kind.raps_params().randomized;
  sparsecp::Rng rng(pred.score_kind.raps_params().rng_seed ^ kEvalStreamOffset);
  sparsecp::EvaluationRun run;
  run.alpha = pred.alpha;
  run.method_name = pred.score_kind.name();
  for (const auto& inst : data.instances) {
    const double u = randomized ? rng.uniform() : 1.0;
    run.sets.push_back(sparsecp::predict_set(inst.logits, pred, u));
    run.labels.push_back(inst.label);
  }
  Json doc = sparsecp::to_json(sparsecp::evaluate(run, sparsecp::SizeBins::standard(data.num_classes)));
  doc["method"] = run.method_name;
  doc["alpha"] = pred.alpha;
  doc["n"] = data.size();
  write_json(out_path, doc);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conformal prediction with sparse-activation non-conformity scores"};
  app.require_subcommand(1);

  double t_gamma = 1.5;
  double t_beta = 1.0;
  auto* transform = app.add_subcommand("transform", "Print entmax(beta * z) for logits read from stdin");
  transform->add_option("--gamma", t_gamma, "Entmax index in [1, 2]")->required();
  transform->add_option("--beta", t_beta, "Inverse temperature")->required();

  std::string c_input, c_score, c_out;
  double c_gamma = 1.5, c_alpha = 0.1, c_lambda = 0.01;
  int c_k = 5;
  bool c_randomized = false;
  std::uint64_t c_seed = 0;
  auto* cal = app.add_subcommand("calibrate", "Calibrate a conformal predictor on a logits CSV");
  cal->add_option("--input", c_input, "Calibration CSV (label,z0,...)")->required();
  cal->add_option("--score", c_score, "sparsemax | entmax | log_margin | inv_prob | raps")->required();
  cal->add_option("--gamma", c_gamma, "Entmax index for --score entmax");
  cal->add_option("--alpha", c_alpha, "Miscoverage level in (0, 1)")->required();
  cal->add_option("--seed", c_seed, "Seed for randomized RAPS");
  cal->add_option("--lambda-reg", c_lambda, "RAPS penalty weight");
  cal->add_option("--k-reg", c_k, "RAPS penalty start rank");
  cal->add_flag("--randomized", c_randomized, "Use randomized RAPS");
  cal->add_option("--out", c_out, "Predictor JSON output")->required();

  std::string e_pred, e_input, e_out;
  auto* ev = app.add_subcommand("evaluate", "Evaluate a calibrated predictor on a logits CSV");
  ev->add_option("--predictor", e_pred, "Predictor JSON")->required();
  ev->add_option("--input", e_input, "Test CSV (label,z0,...)")->required();
  ev->add_option("--out", e_out, "Metrics JSON output")->required();

  std::string s_config, s_out;
  auto* sweep = app.add_subcommand("sweep", "Run a multi-split experiment from a JSON config");
  sweep->add_option("--config", s_config, "Experiment config JSON")->required();
  sweep->add_option("--out-dir", s_out, "Directory for report.json and plotdata.csv")->required();

  sparsecp::SyntheticSpec g_spec;
  std::size_t g_n = 5000;
  std::uint64_t g_seed = 0, g_means_seed = 0;
  std::string g_out;
  auto* synth = app.add_subcommand("synth", "Write a synthetic Gaussian-class logits CSV");
  synth->add_option("--n", g_n, "Number of instances");
  synth->add_option("--seed", g_seed, "Instance seed");
  synth->add_option("--means-seed", g_means_seed, "Class-mean seed");
  synth->add_option("--classes", g_spec.num_classes, "Number of classes");
  synth->add_option("--dim", g_spec.dim, "Feature dimension");
  synth->add_option("--separation", g_spec.separation, "Radius of the class-mean sphere");
  synth->add_option("--noise", g_spec.noise, "Within-class standard deviation");
  synth->add_option("--out", g_out, "Output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*transform) {
      run_transform(t_gamma, t_beta);
    } else if (*cal) {
      const auto kind = parse_score(c_score, c_gamma, c_lambda, c_k, c_randomized, c_seed);
      const auto data = sparsecp::load_dataset(c_input);
      write_json(c_out, sparsecp::to_json(sparsecp::calibrate(data, kind, c_alpha)));
    } else if (*ev) {
      run_evaluate(e_pred, e_input, e_out);
    } else if (*sweep) {
      sparsecp::run_sweep(s_config, s_out);
    } else if (*synth) {
      const auto data = sparsecp::make_synthetic(g_spec, g_n, g_seed, g_means_seed);
      std::ofstream out(g_out, std::ios::binary);
      if (!out) throw Error(Errc::kIoError, "cannot write " + g_out);
      sparsecp::write_dataset(out, data);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return sparsecp::is_validation_error(e.code()) ? kExitValidation : kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
