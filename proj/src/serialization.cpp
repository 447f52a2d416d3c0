#include "sparsecp/serialization.hpp"

#include <cmath>
#include <limits>

#include "sparsecp/error.hpp"

namespace sparsecp {

namespace {

const Json& require(const Json& in, const char* key) {
  if (!in.is_object() || !in.contains(key)) {
    throw Error(Errc::kParseError, std::string("missing field '") + key + "'");
  }
  return in.at(key);
}

template <typename T>
T get_as(const Json& value, const char* key) {
  try {
    return value.get<T>();
  } catch (const Json::exception&) {
    throw Error(Errc::kParseError, std::string("field '") + key + "' has the wrong type");
  }
}

}  // namespace

Json real_to_json(double value) {
  if (std::isinf(value)) return value > 0 ? Json("inf") : Json("-inf");
  return Json(value);
}

double real_from_json(const Json& value) {
  if (value.is_number()) return value.get<double>();
  if (value.is_string()) {
    const auto s = value.get<std::string>();
    if (s == "inf" || s == "+inf" || s == "infinity") {
      return std::numeric_limits<double>::infinity();
    }
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  throw Error(Errc::kParseError, "expected a real number or \"inf\"");
}

Json to_json(const RapsParams& params) {
  return Json{{"lambda_reg", params.lambda_reg},
              {"k_reg", params.k_reg},
              {"randomized", params.randomized},
              {"rng_seed", params.rng_seed}};
}

RapsParams raps_params_from_json(const Json& in) {
  if (!in.is_object()) throw Error(Errc::kParseError, "raps_params must be an object");
  RapsParams params;
  if (in.contains("lambda_reg")) params.lambda_reg = get_as<double>(in.at("lambda_reg"), "lambda_reg");
  if (in.contains("k_reg")) params.k_reg = get_as<int>(in.at("k_reg"), "k_reg");
  if (in.contains("randomized")) params.randomized = get_as<bool>(in.at("randomized"), "randomized");
  if (in.contains("rng_seed")) params.rng_seed = get_as<std::uint64_t>(in.at("rng_seed"), "rng_seed");
  return params;
}

void write_score_kind(Json& out, const ScoreKind& kind) {
  switch (kind.family()) {
    case ScoreKind::Family::kSparsemax: out["score_kind"] = "sparsemax"; break;
    case ScoreKind::Family::kEntmax:
      out["score_kind"] = "entmax";
      out["gamma"] = kind.gamma();
      break;
    case ScoreKind::Family::kLogMargin: out["score_kind"] = "log_margin"; break;
    case ScoreKind::Family::kInvProb: out["score_kind"] = "inv_prob"; break;
    case ScoreKind::Family::kRaps:
      out["score_kind"] = "raps";
      out["raps_params"] = to_json(kind.raps_params());
      break;
  }
}

ScoreKind read_score_kind(const Json& in) {
  const auto name = get_as<std::string>(require(in, "score_kind"), "score_kind");
  if (name == "sparsemax") return ScoreKind::sparsemax();
  if (name == "entmax") {
    const double gamma = get_as<double>(require(in, "gamma"), "gamma");
    if (gamma == 2.0) return ScoreKind::sparsemax();
    return ScoreKind::entmax(gamma);
  }
  if (name == "log_margin") return ScoreKind::log_margin();
  if (name == "inv_prob") return ScoreKind::inv_prob();
  if (name == "raps") {
    RapsParams params;
    if (in.contains("raps_params")) params = raps_params_from_json(in.at("raps_params"));
    return ScoreKind::raps(params);
  }
  throw Error(Errc::kParseError, "unknown score_kind '" + name + "'");
}

Json to_json(const CalibratedPredictor& pred) {
  Json out = Json::object();
  write_score_kind(out, pred.score_kind);
  out["alpha"] = pred.alpha;
  out["q_hat"] = real_to_json(pred.q_hat);
  if (pred.beta_inv) out["beta_inv"] = real_to_json(*pred.beta_inv);
  out["calib_n"] = pred.calib_n;
  out["num_classes"] = pred.num_classes;
  return out;
}

CalibratedPredictor predictor_from_json(const Json& in) {
  CalibratedPredictor pred;
  pred.score_kind = read_score_kind(in);
  pred.alpha = get_as<double>(require(in, "alpha"), "alpha");
  if (!(pred.alpha > 0.0 && pred.alpha < 1.0)) {
    throw Error(Errc::kInvalidInput, "alpha must lie in (0, 1)");
  }
  pred.q_hat = real_from_json(require(in, "q_hat"));
  if (in.contains("beta_inv")) pred.beta_inv = real_from_json(in.at("beta_inv"));
  pred.calib_n = get_as<std::size_t>(require(in, "calib_n"), "calib_n");
  if (in.contains("num_classes")) {
    pred.num_classes = get_as<std::size_t>(in.at("num_classes"), "num_classes");
  }
  return pred;
}

Json to_json(const MetricsReport& report) {
  Json out = Json::object();
  out["coverage"] = report.coverage;
  out["avg_set_size"] = report.avg_set_size;
  out["singleton_ratio"] = report.singleton_ratio;
  if (report.singleton_coverage) out["singleton_coverage"] = *report.singleton_coverage;
  Json bins = Json::array();
  for (const auto& bin : report.stratified) {
    Json b{{"lo", bin.lo}, {"hi", bin.hi}, {"n", bin.n}};
    if (bin.coverage) b["coverage"] = *bin.coverage;
    bins.push_back(std::move(b));
  }
  out["stratified"] = std::move(bins);
  if (report.sscv) out["sscv"] = *report.sscv;
  return out;
}

Json to_json(const TuningResult& result) {
  Json out = Json::object();
  Json chosen = Json::object();
  write_score_kind(chosen, result.chosen);
  out["chosen"] = std::move(chosen);
  out["objective"] = result.objective;
  Json table = Json::array();
  for (const auto& entry : result.table) {
    Json row = Json::object();
    write_score_kind(row, entry.candidate);
    row["avg_set_size"] = entry.avg_set_size;
    table.push_back(std::move(row));
  }
  out["table"] = std::move(table);
  return out;
}

}  // namespace sparsecp
