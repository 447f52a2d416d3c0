#pragma once

// JSON forms of predictors, score kinds, metrics and tuning results.
// Infinite thresholds are written as the string "inf"; every other real keeps
// full round-trip precision.

#include "json.hpp"
#include "sparsecp/conformal.hpp"
#include "sparsecp/metrics.hpp"
#include "sparsecp/scores.hpp"
#include "sparsecp/tuning.hpp"

namespace sparsecp {

using Json = nlohmann::json;

Json real_to_json(double value);
// Accepts numbers and the strings "inf" / "+inf" / "infinity".
double real_from_json(const Json& value);

// Writes score_kind plus gamma / raps_params where the kind has them.
void write_score_kind(Json& out, const ScoreKind& kind);
ScoreKind read_score_kind(const Json& in);

Json to_json(const RapsParams& params);
RapsParams raps_params_from_json(const Json& in);

// {score_kind, gamma?, raps_params?, alpha, q_hat, beta_inv?, calib_n, num_classes}
Json to_json(const CalibratedPredictor& pred);
CalibratedPredictor predictor_from_json(const Json& in);

Json to_json(const MetricsReport& report);
Json to_json(const TuningResult& result);

}  // namespace sparsecp
