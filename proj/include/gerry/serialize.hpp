#pragma once

// JSON encodings of the library's value types (nlohmann ADL hooks).
// Undefined optional values encode as null.

#include <string>

#include "gerry/impute.hpp"
#include "gerry/metrics.hpp"
#include "gerry/report.hpp"
#include "gerry/transforms.hpp"
#include <nlohmann/json.hpp>

namespace gerry {

using Json = nlohmann::json;

// Shortest round-trip decimal form, used for tau keys ("0", "0.4", "2").
std::string format_number(double v);

void to_json(Json& j, const MetricSet& m);

void to_json(Json& j, const CrackPlan& p);
void from_json(const Json& j, CrackPlan& p);
void to_json(Json& j, const PackPlan& p);
void from_json(const Json& j, PackPlan& p);

void to_json(Json& j, const ElectionKey& k);
void to_json(Json& j, const ImputationModel& m);
void from_json(const Json& j, ImputationModel& m);
void to_json(Json& j, const CrossValidation& cv);
void to_json(Json& j, const SensitivityReport& r);

void to_json(Json& j, const ElectionRow& r);
void to_json(Json& j, const CycleSummary& s);

}  // namespace gerry
