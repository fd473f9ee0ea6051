#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "epv/audit.hpp"
#include "epv/feedback.hpp"
#include "epv/metrics.hpp"
#include "epv/scale.hpp"

// Structured-document forms shared by the CLI and the HTTP service. Ratios
// shown to people are exact decimal strings; counts are raw integers.
namespace epv::json {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "epv/1";

Json to_json(const ScaleDefinition& scale);
Json to_json(const ScoreResult& result);
Json to_json(const ConfusionMatrix& cm);
Json to_json(const MetricsRow& row);
Json to_json(const AuditReport& report);
Json to_json(const DriftReport& report, const FeedbackTrace& trace);
Json ratio_json(const Ratio& r);

// Responses: [{"item_id": 1, "points": 0}, {"item_id": 2, "points": "missing"}]
// ("points": null is also read as missing).
std::vector<ItemResponse> parse_responses(const nlohmann::json& responses);

// {"case_id", "scale_id", "assessor_role", "recorded_at", "responses": [...]}
Assessment parse_assessment(std::string_view document);

}  // namespace epv::json
