#include "epv/json_io.hpp"

#include <cmath>

#include "epv/errors.hpp"

namespace epv::json {

Json ratio_json(const Ratio& r) {
  if (!r.defined()) return "n/a";
  return r.decimal();
}

namespace {

Json optional_real(std::optional<double> v) {
  if (!v) return "n/a";
  return format_decimal(v);
}

}  // namespace

Json to_json(const ScaleDefinition& scale) {
  Json items = Json::array();
  for (const auto& item : scale.items) {
    items.push_back({{"id", item.id},
                     {"label_key", item.label_key},
                     {"category", to_string(item.category)},
                     {"max_points", item.max_points},
                     {"guidance", item.guidance}});
  }
  return {{"schema_version", kSchemaVersion},
          {"scale_id", to_string(scale.scale_id)},
          {"name", scale.name},
          {"illustrative", scale.illustrative},
          {"max_total", scale.max_total()},
          {"tier_bounds", {{"low_max", scale.tier_bounds.low_max}, {"moderate_max", scale.tier_bounds.moderate_max}}},
          {"items", std::move(items)}};
}

Json to_json(const ScoreResult& result) {
  Json contributions = Json::array();
  for (const auto& c : result.contributions) {
    Json entry = {{"item_id", c.item_id}};
    entry["points"] = c.points ? Json(*c.points) : Json(nullptr);
    entry["max_points"] = c.max_points;
    entry["missing"] = c.missing();
    contributions.push_back(std::move(entry));
  }
  Json warnings = Json::array();
  for (auto w : result.warnings) warnings.push_back(to_string(w));
  return {{"schema_version", kSchemaVersion},
          {"answered_points", result.answered_points},
          {"answered_max", result.answered_max},
          {"imputed_total", result.imputed_total},
          {"tier", to_string(result.tier)},
          {"completeness", ratio_json(result.completeness)},
          {"missing_item_ids", result.missing_item_ids()},
          {"contributions", std::move(contributions)},
          {"warnings", std::move(warnings)}};
}

Json to_json(const ConfusionMatrix& cm) {
  return {{"tp", cm.tp}, {"fn", cm.fn}, {"fp", cm.fp}, {"tn", cm.tn}};
}

Json to_json(const MetricsRow& row) {
  return {{"cutoff", row.cutoff},
          {"tp", row.cm.tp},
          {"fn", row.cm.fn},
          {"fp", row.cm.fp},
          {"tn", row.cm.tn},
          {"sensitivity", ratio_json(row.sensitivity)},
          {"specificity", ratio_json(row.specificity)},
          {"fpr", ratio_json(row.fpr)},
          {"fnr", ratio_json(row.fnr)},
          {"accuracy", ratio_json(row.accuracy)},
          {"precision", ratio_json(row.precision)},
          {"npv", ratio_json(row.npv)},
          {"f_measure", ratio_json(row.f_measure)},
          {"g_mean", optional_real(row.g_mean)}};
}

Json to_json(const AuditReport& report) {
  Json rows = Json::array();
  for (const auto& r : report.rows) {
    Json row = to_json(r.metrics);
    row["expected_cost"] = format_decimal(r.expected_cost);
    row["fn_majority"] = r.fn_majority;
    row["accuracy_paradox"] = r.paradox.flagged;
    row["accuracy_paradox_explanation"] = r.paradox.explanation;
    rows.push_back(std::move(row));
  }
  return {{"schema_version", report.schema_version},
          {"scale", {{"name", report.context.scale_name}, {"illustrative_weights", report.context.illustrative_weights}}},
          {"source", report.context.source},
          {"max_total", report.max_total},
          {"n_pos", report.n_pos},
          {"n_neg", report.n_neg},
          {"cost_ratio", format_decimal(report.cost_ratio)},
          {"cost_minimizing_cutoff", report.cost_minimizing_cutoff},
          {"auc", std::isnan(report.auc) ? Json("n/a") : Json(format_decimal(report.auc))},
          {"fn_majority_cutoffs", report.fn_majority_cutoffs},
          {"accuracy_paradox_cutoffs", report.paradox_cutoffs},
          {"rows", std::move(rows)},
          {"relative_risk_banner", kRelativeRiskBanner},
          {"disclosures", report.disclosures},
          {"provenance", report.context.provenance}};
}

Json to_json(const DriftReport& report, const FeedbackTrace& trace) {
  Json delta = Json::array();
  for (double d : report.delta) delta.push_back(format_decimal(d, 9));
  Json gaps = Json::array();
  for (const auto& g : report.subgroup_fnr_gap) gaps.push_back(optional_real(g));
  Json flags = Json::array();
  for (std::size_t i = 0; i < report.flagged_items.size(); ++i) {
    flags.push_back({{"item_id", report.flagged_items[i]}, {"first_iteration", report.first_flag_iteration[i]}});
  }
  Json iterations = Json::array();
  for (const auto& s : trace.states) {
    Json weights = Json::array();
    for (double w : s.weights) weights.push_back(format_decimal(w, 9));
    iterations.push_back({{"iteration", s.iteration},
                          {"stalled", s.stalled},
                          {"predicted_severe", s.predicted_severe},
                          {"cases", s.cases},
                          {"predicted_prevalence", ratio_json(s.predicted_prevalence())},
                          {"weights", std::move(weights)},
                          {"overall", to_json(s.overall)},
                          {"item1_flagged", to_json(s.subgroups.flagged)},
                          {"item1_unflagged", to_json(s.subgroups.unflagged)}});
  }
  return {{"schema_version", kSchemaVersion},
          {"point_budget", format_decimal(trace.point_budget)},
          {"weight_delta", std::move(delta)},
          {"subgroup_fnr_gap", std::move(gaps)},
          {"growth_flags", std::move(flags)},
          {"stalled_iterations", report.stalled_iterations},
          {"iterations", std::move(iterations)}};
}

std::vector<ItemResponse> parse_responses(const nlohmann::json& responses) {
  if (!responses.is_array()) throw ValidationError("bad-responses", "'responses' must be a list");
  std::vector<ItemResponse> out;
  for (std::size_t i = 0; i < responses.size(); ++i) {
    const auto& r = responses[i];
    const std::string where = "responses[" + std::to_string(i) + "]";
    if (!r.is_object() || !r.contains("item_id") || !r.at("item_id").is_number_integer()) {
      throw ValidationError("bad-responses", where + ": needs an integer item_id");
    }
    ItemResponse resp;
    resp.item_id = r.at("item_id").get<int>();
    if (!r.contains("points")) throw ValidationError("bad-responses", where + ": missing 'points'");
    const auto& p = r.at("points");
    if (p.is_number_integer()) {
      resp.points = p.get<int>();
    } else if (!(p.is_null() || (p.is_string() && p.get<std::string>() == "missing"))) {
      throw ValidationError("bad-responses", where + ": points must be an integer, \"missing\" or null");
    }
    out.push_back(resp);
  }
  return out;
}

Assessment parse_assessment(std::string_view document) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(document);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("malformed-document", std::string("assessment: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("malformed-document", "assessment must be an object");
  Assessment a;
  try {
    a.case_id = doc.value("case_id", std::string());
    a.assessor_role = parse_assessor_role(doc.value("assessor_role", std::string("other")));
    a.recorded_at = doc.value("recorded_at", std::string());
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("malformed-document", std::string("assessment: ") + e.what());
  }
  if (!doc.contains("responses")) throw ValidationError("bad-responses", "assessment has no 'responses'");
  a.responses = parse_responses(doc.at("responses"));
  return a;
}

}  // namespace epv::json
