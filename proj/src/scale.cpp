#include "epv/scale.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "epv/errors.hpp"

namespace epv {

std::string_view to_string(Category c) {
  switch (c) {
    case Category::PersonalData: return "personal-data";
    case Category::Relationship: return "relationship";
    case Category::ViolenceType: return "violence-type";
    case Category::PerpetratorProfile: return "perpetrator-profile";
    case Category::VictimVulnerability: return "victim-vulnerability";
  }
  return "?";
}

std::string_view to_string(ScaleId s) {
  switch (s) {
    case ScaleId::EPV: return "EPV";
    case ScaleId::EPV_R: return "EPV-R";
    case ScaleId::Custom: return "custom";
  }
  return "?";
}

std::string_view to_string(Tier t) {
  switch (t) {
    case Tier::Low: return "low";
    case Tier::Moderate: return "moderate";
    case Tier::High: return "high";
  }
  return "?";
}

std::string_view to_string(AssessorRole r) {
  switch (r) {
    case AssessorRole::Police: return "police";
    case AssessorRole::Judge: return "judge";
    case AssessorRole::Auditor: return "auditor";
    case AssessorRole::Other: return "other";
  }
  return "?";
}

std::string_view to_string(ScoreWarning w) {
  switch (w) {
    case ScoreWarning::ImputationApplied: return "imputation-applied";
    case ScoreWarning::LowCompleteness: return "low-completeness";
    case ScoreWarning::AllMissingBlocked: return "all-missing-blocked";
  }
  return "?";
}

Category parse_category(std::string_view s) {
  for (auto c : {Category::PersonalData, Category::Relationship, Category::ViolenceType,
                 Category::PerpetratorProfile, Category::VictimVulnerability}) {
    if (to_string(c) == s) return c;
  }
  throw ValidationError("bad-category", "unknown item category '" + std::string(s) + "'");
}

ScaleId parse_scale_id(std::string_view s) {
  for (auto id : {ScaleId::EPV, ScaleId::EPV_R, ScaleId::Custom}) {
    if (to_string(id) == s) return id;
  }
  throw ValidationError("unknown-scale", "unknown scale id '" + std::string(s) + "'");
}

AssessorRole parse_assessor_role(std::string_view s) {
  for (auto r : {AssessorRole::Police, AssessorRole::Judge, AssessorRole::Auditor,
                 AssessorRole::Other}) {
    if (to_string(r) == s) return r;
  }
  throw ValidationError("bad-assessor-role", "unknown assessor role '" + std::string(s) + "'");
}

int ScaleDefinition::max_total() const {
  int total = 0;
  for (const auto& item : items) total += item.max_points;
  return total;
}

const ItemSpec& ScaleDefinition::item(int id) const {
  if (id < 1 || id > static_cast<int>(items.size())) {
    throw ValidationError("bad-item-id", "item id " + std::to_string(id) + " out of range");
  }
  return items[static_cast<std::size_t>(id - 1)];
}

namespace {

template <typename T>
T require(const nlohmann::json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ValidationError("missing-field", where + ": missing field '" + key + "'");
  }
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ValidationError("bad-field", where + ": field '" + key + "' has the wrong type");
  }
}

}  // namespace

ScaleDefinition load_scale(std::string_view definition_document) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(definition_document);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("malformed-document", std::string("scale document: ") + e.what());
  }

  ScaleDefinition scale;
  scale.scale_id = parse_scale_id(require<std::string>(doc, "scale_id", "scale"));
  scale.name = doc.value("name", std::string(to_string(scale.scale_id)));
  scale.illustrative = doc.value("illustrative", false);

  const auto& bounds = doc.contains("tier_bounds") ? doc.at("tier_bounds") : nlohmann::json::object();
  if (bounds.contains("low_max")) scale.tier_bounds.low_max = require<int>(bounds, "low_max", "tier_bounds");
  if (bounds.contains("moderate_max")) {
    scale.tier_bounds.moderate_max = require<int>(bounds, "moderate_max", "tier_bounds");
  }

  if (!doc.contains("items") || !doc.at("items").is_array()) {
    throw ValidationError("missing-field", "scale: missing 'items' list");
  }
  const auto& items = doc.at("items");
  if (items.size() != kItemCount) {
    throw ValidationError("item-count", "item count " + std::to_string(items.size()) + " != 20");
  }

  std::set<int> seen;
  scale.items.resize(kItemCount);
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& node = items[i];
    const std::string where = "items[" + std::to_string(i) + "]";
    ItemSpec spec;
    spec.id = require<int>(node, "id", where);
    if (spec.id < 1 || spec.id > kItemCount) {
      throw ValidationError("bad-item-id", where + ": id " + std::to_string(spec.id) + " outside 1..20");
    }
    if (!seen.insert(spec.id).second) {
      throw ValidationError("duplicate-item-id", where + ": duplicate item id " + std::to_string(spec.id));
    }
    spec.label_key = require<std::string>(node, "label_key", where);
    spec.category = parse_category(require<std::string>(node, "category", where));
    spec.max_points = require<int>(node, "max_points", where);
    spec.guidance = node.value("guidance", std::string());

    const bool ok = scale.scale_id == ScaleId::EPV     ? spec.max_points == 1
                    : scale.scale_id == ScaleId::EPV_R ? spec.max_points >= 1 && spec.max_points <= 3
                                                       : spec.max_points >= 1;
    if (!ok) {
      throw ValidationError("max-points-range", where + ": max_points " + std::to_string(spec.max_points) +
                                                    " not allowed for scale " +
                                                    std::string(to_string(scale.scale_id)));
    }
    scale.items[static_cast<std::size_t>(spec.id - 1)] = std::move(spec);
  }

  const int max_total = scale.max_total();
  const auto& tb = scale.tier_bounds;
  if (!(0 <= tb.low_max && tb.low_max < tb.moderate_max && tb.moderate_max < max_total)) {
    throw ValidationError("tier-bounds", "tier bounds must satisfy 0 <= low_max < moderate_max < " +
                                             std::to_string(max_total));
  }
  return scale;
}

ScaleDefinition resolve_scale(const std::string& name_or_path) {
  if (name_or_path == "EPV") return builtin_scale(ScaleId::EPV);
  if (name_or_path == "EPV-R") return builtin_scale(ScaleId::EPV_R);
  std::ifstream in(name_or_path);
  if (!in) throw ValidationError("unknown-scale", "no built-in scale or readable file '" + name_or_path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return load_scale(buf.str());
}

void validate_assessment(const ScaleDefinition& scale, const Assessment& assessment) {
  const auto n = scale.items.size();
  if (assessment.responses.size() != n) {
    throw ValidationError("response-count", "assessment has " + std::to_string(assessment.responses.size()) +
                                                " responses, expected " + std::to_string(n));
  }
  std::vector<bool> seen(n, false);
  for (const auto& r : assessment.responses) {
    if (r.item_id < 1 || r.item_id > static_cast<int>(n)) {
      throw ValidationError("bad-item-id", "response for unknown item " + std::to_string(r.item_id));
    }
    auto slot = static_cast<std::size_t>(r.item_id - 1);
    if (seen[slot]) {
      throw ValidationError("duplicate-item-id", "duplicate response for item " + std::to_string(r.item_id));
    }
    seen[slot] = true;
    if (r.points) {
      const int max = scale.items[slot].max_points;
      if (*r.points < 0 || *r.points > max) {
        throw ValidationError("points-range", "item " + std::to_string(r.item_id) + ": points " +
                                                  std::to_string(*r.points) + " outside 0.." +
                                                  std::to_string(max));
      }
    }
  }
}

std::vector<int> ScoreResult::missing_item_ids() const {
  std::vector<int> ids;
  for (const auto& c : contributions) {
    if (c.missing()) ids.push_back(c.item_id);
  }
  return ids;
}

bool ScoreResult::has_warning(ScoreWarning w) const {
  return std::find(warnings.begin(), warnings.end(), w) != warnings.end();
}

Tier classify_tier(int total, const ScaleDefinition& scale) {
  if (total < 0 || total > scale.max_total()) {
    throw ValidationError("total-range", "total " + std::to_string(total) + " outside 0.." +
                                             std::to_string(scale.max_total()));
  }
  if (total <= scale.tier_bounds.low_max) return Tier::Low;
  if (total <= scale.tier_bounds.moderate_max) return Tier::Moderate;
  return Tier::High;
}

ScoreResult score(const ScaleDefinition& scale, const Assessment& assessment) {
  validate_assessment(scale, assessment);

  ScoreResult result;
  result.contributions.resize(scale.items.size());
  for (const auto& r : assessment.responses) {
    const auto& spec = scale.item(r.item_id);
    result.contributions[static_cast<std::size_t>(r.item_id - 1)] = {r.item_id, r.points, spec.max_points};
    if (r.points) {
      result.answered_points += *r.points;
      result.answered_max += spec.max_points;
    }
  }

  if (result.answered_max == 0) {
    throw ValidationError(std::string(to_string(ScoreWarning::AllMissingBlocked)),
                          "every item is missing; refusing to score");
  }

  const int max_total = scale.max_total();
  result.completeness = {result.answered_max, max_total};
  if (result.answered_max == max_total) {
    result.imputed_total = result.answered_points;
  } else {
    result.imputed_total = static_cast<int>(
        round_half_up(static_cast<std::int64_t>(result.answered_points) * max_total, result.answered_max));
    result.warnings.push_back(ScoreWarning::ImputationApplied);
  }
  if (kLowCompletenessDen * result.answered_max < kLowCompletenessNum * max_total) {
    result.warnings.push_back(ScoreWarning::LowCompleteness);
  }
  result.tier = classify_tier(result.imputed_total, scale);
  return result;
}

}  // namespace epv
