#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "epv/ratio.hpp"

namespace epv {

inline constexpr int kItemCount = 20;

enum class Category { PersonalData, Relationship, ViolenceType, PerpetratorProfile, VictimVulnerability };
enum class ScaleId { EPV, EPV_R, Custom };
enum class Tier { Low, Moderate, High };
enum class AssessorRole { Police, Judge, Auditor, Other };
enum class ScoreWarning { ImputationApplied, LowCompleteness, AllMissingBlocked };

std::string_view to_string(Category c);
std::string_view to_string(ScaleId s);
std::string_view to_string(Tier t);
std::string_view to_string(AssessorRole r);
std::string_view to_string(ScoreWarning w);

Category parse_category(std::string_view s);
ScaleId parse_scale_id(std::string_view s);
AssessorRole parse_assessor_role(std::string_view s);

struct ItemSpec {
  int id = 0;
  std::string label_key;
  Category category = Category::PersonalData;
  std::string guidance;
  int max_points = 1;
};

struct TierBounds {
  int low_max = 4;
  int moderate_max = 9;
};

// Immutable once loaded; share by const reference.
struct ScaleDefinition {
  ScaleId scale_id = ScaleId::EPV;
  std::string name;
  // Weights not taken from a published instrument carry this flag so every
  // report can say so.
  bool illustrative = false;
  std::vector<ItemSpec> items;
  TierBounds tier_bounds;

  int max_total() const;
  const ItemSpec& item(int id) const;
};

// Parses and validates a scale config document (JSON). Throws
// ValidationError on any invariant violation.
ScaleDefinition load_scale(std::string_view definition_document);

// The shipped configs, as documents and as parsed definitions.
std::string_view builtin_scale_document(ScaleId id);
const ScaleDefinition& builtin_scale(ScaleId id);

// Resolves "EPV", "EPV-R" or a path to a config document.
ScaleDefinition resolve_scale(const std::string& name_or_path);

// Answered(points) when set, Missing otherwise.
struct ItemResponse {
  int item_id = 0;
  std::optional<int> points;

  bool missing() const { return !points.has_value(); }
};

struct Assessment {
  std::string case_id;
  std::vector<ItemResponse> responses;
  AssessorRole assessor_role = AssessorRole::Other;
  std::string recorded_at;
};

// Throws ValidationError unless the assessment has exactly one in-range
// response per scale item.
void validate_assessment(const ScaleDefinition& scale, const Assessment& assessment);

struct ItemContribution {
  int item_id = 0;
  std::optional<int> points;
  int max_points = 0;

  bool missing() const { return !points.has_value(); }
};

struct ScoreResult {
  int answered_points = 0;
  int answered_max = 0;
  int imputed_total = 0;
  Tier tier = Tier::Low;
  Ratio completeness;  // answered_max / max_total
  std::vector<ItemContribution> contributions;  // ordered by item id
  std::vector<ScoreWarning> warnings;

  std::vector<int> missing_item_ids() const;
  bool has_warning(ScoreWarning w) const;
};

// Completeness below this fraction (3/4) raises low-completeness.
inline constexpr std::int64_t kLowCompletenessNum = 3;
inline constexpr std::int64_t kLowCompletenessDen = 4;

Tier classify_tier(int total, const ScaleDefinition& scale);

// Prorates missing items by achievable points:
//   imputed_total = round_half_up(answered_points * max_total / answered_max)
// An assessment with every item missing is refused ("all-missing-blocked").
ScoreResult score(const ScaleDefinition& scale, const Assessment& assessment);

}  // namespace epv
