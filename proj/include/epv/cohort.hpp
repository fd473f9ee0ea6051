#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "epv/metrics.hpp"
#include "epv/psychometrics.hpp"
#include "epv/scale.hpp"

namespace epv {

// Published class sizes of the design cohort.
inline constexpr std::int64_t kAnchorSevere = 269;
inline constexpr std::int64_t kAnchorNonSevere = 812;

// An operating point quoted for the design cohort: counts of each class
// scoring at or above `cutoff`, and where each count comes from.
struct AnchorPoint {
  int cutoff = 0;
  std::int64_t severe_at_or_above = 0;
  std::int64_t nonsevere_at_or_above = 0;
  std::string source;
};

// The anchors in cutoff order, including the trivial ends (cutoff 0 and
// cutoff 21).
std::vector<AnchorPoint> anchor_points();

// A deterministic 0..20 distribution with 269 severe and 812 non-severe
// cases passing through every anchor. Between anchors each class's count is
// split equally over the intermediate scores, remainder to the lower scores.
ScoreDistribution reconstruct_anchor_cohort();

// Histogram CSV: score,severe,non_severe
std::string distribution_csv(const ScoreDistribution& dist);

// Either form of cohort CSV. Score form: "score,label". Item form:
// "item_1,...,item_20,label"; scores are the plain item sums.
struct CohortData {
  std::vector<LabeledScore> scores;
  std::optional<ResponseMatrix> matrix;
};

// Labels are trimmed and lower-cased before matching severe / non_severe
// (non-severe also accepted). Errors carry the 1-based file line.
CohortData load_cohort(std::string_view csv_text, const ScaleDefinition& scale);
CohortData load_cohort_file(const std::string& path, const ScaleDefinition& scale);

std::string cohort_scores_csv(std::span<const LabeledScore> scores);
std::string response_matrix_csv(const ResponseMatrix& matrix);

Label parse_label(std::string_view token);

struct SyntheticCohortConfig {
  std::int64_t n_severe = 269;
  std::int64_t n_nonsevere = 812;
  // Per-item probability of each achievable point, by class.
  std::array<double, kItemCount> severe_rates{};
  std::array<double, kItemCount> nonsevere_rates{};
  std::uint64_t seed = 0;

  void validate() const;
};

// Illustrative class-conditional item rates. Item 1 uses the quoted
// foreign-origin rates (35.7% severe, 25.9% non-severe); the rest are
// invented and make no claim about the real cohort.
SyntheticCohortConfig default_synthetic_config(std::uint64_t seed);

// JSON: {"n_severe", "n_nonsevere", "severe_rates"[20], "nonsevere_rates"[20],
// "seed"}. Absent keys take the defaults above.
SyntheticCohortConfig load_synthetic_config(std::string_view document);

// Each item scores Binomial(max_points, rate) points: a rate of 1 gives the
// item maximum, and the empirical mean points / max_points converges to the
// rate. Rows are severe cases first, then non-severe.
ResponseMatrix generate_synthetic(const SyntheticCohortConfig& config, const ScaleDefinition& scale);

}  // namespace epv
