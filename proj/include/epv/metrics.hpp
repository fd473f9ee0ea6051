#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "epv/psychometrics.hpp"
#include "epv/ratio.hpp"

namespace epv {

struct LabeledScore {
  int score = 0;
  Label label = Label::NonSevere;

  friend bool operator==(const LabeledScore&, const LabeledScore&) = default;
};

// Per-class histograms over integer scores 0..max_total.
class ScoreDistribution {
 public:
  ScoreDistribution() = default;
  ScoreDistribution(std::vector<std::int64_t> severe, std::vector<std::int64_t> nonsevere);

  static ScoreDistribution from_scores(std::span<const LabeledScore> scores, int max_total);

  int max_total() const { return static_cast<int>(severe_.size()) - 1; }
  std::int64_t n_pos() const { return n_pos_; }
  std::int64_t n_neg() const { return n_neg_; }
  std::int64_t total() const { return n_pos_ + n_neg_; }
  const std::vector<std::int64_t>& severe() const { return severe_; }
  const std::vector<std::int64_t>& nonsevere() const { return nonsevere_; }

  std::int64_t severe_at_or_above(int cutoff) const;
  std::int64_t nonsevere_at_or_above(int cutoff) const;

  // Expands the histograms back to one record per case, ordered by score
  // then label (severe first).
  std::vector<LabeledScore> expand() const;

  friend bool operator==(const ScoreDistribution&, const ScoreDistribution&) = default;

 private:
  std::vector<std::int64_t> severe_;
  std::vector<std::int64_t> nonsevere_;
  std::int64_t n_pos_ = 0;
  std::int64_t n_neg_ = 0;
};

struct ConfusionMatrix {
  std::int64_t tp = 0;
  std::int64_t fn = 0;
  std::int64_t fp = 0;
  std::int64_t tn = 0;

  std::int64_t total() const { return tp + fn + fp + tn; }
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

struct MetricsRow {
  int cutoff = 0;
  ConfusionMatrix cm;
  Ratio sensitivity;
  Ratio specificity;
  Ratio fpr;
  Ratio fnr;
  Ratio accuracy;
  Ratio precision;
  Ratio npv;
  Ratio f_measure;
  std::optional<double> g_mean;
};

// Predicted severe iff score >= cutoff; cutoff ranges over 0..max_total+1.
ConfusionMatrix confusion(const ScoreDistribution& dist, int cutoff);

// Zero-denominator ratios stay undefined.
MetricsRow metrics(const ConfusionMatrix& cm, int cutoff = 0);

// One row per cutoff 0..max_total+1. Requires a nonempty distribution; a
// single-class distribution still yields rows with the affected ratios
// undefined.
std::vector<MetricsRow> sweep(const ScoreDistribution& dist);

// Trapezoidal area under the (fpr, tpr) polygon with (0,0) and (1,1) added.
double auc(std::span<const MetricsRow> rows);

struct ParadoxFlag {
  bool flagged = false;
  std::string explanation;
};

// High accuracy with poor minority detection on imbalanced data:
// accuracy >= 0.7, sensitivity < 0.6 and minority share < 0.35.
ParadoxFlag accuracy_paradox_flag(const MetricsRow& row, const ScoreDistribution& dist);

inline constexpr double kParadoxMinAccuracy = 0.7;
inline constexpr double kParadoxMaxSensitivity = 0.6;
inline constexpr double kParadoxMaxMinorityShare = 0.35;

// Fixed column order; undefined values render as "n/a".
std::string sweep_csv_header();
std::string sweep_csv(std::span<const MetricsRow> rows);

}  // namespace epv
