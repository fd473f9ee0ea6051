#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "epv/cohort.hpp"
#include "epv/metrics.hpp"
#include "epv/scale.hpp"

namespace epv {

// How the next training set is labelled.
//  RetrainOnPredictedSevere: the current model's severe predictions become
//    the training labels (the model learns from its own output).
//  RetrainOnAll: every case of the iteration with its true outcome.
enum class SelectionRule { RetrainOnPredictedSevere, RetrainOnAll };

std::string_view to_string(SelectionRule r);
SelectionRule parse_selection_rule(std::string_view s);

inline constexpr int kMaxFeedbackIterations = 1000;

// A model of the loop, not of any operational pipeline: binary items drawn
// per class from `population` rates, an assessor who adds `bias[j]` to the
// probability of marking item j when the current model already rates the
// case severe, and rate-gap retraining.
struct FeedbackConfig {
  SyntheticCohortConfig population;  // class sizes are per iteration
  std::array<double, kItemCount> bias{};
  SelectionRule selection_rule = SelectionRule::RetrainOnAll;
  int iterations = 10;
  double cutoff = 10.0;
  double point_budget = 20.0;

  void validate() const;
};

// JSON: {"population": {...synthetic cohort config...}, "bias": [20] or
// {"<item id>": beta}, "selection_rule", "iterations", "cutoff",
// "point_budget", "seed"}.
FeedbackConfig load_feedback_config(std::string_view document);

struct SubgroupCounts {
  ConfusionMatrix flagged;    // true item-1 value set
  ConfusionMatrix unflagged;
};

// State t holds the weights after the t-th retrain. Its confusion counts
// score iteration t's cases with the weights in force during that iteration
// (state 0: the design-study weights on the design sample), against true
// outcomes. Subgroups split on the true item-1 value.
struct IterationState {
  int iteration = 0;
  std::array<double, kItemCount> weights{};
  std::array<double, kItemCount> drift{};  // weights - initial weights
  std::int64_t predicted_severe = 0;
  std::int64_t cases = 0;
  ConfusionMatrix overall;
  SubgroupCounts subgroups;
  bool stalled = false;  // retraining was impossible; weights carried over

  Ratio predicted_prevalence() const { return {predicted_severe, cases}; }
};

struct FeedbackTrace {
  double point_budget = 20.0;
  std::vector<IterationState> states;  // iterations + 1 entries
};

// Re-estimates item weights from recorded items and training labels:
// w_j proportional to max(0, rate among positives - rate among negatives),
// scaled to sum to `point_budget`. nullopt when a class is empty or no item
// separates the classes.
std::optional<std::array<double, kItemCount>> fit_rate_gap_weights(
    const std::vector<std::array<std::uint8_t, kItemCount>>& items, const std::vector<bool>& positive,
    double point_budget);

FeedbackTrace run_feedback(const FeedbackConfig& config);

struct DriftReport {
  std::array<double, kItemCount> delta{};  // final minus initial weights
  // FNR(flagged) - FNR(unflagged) per iteration; nullopt when undefined.
  std::vector<std::optional<double>> subgroup_fnr_gap;
  std::vector<int> flagged_items;  // 1-based ids whose weight ever exceeded 1.5x baseline
  std::vector<int> first_flag_iteration;  // parallel to flagged_items
  int stalled_iterations = 0;
};

inline constexpr double kDriftFlagGrowth = 0.5;

DriftReport drift_report(const FeedbackTrace& trace);

// One row per iteration per item.
std::string trace_csv(const FeedbackTrace& trace);

}  // namespace epv
