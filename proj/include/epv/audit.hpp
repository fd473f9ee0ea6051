#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "epv/metrics.hpp"
#include "epv/scale.hpp"

namespace epv {

inline constexpr const char* kAuditSchemaVersion = "epv-audit/1";

inline constexpr const char* kRelativeRiskBanner =
    "RELATIVE RISK: this tier ranks the case as a risk relative to reported population "
    "(cases already reported to the police). It is not an absolute probability of violence.";

struct AuditRow {
  MetricsRow metrics;
  double expected_cost = 0.0;  // cost_ratio * fn + fp
  bool fn_majority = false;    // fn > tp
  ParadoxFlag paradox;
};

struct AuditContext {
  std::string scale_name = "EPV";
  bool illustrative_weights = false;
  std::string source = "distribution";  // where the distribution came from
  std::vector<std::string> provenance;  // one note per anchor or input
};

struct AuditReport {
  std::string schema_version = kAuditSchemaVersion;
  AuditContext context;
  int max_total = 0;
  std::int64_t n_pos = 0;
  std::int64_t n_neg = 0;
  double cost_ratio = 1.0;
  std::vector<AuditRow> rows;
  int cost_minimizing_cutoff = 0;  // lowest cutoff on ties
  double auc = 0.0;
  std::vector<int> fn_majority_cutoffs;
  std::vector<int> paradox_cutoffs;
  std::vector<std::string> disclosures;
};

// cost_ratio is the cost of a false negative relative to a false positive;
// it must be supplied and positive.
AuditReport build_audit(const ScoreDistribution& dist, std::span<const MetricsRow> sweep_rows,
                        double cost_ratio, AuditContext context = {});

// Per-case block: answered/missing counts and ids, imputation, tier with
// bounds, warnings, and the relative-risk banner. Emitted for every case,
// complete or not.
std::string case_disclosure(const ScoreResult& result, const ScaleDefinition& scale);

std::string render_audit_text(const AuditReport& report);

// Plot data: cutoff,sensitivity,specificity,accuracy
std::string tradeoff_plot_csv(std::span<const MetricsRow> rows);
// Plot data: cutoff,fpr,tpr
std::string roc_plot_csv(std::span<const MetricsRow> rows);

}  // namespace epv
