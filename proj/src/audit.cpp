#include "epv/audit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "epv/errors.hpp"

namespace epv {
namespace {

std::string join_ints(const std::vector<int>& xs) {
  if (xs.empty()) return "none";
  std::ostringstream os;
  for (std::size_t i = 0; i < xs.size(); ++i) os << (i ? ", " : "") << xs[i];
  return os.str();
}

std::string fixed(double v, int places) { return format_decimal(v, places); }

}  // namespace

AuditReport build_audit(const ScoreDistribution& dist, std::span<const MetricsRow> sweep_rows,
                        double cost_ratio, AuditContext context) {
  if (!std::isfinite(cost_ratio) || cost_ratio <= 0.0) {
    throw ValidationError("bad-cost-ratio", "cost ratio must be a positive number");
  }
  if (sweep_rows.empty()) throw ValidationError("empty-sweep", "audit needs a sweep");
  for (const auto& r : sweep_rows) {
    if (r.cm.tp + r.cm.fn != dist.n_pos() || r.cm.fp + r.cm.tn != dist.n_neg()) {
      throw ValidationError("sweep-mismatch", "sweep row at cutoff " + std::to_string(r.cutoff) +
                                                  " does not match the distribution's class totals");
    }
  }

  AuditReport report;
  report.context = std::move(context);
  report.max_total = dist.max_total();
  report.n_pos = dist.n_pos();
  report.n_neg = dist.n_neg();
  report.cost_ratio = cost_ratio;

  std::optional<double> best;
  for (const auto& r : sweep_rows) {
    AuditRow row;
    row.metrics = r;
    row.expected_cost = cost_ratio * static_cast<double>(r.cm.fn) + static_cast<double>(r.cm.fp);
    row.fn_majority = r.cm.fn > r.cm.tp;
    row.paradox = accuracy_paradox_flag(r, dist);
    if (row.fn_majority) report.fn_majority_cutoffs.push_back(r.cutoff);
    if (row.paradox.flagged) report.paradox_cutoffs.push_back(r.cutoff);
    if (!best || row.expected_cost < *best) {
      best = row.expected_cost;
      report.cost_minimizing_cutoff = r.cutoff;
    }
    report.rows.push_back(std::move(row));
  }
  report.auc = dist.n_pos() > 0 && dist.n_neg() > 0 ? auc(sweep_rows) : std::nan("");
  return report;
}

std::string case_disclosure(const ScoreResult& result, const ScaleDefinition& scale) {
  const auto missing = result.missing_item_ids();
  const auto n_items = result.contributions.size();
  const auto& tb = scale.tier_bounds;
  std::ostringstream os;
  os << n_items - missing.size() << '/' << n_items << " items answered; ";
  if (missing.empty()) {
    os << "no imputation\n";
  } else {
    os << "imputation applied\n"
       << "Missing items: " << join_ints(missing) << '\n'
       << "Prorated total " << result.imputed_total << " = round(" << result.answered_points << " x "
       << scale.max_total() << " / " << result.answered_max << ") from answered points only\n";
  }
  os << "Completeness: " << result.completeness.decimal(4) << " of achievable points answered\n"
     << "Total: " << result.imputed_total << " of " << scale.max_total() << "; tier "
     << to_string(result.tier) << " (low 0-" << tb.low_max << ", moderate " << tb.low_max + 1 << '-'
     << tb.moderate_max << ", high " << tb.moderate_max + 1 << '-' << scale.max_total() << ")\n";
  os << "Warnings: ";
  if (result.warnings.empty()) {
    os << "none";
  } else {
    for (std::size_t i = 0; i < result.warnings.size(); ++i) os << (i ? ", " : "") << to_string(result.warnings[i]);
  }
  os << '\n';
  if (scale.illustrative) {
    os << "Scale " << scale.name << " uses illustrative weights, not a published instrument.\n";
  }
  os << kRelativeRiskBanner << '\n';
  return os.str();
}

std::string render_audit_text(const AuditReport& report) {
  std::ostringstream os;
  os << "# Classification audit (" << report.schema_version << ")\n\n"
     << "## Scale and cohort [source: " << report.context.source << "]\n"
     << "scale: " << report.context.scale_name;
  if (report.context.illustrative_weights) os << " (illustrative weights)";
  os << "\nscore range: 0-" << report.max_total << "\nsevere (positives): " << report.n_pos
     << "\nnon-severe (negatives): " << report.n_neg << "\nminority share: "
     << Ratio{std::min(report.n_pos, report.n_neg), report.n_pos + report.n_neg}.decimal(4) << "\n\n";

  os << "## Sweep [source: sweep]\n"
     << "predicted severe iff score >= cutoff; n/a marks an undefined ratio\n\n"
     << "cutoff   tp   fn   fp   tn  sens    spec    acc     prec    f1      gmean   cost      flags\n";
  char line[256];
  for (const auto& r : report.rows) {
    const auto& m = r.metrics;
    std::string flags;
    if (r.fn_majority) flags += "FN-majority ";
    if (r.paradox.flagged) flags += "accuracy-paradox ";
    std::snprintf(line, sizeof line, "%6d %4lld %4lld %4lld %4lld  %-7s %-7s %-7s %-7s %-7s %-7s %-9s %s\n",
                  m.cutoff, static_cast<long long>(m.cm.tp), static_cast<long long>(m.cm.fn),
                  static_cast<long long>(m.cm.fp), static_cast<long long>(m.cm.tn),
                  m.sensitivity.decimal(4).c_str(), m.specificity.decimal(4).c_str(),
                  m.accuracy.decimal(4).c_str(), m.precision.decimal(4).c_str(),
                  m.f_measure.decimal(4).c_str(), format_decimal(m.g_mean, 4).c_str(),
                  fixed(r.expected_cost, 2).c_str(), flags.c_str());
    os << line;
  }

  os << "\n## ROC [source: sweep]\nAUC (trapezoid over the cutoff polygon): "
     << (std::isnan(report.auc) ? std::string("n/a") : fixed(report.auc, 4)) << '\n'
     << "AUC and accuracy summarise both classes together and can look acceptable while most "
        "severe cases are missed; read them next to sensitivity.\n";

  os << "\n## Flags [source: sweep]\n"
     << "FN-majority (more severe cases missed than caught, fn > tp) at cutoffs: "
     << join_ints(report.fn_majority_cutoffs) << '\n'
     << "accuracy paradox (accuracy >= 0.70, sensitivity < 0.60, minority share < 0.35) at cutoffs: "
     << join_ints(report.paradox_cutoffs) << '\n';
  for (const auto& r : report.rows) {
    if (r.paradox.flagged) os << "  " << r.paradox.explanation << '\n';
  }

  const auto& best = *std::find_if(report.rows.begin(), report.rows.end(), [&](const AuditRow& r) {
    return r.metrics.cutoff == report.cost_minimizing_cutoff;
  });
  os << "\n## Cost analysis [source: sweep, cost ratio supplied by user]\n"
     << "expected cost = " << fixed(report.cost_ratio, 4) << " x FN + FP\n"
     << "cost-minimising cutoff: " << report.cost_minimizing_cutoff << " (cost "
     << fixed(best.expected_cost, 2) << ", fn " << best.metrics.cm.fn << ", fp " << best.metrics.cm.fp
     << ")\nThe FN:FP cost ratio is a normative choice, not a property of the data.\n";

  if (!report.disclosures.empty()) {
    os << "\n## Case disclosures [source: score]\n";
    for (const auto& d : report.disclosures) os << '\n' << d;
  }

  os << "\n## Provenance\n";
  if (report.context.provenance.empty()) os << "- no provenance notes supplied\n";
  for (const auto& p : report.context.provenance) os << "- " << p << '\n';
  return os.str();
}

std::string tradeoff_plot_csv(std::span<const MetricsRow> rows) {
  std::ostringstream os;
  os << "cutoff,sensitivity,specificity,accuracy\n";
  for (const auto& r : rows) {
    os << r.cutoff << ',' << r.sensitivity.decimal() << ',' << r.specificity.decimal() << ','
       << r.accuracy.decimal() << '\n';
  }
  return os.str();
}

std::string roc_plot_csv(std::span<const MetricsRow> rows) {
  std::ostringstream os;
  os << "cutoff,fpr,tpr\n";
  for (const auto& r : rows) os << r.cutoff << ',' << r.fpr.decimal() << ',' << r.sensitivity.decimal() << '\n';
  return os.str();
}

}  // namespace epv
