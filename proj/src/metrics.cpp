#include "epv/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <utility>

#include "epv/errors.hpp"

namespace epv {

ScoreDistribution::ScoreDistribution(std::vector<std::int64_t> severe, std::vector<std::int64_t> nonsevere)
    : severe_(std::move(severe)), nonsevere_(std::move(nonsevere)) {
  if (severe_.empty() || severe_.size() != nonsevere_.size()) {
    throw ValidationError("histogram-shape", "class histograms must be nonempty and equally long");
  }
  for (std::size_t s = 0; s < severe_.size(); ++s) {
    if (severe_[s] < 0 || nonsevere_[s] < 0) throw ValidationError("negative-count", "negative histogram count");
  }
  n_pos_ = std::accumulate(severe_.begin(), severe_.end(), std::int64_t{0});
  n_neg_ = std::accumulate(nonsevere_.begin(), nonsevere_.end(), std::int64_t{0});
}

ScoreDistribution ScoreDistribution::from_scores(std::span<const LabeledScore> scores, int max_total) {
  if (max_total < 0) throw ValidationError("score-range", "max_total must be non-negative");
  std::vector<std::int64_t> sev(static_cast<std::size_t>(max_total) + 1, 0);
  std::vector<std::int64_t> non(sev.size(), 0);
  for (const auto& s : scores) {
    if (s.score < 0 || s.score > max_total) {
      throw ValidationError("score-range", "score " + std::to_string(s.score) + " outside 0.." +
                                               std::to_string(max_total));
    }
    ++(s.label == Label::Severe ? sev : non)[static_cast<std::size_t>(s.score)];
  }
  return {std::move(sev), std::move(non)};
}

std::int64_t ScoreDistribution::severe_at_or_above(int cutoff) const {
  if (cutoff < 0 || cutoff > max_total() + 1) throw ValidationError("cutoff-range", "cutoff out of range");
  return std::accumulate(severe_.begin() + cutoff, severe_.end(), std::int64_t{0});
}

std::int64_t ScoreDistribution::nonsevere_at_or_above(int cutoff) const {
  if (cutoff < 0 || cutoff > max_total() + 1) throw ValidationError("cutoff-range", "cutoff out of range");
  return std::accumulate(nonsevere_.begin() + cutoff, nonsevere_.end(), std::int64_t{0});
}

std::vector<LabeledScore> ScoreDistribution::expand() const {
  std::vector<LabeledScore> out;
  out.reserve(static_cast<std::size_t>(total()));
  for (std::size_t s = 0; s < severe_.size(); ++s) {
    const int score = static_cast<int>(s);
    out.insert(out.end(), static_cast<std::size_t>(severe_[s]), {score, Label::Severe});
    out.insert(out.end(), static_cast<std::size_t>(nonsevere_[s]), {score, Label::NonSevere});
  }
  return out;
}

ConfusionMatrix confusion(const ScoreDistribution& dist, int cutoff) {
  if (cutoff < 0 || cutoff > dist.max_total() + 1) {
    throw ValidationError("cutoff-range", "cutoff " + std::to_string(cutoff) + " outside 0.." +
                                              std::to_string(dist.max_total() + 1));
  }
  ConfusionMatrix cm;
  cm.tp = dist.severe_at_or_above(cutoff);
  cm.fn = dist.n_pos() - cm.tp;
  cm.fp = dist.nonsevere_at_or_above(cutoff);
  cm.tn = dist.n_neg() - cm.fp;
  return cm;
}

MetricsRow metrics(const ConfusionMatrix& cm, int cutoff) {
  if (cm.tp < 0 || cm.fn < 0 || cm.fp < 0 || cm.tn < 0) {
    throw ValidationError("negative-count", "confusion matrix has a negative cell");
  }
  if (cm.total() == 0) throw ValidationError("empty-matrix", "confusion matrix is empty");

  MetricsRow row;
  row.cutoff = cutoff;
  row.cm = cm;
  row.sensitivity = {cm.tp, cm.tp + cm.fn};
  row.fnr = {cm.fn, cm.tp + cm.fn};
  row.specificity = {cm.tn, cm.tn + cm.fp};
  row.fpr = {cm.fp, cm.tn + cm.fp};
  row.accuracy = {cm.tp + cm.tn, cm.total()};
  row.precision = {cm.tp, cm.tp + cm.fp};
  row.npv = {cm.tn, cm.tn + cm.fn};
  // Harmonic mean of precision and recall; undefined whenever either is.
  if (row.precision.defined() && row.sensitivity.defined()) {
    row.f_measure = {2 * cm.tp, 2 * cm.tp + cm.fp + cm.fn};
  }
  if (row.sensitivity.defined() && row.specificity.defined()) {
    row.g_mean = std::sqrt(row.sensitivity.value() * row.specificity.value());
  }
  return row;
}

std::vector<MetricsRow> sweep(const ScoreDistribution& dist) {
  if (dist.total() == 0) throw ValidationError("empty-distribution", "cannot sweep an empty distribution");
  std::vector<MetricsRow> rows;
  rows.reserve(static_cast<std::size_t>(dist.max_total()) + 2);
  for (int c = 0; c <= dist.max_total() + 1; ++c) rows.push_back(metrics(confusion(dist, c), c));
  return rows;
}

double auc(std::span<const MetricsRow> rows) {
  if (rows.size() < 2) throw ValidationError("too-few-points", "AUC needs at least 2 ROC points");
  std::vector<std::pair<double, double>> pts{{0.0, 0.0}, {1.0, 1.0}};
  for (const auto& r : rows) {
    if (!r.fpr.defined() || !r.sensitivity.defined()) {
      throw ValidationError("single-class", "ROC undefined: a class is empty");
    }
    pts.emplace_back(r.fpr.value(), r.sensitivity.value());
  }
  std::sort(pts.begin(), pts.end());
  double area = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    area += (pts[i].first - pts[i - 1].first) * (pts[i].second + pts[i - 1].second) / 2.0;
  }
  return area;
}

ParadoxFlag accuracy_paradox_flag(const MetricsRow& row, const ScoreDistribution& dist) {
  ParadoxFlag flag;
  if (!row.accuracy.defined() || !row.sensitivity.defined() || dist.total() == 0) {
    flag.explanation = "accuracy or sensitivity undefined; paradox check not applicable";
    return flag;
  }
  const double accuracy = row.accuracy.value();
  const double sensitivity = row.sensitivity.value();
  const Ratio minority{std::min(dist.n_pos(), dist.n_neg()), dist.total()};
  const double share = minority.value();
  flag.flagged = accuracy >= kParadoxMinAccuracy && sensitivity < kParadoxMaxSensitivity &&
                 share < kParadoxMaxMinorityShare;

  std::ostringstream os;
  os << "cutoff " << row.cutoff << ": accuracy " << row.accuracy.decimal(4) << " vs sensitivity "
     << row.sensitivity.decimal(4) << " (minority share " << minority.decimal(4) << ")";
  if (flag.flagged) {
    os << "; accuracy is carried by the majority class while "
       << Ratio{row.cm.fn, row.cm.tp + row.cm.fn}.decimal(4)
       << " of severe cases are missed";
  }
  flag.explanation = os.str();
  return flag;
}

std::string sweep_csv_header() {
  return "cutoff,tp,fn,fp,tn,sensitivity,specificity,fpr,fnr,accuracy,precision,npv,f_measure,g_mean";
}

std::string sweep_csv(std::span<const MetricsRow> rows) {
  std::ostringstream os;
  os << sweep_csv_header() << '\n';
  for (const auto& r : rows) {
    os << r.cutoff << ',' << r.cm.tp << ',' << r.cm.fn << ',' << r.cm.fp << ',' << r.cm.tn << ','
       << r.sensitivity.decimal() << ',' << r.specificity.decimal() << ',' << r.fpr.decimal() << ','
       << r.fnr.decimal() << ',' << r.accuracy.decimal() << ',' << r.precision.decimal() << ','
       << r.npv.decimal() << ',' << r.f_measure.decimal() << ',' << format_decimal(r.g_mean) << '\n';
  }
  return os.str();
}

}  // namespace epv
