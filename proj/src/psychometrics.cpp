#include "epv/psychometrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <utility>

#include "epv/errors.hpp"

namespace epv {

std::string_view to_string(Label l) { return l == Label::Severe ? "severe" : "non_severe"; }

std::vector<int> ResponseMatrix::column(std::size_t item) const {
  std::vector<int> col;
  col.reserve(rows.size());
  for (const auto& r : rows) col.push_back(r.at(item));
  return col;
}

std::vector<int> ResponseMatrix::totals() const {
  std::vector<int> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(std::accumulate(r.begin(), r.end(), 0));
  return out;
}

namespace {

struct TableRow {
  int dof;
  double value;
};

constexpr std::array<double, 30> kChiSq05 = {
    3.841,  5.991,  7.815,  9.488,  11.070, 12.592, 14.067, 15.507, 16.919, 18.307,
    19.675, 21.026, 22.362, 23.685, 24.996, 26.296, 27.587, 28.869, 30.144, 31.410,
    32.671, 33.924, 35.172, 36.415, 37.652, 38.885, 40.113, 41.337, 42.557, 43.773};
constexpr std::array<TableRow, 7> kChiSq05Tail = {
    {{40, 55.758}, {50, 67.505}, {60, 79.082}, {70, 90.531}, {80, 101.879}, {90, 113.145}, {100, 124.342}}};

constexpr std::array<double, 30> kT05 = {
    12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
    2.201,  2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086,
    2.080,  2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042};
constexpr std::array<TableRow, 3> kT05Tail = {{{40, 2.021}, {60, 2.000}, {120, 1.980}}};
constexpr double kTInfinity05 = 1.960;

double mean(std::span<const double> xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

// Sum of squared deviations from the mean.
double sum_sq_dev(std::span<const double> xs) {
  const double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return s;
}

double sample_variance(std::span<const double> xs) {
  return sum_sq_dev(xs) / static_cast<double>(xs.size() - 1);
}

std::vector<double> to_double(const std::vector<int>& xs) { return {xs.begin(), xs.end()}; }

}  // namespace

double chi_squared_critical_05(int dof) {
  if (dof < 1) throw ValidationError("dof", "chi-squared needs dof >= 1");
  if (dof <= 30) return kChiSq05[static_cast<std::size_t>(dof - 1)];
  for (const auto& row : kChiSq05Tail) {
    if (dof <= row.dof) return row.value;
  }
  const double z = 1.6448536269514722;
  const double k = dof;
  const double h = 2.0 / (9.0 * k);
  return k * std::pow(1.0 - h + z * std::sqrt(h), 3.0);
}

double t_critical_two_tailed_05(int dof) {
  if (dof < 1) throw ValidationError("dof", "t needs dof >= 1");
  if (dof <= 30) return kT05[static_cast<std::size_t>(dof - 1)];
  double value = kT05.back();
  for (const auto& row : kT05Tail) {
    if (dof < row.dof) return value;
    value = row.value;
  }
  return dof < 1000 ? value : kTInfinity05;
}

double cronbach_alpha(const ResponseMatrix& matrix) {
  const std::size_t k = matrix.items();
  if (k < 2) throw ValidationError("too-few-items", "Cronbach's alpha needs at least 2 items");
  if (matrix.cases() < 2) throw ValidationError("too-few-cases", "Cronbach's alpha needs at least 2 cases");

  double item_var_sum = 0.0;
  for (std::size_t j = 0; j < k; ++j) item_var_sum += sample_variance(to_double(matrix.column(j)));
  const double total_var = sample_variance(to_double(matrix.totals()));
  if (total_var == 0.0) throw ValidationError("zero-variance", "total-score variance is zero");

  const double kd = static_cast<double>(k);
  return kd / (kd - 1.0) * (1.0 - item_var_sum / total_var);
}

TestReport two_sample_t(std::span<const double> group_a, std::span<const double> group_b) {
  if (group_a.size() < 2 || group_b.size() < 2) {
    throw ValidationError("too-few-cases", "each t-test group needs at least 2 values");
  }
  for (auto group : {group_a, group_b}) {
    for (double x : group) {
      if (!std::isfinite(x)) throw ValidationError("non-finite", "t-test input is not finite");
    }
  }
  const double na = static_cast<double>(group_a.size());
  const double nb = static_cast<double>(group_b.size());
  const double dof = na + nb - 2.0;
  const double pooled = (sum_sq_dev(group_a) + sum_sq_dev(group_b)) / dof;
  const double diff = mean(group_a) - mean(group_b);

  TestReport report;
  report.degrees_of_freedom = dof;
  report.assumption_notes =
      "Pooled-variance Student t, two-tailed. Assumes normally distributed group means and equal "
      "variances; neither requirement has been verified for this data.";
  if (pooled == 0.0) {
    if (diff != 0.0) {
      throw ValidationError("zero-variance", "both groups are constant with different means");
    }
    report.statistic = 0.0;
    return report;
  }
  report.statistic = diff / std::sqrt(pooled * (1.0 / na + 1.0 / nb));
  report.significant_at_05 =
      std::fabs(report.statistic) > t_critical_two_tailed_05(static_cast<int>(dof));
  return report;
}

TestReport chi_squared(const std::vector<std::vector<long long>>& table) {
  if (table.size() != 2) throw ValidationError("table-shape", "chi-squared expects exactly 2 rows");
  const std::size_t k = table[0].size();
  if (table[1].size() != k) throw ValidationError("table-shape", "chi-squared rows differ in length");
  if (k < 2) throw ValidationError("dof", "chi-squared needs at least 2 columns (dof would be 0)");

  std::array<long long, 2> row_tot{0, 0};
  std::vector<long long> col_tot(k, 0);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      if (table[i][j] < 0) throw ValidationError("negative-count", "negative count in table");
      row_tot[i] += table[i][j];
      col_tot[j] += table[i][j];
    }
  }
  for (auto t : row_tot) {
    if (t == 0) throw ValidationError("zero-margin", "a row total is zero");
  }
  for (auto t : col_tot) {
    if (t == 0) throw ValidationError("zero-margin", "a column total is zero");
  }
  const double n = static_cast<double>(row_tot[0] + row_tot[1]);

  double stat = 0.0;
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const double expected = static_cast<double>(row_tot[i]) * static_cast<double>(col_tot[j]) / n;
      const double d = static_cast<double>(table[i][j]) - expected;
      stat += d * d / expected;
    }
  }

  TestReport report;
  report.statistic = stat;
  report.degrees_of_freedom = static_cast<double>(k - 1);
  report.significant_at_05 = stat > chi_squared_critical_05(static_cast<int>(k - 1));
  report.assumption_notes = "Pearson chi-squared, no continuity correction.";
  return report;
}

std::vector<ItemDiscrimination> item_discrimination(const ResponseMatrix& matrix) {
  if (matrix.labels.size() != matrix.cases()) {
    throw ValidationError("ragged", "one label per case is required");
  }
  const auto n_severe = std::count(matrix.labels.begin(), matrix.labels.end(), Label::Severe);
  const auto n_non = static_cast<long long>(matrix.cases()) - n_severe;
  if (n_severe == 0 || n_non == 0) {
    throw ValidationError("single-label", "item discrimination needs both severe and non-severe cases");
  }

  std::vector<ItemDiscrimination> out;
  for (std::size_t j = 0; j < matrix.items(); ++j) {
    long long sev_yes = 0;
    long long non_yes = 0;
    for (std::size_t i = 0; i < matrix.cases(); ++i) {
      if (matrix.rows[i][j] > 0) ++(matrix.labels[i] == Label::Severe ? sev_yes : non_yes);
    }
    ItemDiscrimination d;
    d.item = j;
    d.severe_rate = static_cast<double>(sev_yes) / static_cast<double>(n_severe);
    d.nonsevere_rate = static_cast<double>(non_yes) / static_cast<double>(n_non);
    d.rate_gap = d.severe_rate - d.nonsevere_rate;
    const long long yes = sev_yes + non_yes;
    if (yes == 0 || yes == static_cast<long long>(matrix.cases())) {
      d.report.statistic = 0.0;
      d.report.degrees_of_freedom = 1.0;
      d.report.assumption_notes = "Constant item: no affirmative-rate variation, statistic set to 0.";
    } else {
      d.report = chi_squared({{sev_yes, n_severe - sev_yes}, {non_yes, n_non - non_yes}});
    }
    out.push_back(std::move(d));
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.report.statistic > b.report.statistic;
  });
  return out;
}

}  // namespace epv
