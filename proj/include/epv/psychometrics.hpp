#pragma once

#include <span>
#include <string>
#include <vector>

namespace epv {

enum class Label { Severe, NonSevere };

std::string_view to_string(Label l);  // "severe" / "non_severe"

// Cases x items. Tests accept any column count >= 2; the CSV interchange
// form always has 20 item columns.
struct ResponseMatrix {
  std::vector<std::vector<int>> rows;
  std::vector<Label> labels;  // one per row

  std::size_t cases() const { return rows.size(); }
  std::size_t items() const { return rows.empty() ? 0 : rows.front().size(); }
  std::vector<int> column(std::size_t item) const;
  std::vector<int> totals() const;
};

struct TestReport {
  double statistic = 0.0;
  double degrees_of_freedom = 0.0;
  bool significant_at_05 = false;
  std::string assumption_notes;
};

// Upper 5% critical values from standard tables. Between tabulated rows the
// more conservative neighbour is used; chi-squared beyond df 100 falls back
// to the Wilson-Hilferty approximation.
double chi_squared_critical_05(int dof);
double t_critical_two_tailed_05(int dof);

// k/(k-1) * (1 - sum item variances / total variance), n-1 variances.
double cronbach_alpha(const ResponseMatrix& matrix);

// Classical pooled-variance Student t, two-tailed at 0.05.
TestReport two_sample_t(std::span<const double> group_a, std::span<const double> group_b);

// Pearson chi-squared on a 2 x k table of counts (rows are the two groups).
TestReport chi_squared(const std::vector<std::vector<long long>>& table);

struct ItemDiscrimination {
  std::size_t item = 0;  // zero-based column
  TestReport report;
  double severe_rate = 0.0;
  double nonsevere_rate = 0.0;
  double rate_gap = 0.0;  // severe_rate - nonsevere_rate
};

// Per item: 2x2 chi-squared of (affirmative, points > 0) by label. Returned
// in rank order, largest statistic first; ties keep column order.
std::vector<ItemDiscrimination> item_discrimination(const ResponseMatrix& matrix);

}  // namespace epv
