#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "epv/errors.hpp"
#include "epv/psychometrics.hpp"
#include "oracles.hpp"

using namespace epv;

namespace {

ResponseMatrix matrix_of(std::vector<std::vector<int>> rows) {
  ResponseMatrix m;
  m.labels.assign(rows.size(), Label::NonSevere);
  m.rows = std::move(rows);
  return m;
}

std::string error_code(const std::function<void()>& f) {
  try {
    f();
  } catch (const ValidationError& e) {
    return e.code();
  }
  return "";
}

}  // namespace

TEST_CASE("alpha is 1 for identical columns") {
  std::vector<std::vector<int>> rows;
  for (int v : {0, 1, 1, 0, 1, 0, 0, 1}) rows.push_back(std::vector<int>(20, v));
  CHECK(cronbach_alpha(matrix_of(rows)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("alpha on the 3-item hand matrix") {
  // Brute-force evaluation with exact fractions gives 102/107.
  auto m = matrix_of({{2, 1, 3}, {1, 1, 2}, {3, 2, 3}, {0, 0, 1}});
  CHECK(cronbach_alpha(m) == doctest::Approx(102.0 / 107.0).epsilon(1e-12));
}

TEST_CASE("alpha errors") {
  CHECK(error_code([] { cronbach_alpha(matrix_of({{0, 1}, {1, 0}})); }) == "zero-variance");
  CHECK(error_code([] { cronbach_alpha(matrix_of({{0}, {1}})); }) == "too-few-items");
  CHECK(error_code([] { cronbach_alpha(matrix_of({{0, 1, 1}})); }) == "too-few-cases");
}

TEST_CASE("alpha is invariant to shifting one item") {
  std::mt19937 gen(7);
  std::vector<std::vector<int>> rows(30, std::vector<int>(6));
  for (auto& r : rows)
    for (auto& v : r) v = static_cast<int>(gen() % 4);
  const double before = cronbach_alpha(matrix_of(rows));
  for (auto& r : rows) r[2] += 5;
  CHECK(cronbach_alpha(matrix_of(rows)) == doctest::Approx(before).epsilon(1e-12));
}

TEST_CASE("t-test examples") {
  std::vector<double> a{2.1, 3.4, 1.9, 4.0, 2.8};
  std::vector<double> b{1.0, 1.6, 2.2, 0.9};
  auto r = two_sample_t(a, b);
  CHECK(r.statistic == doctest::Approx(2.7298390260818866).epsilon(1e-12));
  CHECK(r.degrees_of_freedom == 7.0);
  CHECK(r.significant_at_05);  // 2.73 > 2.365
  CHECK(r.assumption_notes.find("normal") != std::string::npos);

  auto same = two_sample_t(a, a);
  CHECK(same.statistic == 0.0);
  CHECK_FALSE(same.significant_at_05);

  std::vector<double> zeros(4, 0.0);
  std::vector<double> ones(4, 1.0);
  CHECK(error_code([&] { two_sample_t(zeros, ones); }) == "zero-variance");
  CHECK(two_sample_t(ones, ones).statistic == 0.0);
  CHECK(error_code([&] { two_sample_t(std::vector<double>{1.0}, ones); }) == "too-few-cases");
}

TEST_CASE("t is antisymmetric") {
  std::mt19937 gen(11);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> a(5 + trial % 4), b(4 + trial % 3);
    for (auto& x : a) x = nd(gen);
    for (auto& x : b) x = nd(gen) + 0.5;
    CHECK(two_sample_t(a, b).statistic == -two_sample_t(b, a).statistic);
  }
}

TEST_CASE("chi-squared examples") {
  CHECK(chi_squared({{10, 20, 30}, {20, 40, 60}}).statistic == doctest::Approx(0.0));
  auto two_by_three = chi_squared({{10, 20, 30}, {20, 20, 20}});
  CHECK(two_by_three.statistic == doctest::Approx(16.0 / 3.0).epsilon(1e-12));
  CHECK(two_by_three.degrees_of_freedom == 2.0);
  CHECK(two_by_three.significant_at_05 == false);  // 5.33 < 5.991

  // Foreign-origin rates by class: 35.7% of 269 severe, 25.9% of 812
  // non-severe -> (96, 173 / 210, 602). Exact value 1975902607/205556350.
  auto nat = chi_squared({{96, 173}, {210, 602}});
  CHECK(nat.statistic == doctest::Approx(1975902607.0 / 205556350.0).epsilon(1e-12));
  CHECK(nat.degrees_of_freedom == 1.0);
  CHECK(nat.significant_at_05);

  CHECK(error_code([] { chi_squared({{5}, {6}}); }) == "dof");
  CHECK(error_code([] { chi_squared({{0, 0}, {3, 4}}); }) == "zero-margin");
  CHECK(error_code([] { chi_squared({{0, 3}, {0, 4}}); }) == "zero-margin");
}

TEST_CASE("critical value tables") {
  CHECK(chi_squared_critical_05(1) == doctest::Approx(3.841));
  CHECK(chi_squared_critical_05(19) == doctest::Approx(30.144));
  CHECK(chi_squared_critical_05(35) == doctest::Approx(55.758));  // next larger row
  CHECK(chi_squared_critical_05(200) == doctest::Approx(233.994).epsilon(1e-3));
  CHECK(t_critical_two_tailed_05(1) == doctest::Approx(12.706));
  CHECK(t_critical_two_tailed_05(35) == doctest::Approx(2.042));  // next smaller row
  CHECK(t_critical_two_tailed_05(1079) == doctest::Approx(1.960));
}

TEST_CASE("statistics match the independent oracles on random small inputs") {
  std::mt19937_64 gen(99);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 4 + gen() % 8;
    const std::size_t k = 2 + gen() % 5;
    std::vector<std::vector<int>> rows(n, std::vector<int>(k));
    for (auto& r : rows)
      for (auto& v : r) v = static_cast<int>(gen() % 4);
    auto m = matrix_of(rows);
    const auto totals = m.totals();
    const bool varies = std::adjacent_find(totals.begin(), totals.end(), std::not_equal_to<>()) != totals.end();
    if (varies) CHECK(oracle::close_rel(cronbach_alpha(m), oracle::alpha_covariance(rows), 1e-9));

    std::vector<double> a, b;
    for (std::size_t i = 0; i < n; ++i) (i % 2 ? a : b).push_back(totals[i] + 0.25 * (gen() % 3));
    CHECK(oracle::close_rel(two_sample_t(a, b).statistic, oracle::pooled_t(a, b), 1e-9));

    std::vector<std::vector<long long>> table(2, std::vector<long long>(k));
    for (auto& row : table)
      for (auto& c : row) c = 1 + static_cast<long long>(gen() % 50);
    CHECK(oracle::close_rel(chi_squared(table).statistic, oracle::chi_squared_shortcut(table), 1e-9));
  }
}

TEST_CASE("chi-squared is non-negative and zero only at independence") {
  std::mt19937 gen(5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::vector<long long>> t(2, std::vector<long long>(3));
    for (auto& row : t)
      for (auto& c : row) c = 1 + gen() % 20;
    const double s = chi_squared(t).statistic;
    CHECK(s >= 0.0);
    const bool proportional = t[0][0] * t[1][1] == t[0][1] * t[1][0] && t[0][0] * t[1][2] == t[0][2] * t[1][0];
    if (!proportional) CHECK(s > 0.0);
  }
}

namespace {

// Severe cases 0..99, non-severe 100..199. Item j has 20 affirmative
// non-severe cases and 20 + planted[j] affirmative severe cases.
ResponseMatrix planted_matrix(const std::vector<int>& planted) {
  ResponseMatrix m;
  for (int i = 0; i < 200; ++i) {
    m.labels.push_back(i < 100 ? Label::Severe : Label::NonSevere);
    std::vector<int> row(planted.size());
    for (std::size_t j = 0; j < planted.size(); ++j) {
      const int within = i % 100;
      row[j] = within < (i < 100 ? 20 + planted[j] : 20) ? 1 : 0;
    }
    m.rows.push_back(std::move(row));
  }
  return m;
}

}  // namespace

TEST_CASE("item discrimination: perfect and constant items") {
  ResponseMatrix m;
  for (int i = 0; i < 40; ++i) {
    const bool sev = i < 15;
    m.labels.push_back(sev ? Label::Severe : Label::NonSevere);
    m.rows.push_back({i % 3 == 0 ? 1 : 0, sev ? 1 : 0, 1, i % 2});
  }
  auto ranked = item_discrimination(m);
  REQUIRE(ranked.size() == 4);
  CHECK(ranked.front().item == 1);
  CHECK(ranked.front().rate_gap == doctest::Approx(1.0));
  CHECK(ranked.back().item == 2);
  CHECK(ranked.back().report.statistic == 0.0);

  ResponseMatrix single = m;
  std::fill(single.labels.begin(), single.labels.end(), Label::Severe);
  CHECK(error_code([&] { item_discrimination(single); }) == "single-label");
}

TEST_CASE("item discrimination ranking matches a brute-force rate-gap sort") {
  std::vector<int> planted{5, 40, 0, 25, 60, 12, 33, 18, 50, 8};
  const auto m = planted_matrix(planted);
  std::vector<std::size_t> by_gap(planted.size());
  std::iota(by_gap.begin(), by_gap.end(), 0);
  std::stable_sort(by_gap.begin(), by_gap.end(), [&](auto a, auto b) {
    const auto gap = [&](std::size_t j) {
      int sev = 0, non = 0;
      for (std::size_t i = 0; i < m.cases(); ++i) (m.labels[i] == Label::Severe ? sev : non) += m.rows[i][j];
      return sev / 100.0 - non / 100.0;
    };
    return gap(a) > gap(b);
  });
  const auto ranked = item_discrimination(m);
  for (std::size_t r = 0; r < ranked.size(); ++r) CHECK(ranked[r].item == by_gap[r]);
}

TEST_CASE("item discrimination is permutation-equivariant") {
  std::vector<int> planted{5, 40, 0, 25, 60, 12};
  const auto m = planted_matrix(planted);
  std::vector<std::size_t> perm{3, 0, 5, 1, 4, 2};
  ResponseMatrix shuffled = m;
  for (std::size_t i = 0; i < m.cases(); ++i)
    for (std::size_t j = 0; j < perm.size(); ++j) shuffled.rows[i][j] = m.rows[i][perm[j]];
  const auto a = item_discrimination(m);
  const auto b = item_discrimination(shuffled);
  for (std::size_t r = 0; r < a.size(); ++r) {
    CHECK(perm[b[r].item] == a[r].item);
    CHECK(b[r].report.statistic == a[r].report.statistic);
  }
}
