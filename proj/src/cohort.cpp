#include "epv/cohort.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "epv/errors.hpp"
#include "epv/random.hpp"

namespace epv {
namespace {

constexpr int kAnchorMaxTotal = 20;

// round_half_up(rate * class size) with the rate in basis points.
std::int64_t count_at_rate(std::int64_t basis_points, std::int64_t class_size) {
  return round_half_up(basis_points * class_size, 10000);
}

// Splits `count` over scores [lo, hi): equal shares, remainder one each to
// the lowest scores.
void spread(std::vector<std::int64_t>& hist, std::int64_t count, int lo, int hi) {
  const std::int64_t width = hi - lo;
  const std::int64_t share = count / width;
  const std::int64_t remainder = count % width;
  for (int s = lo; s < hi; ++s) hist[static_cast<std::size_t>(s)] = share + ((s - lo) < remainder ? 1 : 0);
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    auto comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

int parse_int_cell(const std::string& cell, std::size_t line, const std::string& column) {
  int value = 0;
  std::size_t used = 0;
  try {
    value = std::stoi(cell, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (cell.empty() || used != cell.size()) {
    throw ValidationError("bad-cell", "line " + std::to_string(line) + ", column " + column +
                                          ": '" + cell + "' is not an integer");
  }
  return value;
}

[[noreturn]] void row_error(const std::string& code, std::size_t line, const std::string& msg) {
  throw ValidationError(code, "line " + std::to_string(line) + ": " + msg);
}

}  // namespace

std::vector<AnchorPoint> anchor_points() {
  const std::int64_t pos = kAnchorSevere;
  const std::int64_t neg = kAnchorNonSevere;
  return {
      {0, pos, neg, "cutoff 0 classifies every case severe: sensitivity 100%, specificity 0%"},
      {6, count_at_rate(8327, pos), neg - count_at_rate(4532, neg),
       "cutoff 6: sensitivity 83.27% of 269 -> 224; specificity 45.32% of 812 -> 368 below"},
      {10, 129, 151, "cutoff 10 confusion matrix: TP 129, FN 140, FP 151, TN 661"},
      {12, count_at_rate(2900, pos), count_at_rate(600, neg),
       "cutoff 12: 29% of 269 severe -> 78; false positives 6% of 812 -> 49"},
      {kAnchorMaxTotal + 1, 0, 0, "cutoff 21 classifies no case severe"},
  };
}

ScoreDistribution reconstruct_anchor_cohort() {
  const auto anchors = anchor_points();
  for (std::size_t i = 1; i < anchors.size(); ++i) {
    const auto& a = anchors[i - 1];
    const auto& b = anchors[i];
    if (b.cutoff <= a.cutoff || b.severe_at_or_above > a.severe_at_or_above ||
        b.nonsevere_at_or_above > a.nonsevere_at_or_above) {
      throw InternalError("anchor points are inconsistent at cutoff " + std::to_string(b.cutoff));
    }
  }
  if (anchors.front().severe_at_or_above != kAnchorSevere ||
      anchors.front().nonsevere_at_or_above != kAnchorNonSevere) {
    throw InternalError("anchor at cutoff 0 must contain the whole cohort");
  }

  std::vector<std::int64_t> sev(kAnchorMaxTotal + 1, 0);
  std::vector<std::int64_t> non(kAnchorMaxTotal + 1, 0);
  for (std::size_t i = 1; i < anchors.size(); ++i) {
    const auto& a = anchors[i - 1];
    const auto& b = anchors[i];
    spread(sev, a.severe_at_or_above - b.severe_at_or_above, a.cutoff, b.cutoff);
    spread(non, a.nonsevere_at_or_above - b.nonsevere_at_or_above, a.cutoff, b.cutoff);
  }
  return {std::move(sev), std::move(non)};
}

std::string distribution_csv(const ScoreDistribution& dist) {
  std::ostringstream os;
  os << "score,severe,non_severe\n";
  for (int s = 0; s <= dist.max_total(); ++s) {
    os << s << ',' << dist.severe()[static_cast<std::size_t>(s)] << ','
       << dist.nonsevere()[static_cast<std::size_t>(s)] << '\n';
  }
  return os.str();
}

Label parse_label(std::string_view token) {
  std::string t = trim(token);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "severe") return Label::Severe;
  if (t == "non_severe" || t == "non-severe") return Label::NonSevere;
  throw ValidationError("bad-label", "unknown label '" + std::string(token) + "'");
}

CohortData load_cohort(std::string_view csv_text, const ScaleDefinition& scale) {
  std::istringstream in{std::string(csv_text)};
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header = split_csv_line(line);
      break;
    }
  }
  if (header.empty()) throw ValidationError("empty-cohort", "cohort file has no header");

  std::vector<std::string> item_header;
  for (int j = 1; j <= kItemCount; ++j) item_header.push_back("item_" + std::to_string(j));
  item_header.push_back("label");

  const bool score_form = header == std::vector<std::string>{"score", "label"};
  const bool item_form = header == item_header;
  if (!score_form && !item_form) {
    throw ValidationError("bad-header", "line " + std::to_string(line_no) +
                                            ": header must be 'score,label' or 'item_1,...,item_20,label'");
  }

  CohortData data;
  if (item_form) data.matrix.emplace();
  const int max_total = scale.max_total();
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      row_error("ragged-row", line_no, std::to_string(cells.size()) + " cells, expected " +
                                           std::to_string(header.size()));
    }
    Label label;
    try {
      label = parse_label(cells.back());
    } catch (const ValidationError& e) {
      row_error(e.code(), line_no, e.what());
    }

    int total = 0;
    if (score_form) {
      total = parse_int_cell(cells[0], line_no, "score");
    } else {
      std::vector<int> row;
      row.reserve(kItemCount);
      for (int j = 0; j < kItemCount; ++j) {
        const int points = parse_int_cell(cells[static_cast<std::size_t>(j)], line_no, header[static_cast<std::size_t>(j)]);
        const int max = scale.items[static_cast<std::size_t>(j)].max_points;
        if (points < 0 || points > max) {
          row_error("points-range", line_no, header[static_cast<std::size_t>(j)] + " = " + std::to_string(points) +
                                                 " outside 0.." + std::to_string(max));
        }
        row.push_back(points);
        total += points;
      }
      data.matrix->rows.push_back(std::move(row));
      data.matrix->labels.push_back(label);
    }
    if (total < 0 || total > max_total) {
      row_error("score-range", line_no, "score " + std::to_string(total) + " outside 0.." + std::to_string(max_total));
    }
    data.scores.push_back({total, label});
  }
  return data;
}

CohortData load_cohort_file(const std::string& path, const ScaleDefinition& scale) {
  std::ifstream in(path);
  if (!in) throw ValidationError("io", "cannot read cohort file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return load_cohort(buf.str(), scale);
}

std::string cohort_scores_csv(std::span<const LabeledScore> scores) {
  std::ostringstream os;
  os << "score,label\n";
  for (const auto& s : scores) os << s.score << ',' << to_string(s.label) << '\n';
  return os.str();
}

std::string response_matrix_csv(const ResponseMatrix& matrix) {
  std::ostringstream os;
  for (int j = 1; j <= kItemCount; ++j) os << "item_" << j << ',';
  os << "label\n";
  for (std::size_t i = 0; i < matrix.cases(); ++i) {
    for (int v : matrix.rows[i]) os << v << ',';
    os << to_string(matrix.labels[i]) << '\n';
  }
  return os.str();
}

void SyntheticCohortConfig::validate() const {
  if (n_severe <= 0 || n_nonsevere <= 0) {
    throw ValidationError("bad-config", "class counts must be positive");
  }
  for (const auto* rates : {&severe_rates, &nonsevere_rates}) {
    for (double r : *rates) {
      if (!(r >= 0.0 && r <= 1.0)) throw ValidationError("bad-config", "item rates must lie in [0, 1]");
    }
  }
}

SyntheticCohortConfig default_synthetic_config(std::uint64_t seed) {
  SyntheticCohortConfig config;
  config.severe_rates = {0.357, 0.45, 0.40, 0.60, 0.40, 0.45, 0.50, 0.35, 0.55, 0.25,
                         0.65,  0.35, 0.40, 0.40, 0.15, 0.50, 0.60, 0.45, 0.35, 0.30};
  config.nonsevere_rates = {0.259, 0.35, 0.25, 0.35, 0.25, 0.20, 0.20, 0.10, 0.20, 0.10,
                            0.40,  0.20, 0.25, 0.30, 0.08, 0.25, 0.40, 0.15, 0.25, 0.20};
  config.seed = seed;
  return config;
}

SyntheticCohortConfig load_synthetic_config(std::string_view document) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(document);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("malformed-document", std::string("cohort config: ") + e.what());
  }
  SyntheticCohortConfig config = default_synthetic_config(0);
  try {
    config.n_severe = doc.value("n_severe", config.n_severe);
    config.n_nonsevere = doc.value("n_nonsevere", config.n_nonsevere);
    config.seed = doc.value("seed", config.seed);
    for (auto [key, target] : {std::pair{"severe_rates", &config.severe_rates},
                               std::pair{"nonsevere_rates", &config.nonsevere_rates}}) {
      if (!doc.contains(key)) continue;
      const auto rates = doc.at(key).get<std::vector<double>>();
      if (rates.size() != kItemCount) {
        throw ValidationError("bad-config", std::string(key) + " must list 20 rates");
      }
      std::copy(rates.begin(), rates.end(), target->begin());
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("bad-config", std::string("cohort config: ") + e.what());
  }
  config.validate();
  return config;
}

ResponseMatrix generate_synthetic(const SyntheticCohortConfig& config, const ScaleDefinition& scale) {
  config.validate();
  Rng rng(config.seed);
  ResponseMatrix matrix;
  matrix.rows.reserve(static_cast<std::size_t>(config.n_severe + config.n_nonsevere));
  auto draw_class = [&](std::int64_t n, const std::array<double, kItemCount>& rates, Label label) {
    for (std::int64_t i = 0; i < n; ++i) {
      std::vector<int> row(kItemCount, 0);
      for (int j = 0; j < kItemCount; ++j) {
        const auto slot = static_cast<std::size_t>(j);
        for (int level = 0; level < scale.items[slot].max_points; ++level) {
          row[slot] += rng.bernoulli(rates[slot]) ? 1 : 0;
        }
      }
      matrix.rows.push_back(std::move(row));
      matrix.labels.push_back(label);
    }
  };
  draw_class(config.n_severe, config.severe_rates, Label::Severe);
  draw_class(config.n_nonsevere, config.nonsevere_rates, Label::NonSevere);
  return matrix;
}

}  // namespace epv
