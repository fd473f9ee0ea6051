#include "epv/feedback.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "epv/errors.hpp"
#include "epv/random.hpp"

namespace epv {

std::string_view to_string(SelectionRule r) {
  return r == SelectionRule::RetrainOnAll ? "retrain-on-all" : "retrain-on-predicted-severe";
}

SelectionRule parse_selection_rule(std::string_view s) {
  if (s == "retrain-on-all") return SelectionRule::RetrainOnAll;
  if (s == "retrain-on-predicted-severe") return SelectionRule::RetrainOnPredictedSevere;
  throw ValidationError("bad-config", "unknown selection_rule '" + std::string(s) + "'");
}

void FeedbackConfig::validate() const {
  population.validate();
  for (double b : bias) {
    if (!std::isfinite(b) || b < 0.0) throw ValidationError("bad-config", "bias values must be finite and >= 0");
  }
  if (iterations < 0 || iterations > kMaxFeedbackIterations) {
    throw ValidationError("bad-config", "iterations must lie in 0.." + std::to_string(kMaxFeedbackIterations));
  }
  if (!std::isfinite(point_budget) || point_budget <= 0.0) {
    throw ValidationError("bad-config", "point_budget must be positive");
  }
  if (!std::isfinite(cutoff)) throw ValidationError("bad-config", "cutoff must be finite");
}

FeedbackConfig load_feedback_config(std::string_view document) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(document);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("malformed-document", std::string("feedback config: ") + e.what());
  }
  FeedbackConfig config;
  config.population = default_synthetic_config(0);
  try {
    if (doc.contains("population")) config.population = load_synthetic_config(doc.at("population").dump());
    config.population.seed = doc.value("seed", config.population.seed);
    if (doc.contains("bias")) {
      const auto& bias = doc.at("bias");
      if (bias.is_array()) {
        auto values = bias.get<std::vector<double>>();
        if (values.size() != kItemCount) throw ValidationError("bad-config", "bias must list 20 values");
        std::copy(values.begin(), values.end(), config.bias.begin());
      } else {
        for (const auto& [key, value] : bias.items()) {
          const int id = std::stoi(key);
          if (id < 1 || id > kItemCount) throw ValidationError("bad-config", "bias item id " + key + " out of range");
          config.bias[static_cast<std::size_t>(id - 1)] = value.get<double>();
        }
      }
    }
    if (doc.contains("selection_rule")) {
      config.selection_rule = parse_selection_rule(doc.at("selection_rule").get<std::string>());
    }
    config.iterations = doc.value("iterations", config.iterations);
    config.cutoff = doc.value("cutoff", config.cutoff);
    config.point_budget = doc.value("point_budget", config.point_budget);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("bad-config", std::string("feedback config: ") + e.what());
  } catch (const std::invalid_argument&) {
    throw ValidationError("bad-config", "feedback config: bias keys must be item ids");
  }
  config.validate();
  return config;
}

using ItemRow = std::array<std::uint8_t, kItemCount>;

std::optional<std::array<double, kItemCount>> fit_rate_gap_weights(const std::vector<ItemRow>& items,
                                                                   const std::vector<bool>& positive,
                                                                   double point_budget) {
  std::array<std::int64_t, kItemCount> pos_yes{};
  std::array<std::int64_t, kItemCount> neg_yes{};
  std::int64_t n_pos = 0;
  std::int64_t n_neg = 0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    auto& yes = positive[i] ? pos_yes : neg_yes;
    ++(positive[i] ? n_pos : n_neg);
    for (std::size_t j = 0; j < kItemCount; ++j) yes[j] += items[i][j];
  }
  if (n_pos == 0 || n_neg == 0) return std::nullopt;

  std::array<double, kItemCount> gap{};
  double sum = 0.0;
  for (std::size_t j = 0; j < kItemCount; ++j) {
    const double g = static_cast<double>(pos_yes[j]) / static_cast<double>(n_pos) -
                     static_cast<double>(neg_yes[j]) / static_cast<double>(n_neg);
    gap[j] = std::max(0.0, g);
    sum += gap[j];
  }
  if (sum <= 0.0) return std::nullopt;
  for (double& g : gap) g = g * point_budget / sum;
  return gap;
}

namespace {

struct Sample {
  std::vector<ItemRow> truth;
  std::vector<std::array<double, kItemCount>> uniforms;
  std::vector<bool> severe;
};

Sample draw(Rng& rng, const SyntheticCohortConfig& pop) {
  Sample s;
  const auto n = static_cast<std::size_t>(pop.n_severe + pop.n_nonsevere);
  s.truth.resize(n);
  s.uniforms.resize(n);
  s.severe.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    s.severe[i] = static_cast<std::int64_t>(i) < pop.n_severe;
    const auto& rates = s.severe[i] ? pop.severe_rates : pop.nonsevere_rates;
    for (std::size_t j = 0; j < kItemCount; ++j) {
      s.uniforms[i][j] = rng.uniform();
      s.truth[i][j] = s.uniforms[i][j] < rates[j] ? 1 : 0;
    }
  }
  return s;
}

double weighted_score(const ItemRow& row, const std::array<double, kItemCount>& w) {
  double total = 0.0;
  for (std::size_t j = 0; j < kItemCount; ++j) total += row[j] * w[j];
  return total;
}

void tally(ConfusionMatrix& cm, bool actual, bool predicted) {
  if (actual) {
    ++(predicted ? cm.tp : cm.fn);
  } else {
    ++(predicted ? cm.fp : cm.tn);
  }
}

void evaluate(IterationState& state, const Sample& sample, const std::vector<bool>& predicted) {
  state.cases = static_cast<std::int64_t>(predicted.size());
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    state.predicted_severe += predicted[i] ? 1 : 0;
    tally(state.overall, sample.severe[i], predicted[i]);
    auto& group = sample.truth[i][0] ? state.subgroups.flagged : state.subgroups.unflagged;
    tally(group, sample.severe[i], predicted[i]);
  }
}

}  // namespace

FeedbackTrace run_feedback(const FeedbackConfig& config) {
  config.validate();
  const auto& pop = config.population;
  Rng rng(pop.seed);

  FeedbackTrace trace;
  trace.point_budget = config.point_budget;

  // Iteration 0: the design study. Unbiased recording, true outcomes.
  IterationState initial;
  {
    Sample sample = draw(rng, pop);
    auto fitted = fit_rate_gap_weights(sample.truth, sample.severe, config.point_budget);
    if (fitted) {
      initial.weights = *fitted;
    } else {
      initial.weights.fill(config.point_budget / kItemCount);
      initial.stalled = true;
    }
    std::vector<bool> predicted(sample.truth.size());
    for (std::size_t i = 0; i < predicted.size(); ++i) {
      predicted[i] = weighted_score(sample.truth[i], initial.weights) >= config.cutoff;
    }
    evaluate(initial, sample, predicted);
  }
  trace.states.push_back(initial);

  std::array<double, kItemCount> weights = initial.weights;
  for (int t = 1; t <= config.iterations; ++t) {
    Sample sample = draw(rng, pop);
    const std::size_t n = sample.truth.size();

    // The assessor's reading is shaded by what the model in force expects.
    std::vector<ItemRow> recorded = sample.truth;
    for (std::size_t i = 0; i < n; ++i) {
      if (weighted_score(sample.truth[i], weights) < config.cutoff) continue;
      const auto& rates = sample.severe[i] ? pop.severe_rates : pop.nonsevere_rates;
      for (std::size_t j = 0; j < kItemCount; ++j) {
        const double p = std::clamp(rates[j] + config.bias[j], 0.0, 1.0);
        recorded[i][j] = sample.uniforms[i][j] < p ? 1 : 0;
      }
    }

    std::vector<bool> predicted(n);
    for (std::size_t i = 0; i < n; ++i) predicted[i] = weighted_score(recorded[i], weights) >= config.cutoff;

    IterationState state;
    state.iteration = t;
    evaluate(state, sample, predicted);

    const auto& labels = config.selection_rule == SelectionRule::RetrainOnAll ? sample.severe : predicted;
    if (auto fitted = fit_rate_gap_weights(recorded, labels, config.point_budget)) {
      weights = *fitted;
    } else {
      state.stalled = true;
    }
    state.weights = weights;
    for (std::size_t j = 0; j < kItemCount; ++j) state.drift[j] = weights[j] - initial.weights[j];
    trace.states.push_back(state);
  }
  return trace;
}

DriftReport drift_report(const FeedbackTrace& trace) {
  if (trace.states.empty()) throw ValidationError("empty-trace", "drift report needs a nonempty trace");
  DriftReport report;
  const auto& first = trace.states.front().weights;
  const auto& last = trace.states.back().weights;
  for (std::size_t j = 0; j < kItemCount; ++j) report.delta[j] = last[j] - first[j];

  for (const auto& s : trace.states) {
    const Ratio flagged{s.subgroups.flagged.fn, s.subgroups.flagged.tp + s.subgroups.flagged.fn};
    const Ratio unflagged{s.subgroups.unflagged.fn, s.subgroups.unflagged.tp + s.subgroups.unflagged.fn};
    if (flagged.defined() && unflagged.defined()) {
      report.subgroup_fnr_gap.emplace_back(flagged.value() - unflagged.value());
    } else {
      report.subgroup_fnr_gap.emplace_back(std::nullopt);
    }
    report.stalled_iterations += s.stalled ? 1 : 0;
  }

  for (std::size_t j = 0; j < kItemCount; ++j) {
    const double limit = first[j] * (1.0 + kDriftFlagGrowth);
    for (const auto& s : trace.states) {
      if (s.weights[j] > limit && s.weights[j] > 0.0) {
        report.flagged_items.push_back(static_cast<int>(j) + 1);
        report.first_flag_iteration.push_back(s.iteration);
        break;
      }
    }
  }
  return report;
}

std::string trace_csv(const FeedbackTrace& trace) {
  std::ostringstream os;
  os << "iteration,item_id,weight,drift,predicted_severe,cases,stalled\n";
  char buf[64];
  for (const auto& s : trace.states) {
    for (std::size_t j = 0; j < kItemCount; ++j) {
      os << s.iteration << ',' << j + 1 << ',';
      std::snprintf(buf, sizeof buf, "%.9f,%.9f", s.weights[j], s.drift[j]);
      os << buf << ',' << s.predicted_severe << ',' << s.cases << ',' << (s.stalled ? 1 : 0) << '\n';
    }
  }
  return os.str();
}

}  // namespace epv
