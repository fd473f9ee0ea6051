// epvaudit: command-line front end for scoring, classification audits,
// psychometric checks and the feedback-loop simulator.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "epv/audit.hpp"
#include "epv/cohort.hpp"
#include "epv/errors.hpp"
#include "epv/feedback.hpp"
#include "epv/json_io.hpp"
#include "epv/psychometrics.hpp"
#include "epv/scale.hpp"
#include "epv/service.hpp"

namespace {

using namespace epv;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("io", "cannot read '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("io", "cannot write '" + path + "'");
  out << content;
}

struct CohortInput {
  bool anchors = false;
  std::string cohort_path;
  std::string scale = "EPV";
};

struct LoadedCohort {
  ScoreDistribution dist;
  AuditContext context;
};

LoadedCohort load_distribution(const CohortInput& in) {
  if (in.anchors == !in.cohort_path.empty()) {
    throw ValidationError("usage", "give exactly one of --anchors or --cohort FILE");
  }
  LoadedCohort out;
  if (in.anchors) {
    out.dist = reconstruct_anchor_cohort();
    out.context.source = "anchor reconstruction";
    for (const auto& a : anchor_points()) out.context.provenance.push_back(a.source);
    out.context.provenance.push_back(
        "scores between anchors are an equal-split interpolation, not published values");
    return out;
  }
  const auto scale = resolve_scale(in.scale);
  const auto data = load_cohort_file(in.cohort_path, scale);
  out.dist = ScoreDistribution::from_scores(data.scores, scale.max_total());
  out.context.scale_name = scale.name;
  out.context.illustrative_weights = scale.illustrative;
  out.context.source = "cohort file " + in.cohort_path;
  out.context.provenance.push_back("cohort loaded from " + in.cohort_path);
  return out;
}

void add_cohort_flags(CLI::App* cmd, CohortInput& in) {
  auto* anchors = cmd->add_flag("--anchors", in.anchors, "Use the reconstructed design-cohort distribution");
  auto* cohort = cmd->add_option("--cohort", in.cohort_path, "Cohort CSV (score,label or item_1..item_20,label)");
  anchors->excludes(cohort);
  cmd->add_option("--scale", in.scale, "EPV, EPV-R or a scale config file (for --cohort)");
}

std::string score_text(const ScoreResult& result, const ScaleDefinition& scale) {
  std::ostringstream os;
  os << "scale: " << scale.name << '\n'
     << "total: " << result.imputed_total << '\n'
     << "tier: " << to_string(result.tier) << '\n'
     << "answered points: " << result.answered_points << " of " << result.answered_max << " achievable\n"
     << "contributions:\n";
  for (const auto& c : result.contributions) {
    os << "  item " << c.item_id << " (" << scale.item(c.item_id).label_key << "): ";
    if (c.missing()) {
      os << "missing";
    } else {
      os << *c.points << '/' << c.max_points;
    }
    os << '\n';
  }
  os << '\n' << case_disclosure(result, scale);
  return os.str();
}

std::string psych_text(const ResponseMatrix& matrix, const ScaleDefinition& scale) {
  std::ostringstream os;
  char buf[160];
  os << "cases: " << matrix.cases() << ", items: " << matrix.items() << '\n';
  std::snprintf(buf, sizeof buf, "cronbach_alpha: %.6f\n", cronbach_alpha(matrix));
  os << buf;

  std::vector<double> severe;
  std::vector<double> non;
  const auto totals = matrix.totals();
  for (std::size_t i = 0; i < totals.size(); ++i) {
    (matrix.labels[i] == Label::Severe ? severe : non).push_back(totals[i]);
  }
  const auto t = two_sample_t(severe, non);
  std::snprintf(buf, sizeof buf, "t_total_score: t=%.6f dof=%.0f significant_at_05=%s\n", t.statistic,
                t.degrees_of_freedom, t.significant_at_05 ? "yes" : "no");
  os << buf << "  note: " << t.assumption_notes << "\n\nitem discrimination (ranked by chi-squared):\n"
     << "rank item label_key                      chi2        severe_rate nonsev_rate gap       sig\n";
  int rank = 1;
  for (const auto& d : item_discrimination(matrix)) {
    std::snprintf(buf, sizeof buf, "%4d %4zu %-30s %11.6f %11.6f %11.6f %9.6f %s\n", rank++, d.item + 1,
                  scale.items[d.item].label_key.c_str(), d.report.statistic, d.severe_rate, d.nonsevere_rate,
                  d.rate_gap, d.report.significant_at_05 ? "yes" : "no");
    os << buf;
  }
  return os.str();
}

int run(int argc, char** argv) {
  CLI::App app{"Scoring and classification audit tools for the 20-item EPV risk scale"};
  app.require_subcommand(1);

  // score
  std::string assessment_path;
  std::string score_scale;
  bool score_json = false;
  auto* score_cmd = app.add_subcommand("score", "Score one assessment and print the disclosure block");
  score_cmd->add_option("--assessment", assessment_path, "Assessment JSON file")->required();
  score_cmd->add_option("--scale", score_scale, "EPV, EPV-R or a scale config file (default: the file's scale_id)");
  score_cmd->add_flag("--json", score_json, "Print the structured result");

  // sweep
  CohortInput sweep_in;
  std::string sweep_out;
  std::string sweep_plot;
  auto* sweep_cmd = app.add_subcommand("sweep", "Cutoff sweep CSV over 0..max_total+1");
  add_cohort_flags(sweep_cmd, sweep_in);
  sweep_cmd->add_option("--out", sweep_out, "Output CSV (default stdout)");
  sweep_cmd->add_option("--plot-prefix", sweep_plot, "Also write <prefix>_tradeoff.csv and <prefix>_roc.csv");

  // audit
  CohortInput audit_in;
  double cost_ratio = 0.0;
  std::string audit_out;
  std::string audit_json_out;
  std::string audit_plot;
  std::vector<std::string> audit_assessments;
  auto* audit_cmd = app.add_subcommand("audit", "Audit report with FN:FP cost analysis");
  add_cohort_flags(audit_cmd, audit_in);
  audit_cmd->add_option("--cost-ratio", cost_ratio, "Cost of a false negative relative to a false positive")
      ->required();
  audit_cmd->add_option("--out", audit_out, "Text report (default stdout)");
  audit_cmd->add_option("--json-out", audit_json_out, "Structured report");
  audit_cmd->add_option("--plot-prefix", audit_plot, "Also write plot-data CSVs");
  audit_cmd->add_option("--assessment", audit_assessments, "Assessment files to disclose in the report");

  // reconstruct
  std::string reconstruct_out;
  bool reconstruct_cases = false;
  auto* reconstruct_cmd = app.add_subcommand("reconstruct", "Write the anchor-constrained design-cohort distribution");
  reconstruct_cmd->add_option("--out", reconstruct_out, "Output CSV (default stdout)");
  reconstruct_cmd->add_flag("--cases", reconstruct_cases, "Write one score,label row per case instead of the histogram");

  // generate
  std::uint64_t gen_seed = 0;
  std::string gen_config;
  std::string gen_scale = "EPV";
  std::string gen_out;
  std::string gen_form = "items";
  std::int64_t gen_n_severe = -1;
  std::int64_t gen_n_non = -1;
  auto* gen_cmd = app.add_subcommand("generate", "Seeded synthetic cohort");
  gen_cmd->add_option("--seed", gen_seed, "Random seed (decimal)")->required();
  gen_cmd->add_option("--config", gen_config, "Synthetic cohort config JSON");
  gen_cmd->add_option("--scale", gen_scale, "EPV, EPV-R or a scale config file");
  gen_cmd->add_option("--n-severe", gen_n_severe, "Override severe case count");
  gen_cmd->add_option("--n-nonsevere", gen_n_non, "Override non-severe case count");
  gen_cmd->add_option("--form", gen_form, "items or scores")->check(CLI::IsMember({"items", "scores"}));
  gen_cmd->add_option("--out", gen_out, "Output CSV (default stdout)");

  // psych
  std::string psych_matrix;
  std::string psych_scale = "EPV";
  std::string psych_table;
  auto* psych_cmd = app.add_subcommand("psych", "Cronbach's alpha, t-test and item discrimination");
  auto* matrix_opt = psych_cmd->add_option("--matrix", psych_matrix, "Item-form cohort CSV");
  psych_cmd->add_option("--scale", psych_scale, "EPV, EPV-R or a scale config file");
  auto* table_opt = psych_cmd->add_option("--table", psych_table,
                                          "Chi-squared on a 2 x k table: rows separated by ';', cells by ','");
  matrix_opt->excludes(table_opt);

  // simulate
  std::string sim_config;
  std::uint64_t sim_seed = 0;
  int sim_iterations = -1;
  std::string sim_out;
  std::string sim_summary;
  auto* sim_cmd = app.add_subcommand("simulate", "Feedback-loop simulation");
  sim_cmd->add_option("--config", sim_config, "Feedback config JSON")->required();
  sim_cmd->add_option("--seed", sim_seed, "Random seed (decimal)")->required();
  sim_cmd->add_option("--iterations", sim_iterations, "Override the configured iteration count");
  sim_cmd->add_option("--out", sim_out, "Trace CSV (default stdout)");
  sim_cmd->add_option("--summary", sim_summary, "JSON drift summary");

  // serve
  ServeOptions serve_opts;
  auto* serve_cmd = app.add_subcommand("serve", "HTTP service for the assessor UI");
  serve_cmd->add_option("--host", serve_opts.host, "Bind address (default loopback)");
  serve_cmd->add_option("--port", serve_opts.port, "Port");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  if (score_cmd->parsed()) {
    const auto doc = read_file(assessment_path);
    const auto assessment = json::parse_assessment(doc);
    std::string scale_name = score_scale;
    if (scale_name.empty()) scale_name = nlohmann::json::parse(doc).value("scale_id", std::string("EPV"));
    const auto scale = resolve_scale(scale_name);
    const auto result = score(scale, assessment);
    if (score_json) {
      auto out = json::to_json(result);
      out["disclosure"] = case_disclosure(result, scale);
      std::cout << out.dump(2) << '\n';
    } else {
      std::cout << score_text(result, scale);
    }
  } else if (sweep_cmd->parsed()) {
    const auto cohort = load_distribution(sweep_in);
    const auto rows = sweep(cohort.dist);
    write_output(sweep_out, sweep_csv(rows));
    if (!sweep_plot.empty()) {
      write_output(sweep_plot + "_tradeoff.csv", tradeoff_plot_csv(rows));
      write_output(sweep_plot + "_roc.csv", roc_plot_csv(rows));
    }
  } else if (audit_cmd->parsed()) {
    const auto cohort = load_distribution(audit_in);
    const auto rows = sweep(cohort.dist);
    auto report = build_audit(cohort.dist, rows, cost_ratio, cohort.context);
    for (const auto& path : audit_assessments) {
      const auto doc = read_file(path);
      const auto scale = resolve_scale(nlohmann::json::parse(doc).value("scale_id", std::string("EPV")));
      report.disclosures.push_back("case " + path + "\n" + case_disclosure(score(scale, json::parse_assessment(doc)), scale));
    }
    write_output(audit_out, render_audit_text(report));
    if (!audit_json_out.empty()) write_output(audit_json_out, json::to_json(report).dump(2) + "\n");
    if (!audit_plot.empty()) {
      write_output(audit_plot + "_tradeoff.csv", tradeoff_plot_csv(rows));
      write_output(audit_plot + "_roc.csv", roc_plot_csv(rows));
    }
  } else if (reconstruct_cmd->parsed()) {
    const auto dist = reconstruct_anchor_cohort();
    const auto cases = dist.expand();
    write_output(reconstruct_out, reconstruct_cases ? cohort_scores_csv(cases) : distribution_csv(dist));
  } else if (gen_cmd->parsed()) {
    auto config = gen_config.empty() ? default_synthetic_config(gen_seed) : load_synthetic_config(read_file(gen_config));
    config.seed = gen_seed;
    if (gen_n_severe >= 0) config.n_severe = gen_n_severe;
    if (gen_n_non >= 0) config.n_nonsevere = gen_n_non;
    const auto scale = resolve_scale(gen_scale);
    const auto matrix = generate_synthetic(config, scale);
    if (gen_form == "items") {
      write_output(gen_out, response_matrix_csv(matrix));
    } else {
      std::vector<LabeledScore> scores;
      const auto totals = matrix.totals();
      for (std::size_t i = 0; i < totals.size(); ++i) scores.push_back({totals[i], matrix.labels[i]});
      write_output(gen_out, cohort_scores_csv(scores));
    }
  } else if (psych_cmd->parsed()) {
    if (!psych_table.empty()) {
      std::vector<std::vector<long long>> table;
      std::stringstream rows(psych_table);
      std::string row;
      while (std::getline(rows, row, ';')) {
        std::vector<long long> cells;
        std::stringstream cs(row);
        std::string cell;
        while (std::getline(cs, cell, ',')) {
          try {
            cells.push_back(std::stoll(cell));
          } catch (const std::exception&) {
            throw ValidationError("bad-cell", "table cell '" + cell + "' is not an integer");
          }
        }
        table.push_back(std::move(cells));
      }
      const auto r = chi_squared(table);
      std::printf("chi_squared: %.6f dof=%.0f significant_at_05=%s\n", r.statistic, r.degrees_of_freedom,
                  r.significant_at_05 ? "yes" : "no");
    } else if (!psych_matrix.empty()) {
      const auto scale = resolve_scale(psych_scale);
      const auto data = load_cohort_file(psych_matrix, scale);
      if (!data.matrix) throw ValidationError("bad-header", "psych needs an item-form cohort (item_1..item_20,label)");
      std::cout << psych_text(*data.matrix, scale);
    } else {
      throw ValidationError("usage", "psych needs --matrix FILE or --table ROWS");
    }
  } else if (sim_cmd->parsed()) {
    auto config = load_feedback_config(read_file(sim_config));
    config.population.seed = sim_seed;
    if (sim_iterations >= 0) config.iterations = sim_iterations;
    config.validate();
    const auto trace = run_feedback(config);
    write_output(sim_out, trace_csv(trace));
    if (!sim_summary.empty()) {
      write_output(sim_summary, json::to_json(drift_report(trace), trace).dump(2) + "\n");
    }
  } else if (serve_cmd->parsed()) {
    Service service;
    std::cerr << "listening on " << serve_opts.host << ':' << serve_opts.port << '\n';
    if (!serve(service, serve_opts)) {
      std::cerr << "error: cannot bind " << serve_opts.host << ':' << serve_opts.port << '\n';
      return 1;
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const epv::ValidationError& e) {
    std::cerr << "error [" << e.code() << "]: " << e.what() << '\n';
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error [malformed-document]: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 2;
  }
}
