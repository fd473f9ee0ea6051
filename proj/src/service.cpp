#include "epv/service.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <mutex>
#include <vector>

#include <httplib.h>

#include "epv/audit.hpp"
#include "epv/cohort.hpp"
#include "epv/errors.hpp"
#include "epv/json_io.hpp"
#include "epv/scale.hpp"

namespace epv {
namespace {

using json::Json;

HttpResponse error(int status, const std::string& code, const std::string& message) {
  Json body = {{"schema_version", json::kSchemaVersion}, {"error", {{"code", code}, {"message", message}}}};
  return {status, body.dump()};
}

HttpResponse ok(const Json& body, int status = 200) { return {status, body.dump()}; }

std::vector<std::string_view> split_path(std::string_view path) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (start < path.size()) {
    auto slash = path.find('/', start);
    if (slash == std::string_view::npos) slash = path.size();
    if (slash > start) parts.push_back(path.substr(start, slash - start));
    start = slash + 1;
  }
  return parts;
}

nlohmann::json parse_body(std::string_view body) {
  try {
    auto doc = nlohmann::json::parse(body);
    if (!doc.is_object()) throw ValidationError("malformed-body", "request body must be a JSON object");
    return doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("malformed-body", std::string("request body: ") + e.what());
  }
}

std::string now_iso8601() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

const ScaleDefinition& scale_by_id(const std::string& id) {
  if (id == "EPV") return builtin_scale(ScaleId::EPV);
  if (id == "EPV-R") return builtin_scale(ScaleId::EPV_R);
  throw ValidationError("unknown-scale", "unknown scale '" + id + "'");
}

Json whatif_json(const SessionCohort& cohort, int cutoff) {
  const auto cm = confusion(cohort.distribution, cutoff);
  const auto row = metrics(cm, cutoff);
  const auto paradox = accuracy_paradox_flag(row, cohort.distribution);
  return {{"schema_version", json::kSchemaVersion},
          {"cohort_id", cohort.cohort_id},
          {"cutoff", cutoff},
          {"confusion", json::to_json(cm)},
          {"metrics", json::to_json(row)},
          {"flags",
           {{"fn_majority", cm.fn > cm.tp},
            {"accuracy_paradox", paradox.flagged},
            {"accuracy_paradox_explanation", paradox.explanation},
            {"all_predicted_severe", cm.fn == 0 && cm.tn == 0},
            {"none_predicted_severe", cm.tp == 0 && cm.fp == 0}}}};
}

}  // namespace

std::shared_ptr<const SessionCohort> Service::cohort(const std::string& id) const {
  std::shared_lock lock(mutex_);
  auto it = cohorts_.find(id);
  return it == cohorts_.end() ? nullptr : it->second;
}

HttpResponse Service::create_cohort(std::string_view body) {
  const auto doc = parse_body(body);
  const std::string source = doc.value("source", std::string());
  auto cohort = std::make_shared<SessionCohort>();
  if (source == "anchors") {
    cohort->source = CohortSource::Anchors;
    cohort->distribution = reconstruct_anchor_cohort();
    for (const auto& a : anchor_points()) cohort->provenance.push_back(a.source);
  } else if (source == "upload") {
    cohort->source = CohortSource::Upload;
    cohort->scale_id = doc.value("scale_id", std::string("EPV"));
    if (!doc.contains("csv") || !doc.at("csv").is_string()) {
      throw ValidationError("missing-field", "upload cohorts need a 'csv' string");
    }
    const auto& scale = scale_by_id(cohort->scale_id);
    const auto data = load_cohort(doc.at("csv").get<std::string>(), scale);
    cohort->distribution = ScoreDistribution::from_scores(data.scores, scale.max_total());
    if (cohort->distribution.total() == 0) throw ValidationError("empty-cohort", "uploaded cohort has no rows");
    cohort->provenance.push_back("uploaded cohort CSV");
  } else {
    throw ValidationError("bad-source", "source must be 'anchors' or 'upload'");
  }
  cohort->created_at = now_iso8601();

  {
    std::unique_lock lock(mutex_);
    cohort->cohort_id = "cohort-" + std::to_string(next_id_++);
    cohorts_.emplace(cohort->cohort_id, cohort);
  }
  const auto& d = cohort->distribution;
  return ok({{"schema_version", json::kSchemaVersion},
             {"cohort_id", cohort->cohort_id},
             {"source", cohort->source == CohortSource::Anchors ? "anchors" : "upload"},
             {"scale_id", cohort->scale_id},
             {"created_at", cohort->created_at},
             {"max_total", d.max_total()},
             {"n_pos", d.n_pos()},
             {"n_neg", d.n_neg()}},
            201);
}

HttpResponse Service::handle(std::string_view method, std::string_view path,
                             const std::map<std::string, std::string>& query, std::string_view body) {
  const auto parts = split_path(path);
  try {
    if (method == "GET" && parts.size() == 2 && parts[0] == "scale") {
      const std::string id(parts[1]);
      if (id != "EPV" && id != "EPV-R") return error(404, "unknown-scale", "unknown scale '" + id + "'");
      return ok(json::to_json(scale_by_id(id)));
    }

    if (method == "POST" && parts.size() == 1 && parts[0] == "score") {
      const auto doc = parse_body(body);
      const auto& scale = scale_by_id(doc.value("scale_id", std::string("EPV")));
      Assessment assessment;
      assessment.responses = json::parse_responses(doc.contains("responses") ? doc.at("responses") : nlohmann::json());
      const auto result = score(scale, assessment);
      Json out = json::to_json(result);
      out["scale_id"] = to_string(scale.scale_id);
      out["disclosure"] = case_disclosure(result, scale);
      out["relative_risk_banner"] = kRelativeRiskBanner;
      return ok(out);
    }

    if (method == "POST" && parts.size() == 1 && parts[0] == "cohorts") return create_cohort(body);

    if (method == "GET" && parts.size() == 3 && parts[0] == "cohorts") {
      auto c = cohort(std::string(parts[1]));
      if (!c) return error(404, "unknown-cohort", "unknown cohort '" + std::string(parts[1]) + "'");
      if (parts[2] == "sweep") {
        const auto rows = sweep(c->distribution);
        Json out_rows = Json::array();
        for (const auto& r : rows) out_rows.push_back(json::to_json(r));
        Json out = {{"schema_version", json::kSchemaVersion}, {"cohort_id", c->cohort_id}, {"rows", std::move(out_rows)}};
        const bool both = c->distribution.n_pos() > 0 && c->distribution.n_neg() > 0;
        out["auc"] = both ? Json(format_decimal(auc(rows))) : Json("n/a");
        return ok(out);
      }
      if (parts[2] == "whatif") {
        auto it = query.find("cutoff");
        if (it == query.end()) return error(400, "missing-cutoff", "whatif needs ?cutoff=k");
        int cutoff = 0;
        std::size_t used = 0;
        try {
          cutoff = std::stoi(it->second, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used == 0 || used != it->second.size()) return error(400, "bad-cutoff", "cutoff must be an integer");
        if (cutoff < 0 || cutoff > c->distribution.max_total() + 1) {
          return error(400, "cutoff-range", "cutoff " + it->second + " outside 0.." +
                                                std::to_string(c->distribution.max_total() + 1));
        }
        return ok(whatif_json(*c, cutoff));
      }
      return error(404, "not-found", "no such cohort resource");
    }

    if (method == "POST" && parts.size() == 1 && parts[0] == "audit") {
      const auto doc = parse_body(body);
      const auto id = doc.value("cohort_id", std::string());
      auto c = cohort(id);
      if (!c) return error(404, "unknown-cohort", "unknown cohort '" + id + "'");
      if (!doc.contains("cost_ratio") || !doc.at("cost_ratio").is_number()) {
        throw ValidationError("cost-ratio-required", "cost_ratio (FN:FP) must be supplied as a number");
      }
      const auto rows = sweep(c->distribution);
      AuditContext ctx;
      ctx.scale_name = c->scale_id;
      ctx.illustrative_weights = scale_by_id(c->scale_id).illustrative;
      ctx.source = c->source == CohortSource::Anchors ? "anchor reconstruction" : "uploaded cohort";
      ctx.provenance = c->provenance;
      const auto report = build_audit(c->distribution, rows, doc.at("cost_ratio").get<double>(), ctx);
      return ok(json::to_json(report));
    }

    return error(404, "not-found", "no route for " + std::string(method) + " " + std::string(path));
  } catch (const ValidationError& e) {
    if (e.code() == "malformed-body") return error(400, e.code(), e.what());
    if (e.code() == "unknown-scale") return error(404, e.code(), e.what());
    return error(422, e.code(), e.what());
  } catch (const std::exception& e) {
    return error(500, "internal", e.what());
  }
}

bool serve(Service& service, const ServeOptions& options) {
  httplib::Server server;
  auto bridge = [&service](const httplib::Request& req, httplib::Response& res) {
    std::map<std::string, std::string> query;
    for (const auto& [k, v] : req.params) query.emplace(k, v);
    const auto out = service.handle(req.method, req.path, query, req.body);
    res.status = out.status;
    res.set_content(out.body, "application/json");
  };
  server.Get(R"(/.*)", bridge);
  server.Post(R"(/.*)", bridge);
  return server.listen(options.host, options.port);
}

}  // namespace epv
