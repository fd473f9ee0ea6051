#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <shared_mutex>
#include <string>
#include <string_view>

#include "epv/metrics.hpp"

namespace epv {

enum class CohortSource { Anchors, Upload };

struct SessionCohort {
  std::string cohort_id;
  ScoreDistribution distribution;
  CohortSource source = CohortSource::Anchors;
  std::string scale_id = "EPV";
  std::string created_at;
  std::vector<std::string> provenance;
};

struct HttpResponse {
  int status = 200;
  std::string body;  // JSON
};

// Request handling for the assessor UI, independent of the transport so it
// can be exercised directly. Cohorts are immutable and append-only; every
// other request is a pure function of its input.
//
//   GET  /scale/{id}
//   POST /score                     {"scale_id", "responses": [...]}
//   POST /cohorts                   {"source": "anchors"} or
//                                   {"source": "upload", "scale_id", "csv"}
//   GET  /cohorts/{id}/sweep
//   GET  /cohorts/{id}/whatif?cutoff=k
//   POST /audit                     {"cohort_id", "cost_ratio"}
class Service {
 public:
  HttpResponse handle(std::string_view method, std::string_view path,
                      const std::map<std::string, std::string>& query, std::string_view body);

  std::shared_ptr<const SessionCohort> cohort(const std::string& id) const;

 private:
  HttpResponse create_cohort(std::string_view body);

  mutable std::shared_mutex mutex_;
  std::map<std::string, std::shared_ptr<const SessionCohort>> cohorts_;
  std::uint64_t next_id_ = 1;
};

struct ServeOptions {
  std::string host = "127.0.0.1";
  int port = 8080;
};

// Blocks serving HTTP until the process is stopped. Returns false when the
// address cannot be bound.
bool serve(Service& service, const ServeOptions& options);

}  // namespace epv
