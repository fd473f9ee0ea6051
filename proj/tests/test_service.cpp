#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "epv/audit.hpp"
#include "epv/cohort.hpp"
#include "epv/json_io.hpp"
#include "epv/service.hpp"

using namespace epv;
using J = nlohmann::json;

namespace {

struct Reply {
  int status;
  J body;
};

Reply call(Service& s, std::string_view method, std::string_view path, const J& body = J(),
           std::map<std::string, std::string> query = {}) {
  const auto r = s.handle(method, path, query, body.is_null() ? "" : body.dump());
  return {r.status, J::parse(r.body)};
}

J responses_all(int points) {
  J rs = J::array();
  for (int id = 1; id <= 20; ++id) rs.push_back({{"item_id", id}, {"points", points}});
  return rs;
}

std::string anchors_cohort(Service& s) {
  auto r = call(s, "POST", "/cohorts", {{"source", "anchors"}});
  REQUIRE(r.status == 201);
  return r.body["cohort_id"].get<std::string>();
}

}  // namespace

TEST_CASE("GET /scale returns guidance text") {
  Service s;
  auto r = call(s, "GET", "/scale/EPV");
  CHECK(r.status == 200);
  CHECK(r.body["items"].size() == 20);
  CHECK(r.body["items"][0]["guidance"].get<std::string>().find("foreign") != std::string::npos);
  CHECK(r.body["max_total"] == 20);
  CHECK(call(s, "GET", "/scale/EPV-R").body["illustrative"] == true);
  CHECK(call(s, "GET", "/scale/nope").status == 404);
}

TEST_CASE("POST /score") {
  Service s;
  auto r = call(s, "POST", "/score", {{"scale_id", "EPV"}, {"responses", responses_all(0)}});
  CHECK(r.status == 200);
  CHECK(r.body["imputed_total"] == 0);
  CHECK(r.body["tier"] == "low");
  CHECK(r.body["disclosure"].get<std::string>().find("20/20 items answered") != std::string::npos);
  CHECK(r.body["relative_risk_banner"] == kRelativeRiskBanner);

  // Parity with the module call, field for field.
  const auto& scale = builtin_scale(ScaleId::EPV);
  auto direct = J::parse(epv::json::to_json(score(scale, epv::json::parse_assessment(
                                                          J{{"responses", responses_all(1)}}.dump())))
                                .dump());
  auto served = call(s, "POST", "/score", {{"scale_id", "EPV"}, {"responses", responses_all(1)}}).body;
  for (auto& [key, value] : direct.items()) CHECK(served[key] == value);

  J missing = J::array();
  for (int id = 1; id <= 20; ++id) missing.push_back({{"item_id", id}, {"points", "missing"}});
  auto blocked = call(s, "POST", "/score", {{"scale_id", "EPV"}, {"responses", missing}});
  CHECK(blocked.status == 422);
  CHECK(blocked.body["error"]["code"] == "all-missing-blocked");

  auto bad = call(s, "POST", "/score", {{"scale_id", "EPV"}, {"responses", responses_all(2)}});
  CHECK(bad.status == 422);
  CHECK(bad.body["error"]["code"] == "points-range");

  CHECK(s.handle("POST", "/score", {}, "{oops").status == 400);
}

TEST_CASE("cohorts, sweep and what-if") {
  Service s;
  const auto id = anchors_cohort(s);
  auto w = call(s, "GET", "/cohorts/" + id + "/whatif", J(), {{"cutoff", "10"}});
  REQUIRE(w.status == 200);
  CHECK(w.body["confusion"] == J({{"tp", 129}, {"fn", 140}, {"fp", 151}, {"tn", 661}}));
  CHECK(w.body["metrics"]["sensitivity"] == "0.479554");
  CHECK(w.body["flags"]["fn_majority"] == true);
  CHECK(w.body["flags"]["accuracy_paradox"] == true);

  auto zero = call(s, "GET", "/cohorts/" + id + "/whatif", J(), {{"cutoff", "0"}});
  CHECK(zero.body["flags"]["all_predicted_severe"] == true);

  CHECK(call(s, "GET", "/cohorts/" + id + "/whatif", J(), {{"cutoff", "25"}}).status == 400);
  CHECK(call(s, "GET", "/cohorts/" + id + "/whatif", J(), {{"cutoff", "x"}}).status == 400);
  CHECK(call(s, "GET", "/cohorts/" + id + "/whatif").status == 400);
  CHECK(call(s, "GET", "/cohorts/none/sweep").status == 404);

  auto sw = call(s, "GET", "/cohorts/" + id + "/sweep");
  REQUIRE(sw.status == 200);
  CHECK(sw.body["rows"].size() == 22);
  const auto rows = sweep(reconstruct_anchor_cohort());
  for (std::size_t c = 0; c < rows.size(); ++c) {
    CHECK(sw.body["rows"][c] == J::parse(epv::json::to_json(rows[c]).dump()));
  }
  CHECK(sw.body["auc"] == format_decimal(auc(rows)));

  // Identical requests, identical responses.
  CHECK(call(s, "GET", "/cohorts/" + id + "/sweep").body == sw.body);
}

TEST_CASE("uploaded cohorts") {
  Service s;
  auto r = call(s, "POST", "/cohorts", {{"source", "upload"}, {"csv", "score,label\n3,severe\n1,non_severe\n"}});
  REQUIRE(r.status == 201);
  CHECK(r.body["n_pos"] == 1);
  auto bad = call(s, "POST", "/cohorts", {{"source", "upload"}, {"csv", "score,label\n30,severe\n"}});
  CHECK(bad.status == 422);
  CHECK(bad.body["error"]["code"] == "score-range");
  CHECK(call(s, "POST", "/cohorts", {{"source", "elsewhere"}}).status == 422);
}

TEST_CASE("POST /audit") {
  Service s;
  const auto id = anchors_cohort(s);
  auto r = call(s, "POST", "/audit", {{"cohort_id", id}, {"cost_ratio", 3}});
  REQUIRE(r.status == 200);
  CHECK(r.body["schema_version"] == kAuditSchemaVersion);
  CHECK(r.body["cost_minimizing_cutoff"] == 10);
  CHECK(r.body["rows"][10]["fn_majority"] == true);
  auto missing = call(s, "POST", "/audit", {{"cohort_id", id}});
  CHECK(missing.status == 422);
  CHECK(missing.body["error"]["code"] == "cost-ratio-required");
  CHECK(call(s, "POST", "/audit", {{"cohort_id", id}, {"cost_ratio", 0}}).body["error"]["code"] == "bad-cost-ratio");
  CHECK(call(s, "POST", "/audit", {{"cohort_id", "x"}, {"cost_ratio", 1}}).status == 404);
  CHECK(call(s, "DELETE", "/audit").status == 404);
}

TEST_CASE("concurrent cohort creation yields distinct ids") {
  Service s;
  std::vector<std::thread> threads;
  std::vector<std::string> ids(8);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    threads.emplace_back([&, i] {
      auto r = s.handle("POST", "/cohorts", {}, R"({"source":"anchors"})");
      ids[i] = J::parse(r.body)["cohort_id"].get<std::string>();
    });
  }
  for (auto& t : threads) t.join();
  std::sort(ids.begin(), ids.end());
  CHECK(std::unique(ids.begin(), ids.end()) == ids.end());
}

TEST_CASE("HTTP transport over loopback") {
  Service s;
  httplib::Server server;
  server.Get(R"(/.*)", [&](const httplib::Request& req, httplib::Response& res) {
    std::map<std::string, std::string> q(req.params.begin(), req.params.end());
    auto out = s.handle(req.method, req.path, q, req.body);
    res.status = out.status;
    res.set_content(out.body, "application/json");
  });
  server.Post(R"(/.*)", [&](const httplib::Request& req, httplib::Response& res) {
    auto out = s.handle(req.method, req.path, {}, req.body);
    res.status = out.status;
    res.set_content(out.body, "application/json");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  httplib::Client client("127.0.0.1", port);
  auto created = client.Post("/cohorts", R"({"source":"anchors"})", "application/json");
  REQUIRE(created);
  CHECK(created->status == 201);
  const auto id = J::parse(created->body)["cohort_id"].get<std::string>();
  auto whatif = client.Get("/cohorts/" + id + "/whatif?cutoff=10");
  REQUIRE(whatif);
  CHECK(J::parse(whatif->body)["confusion"]["fn"] == 140);
  auto out_of_range = client.Get("/cohorts/" + id + "/whatif?cutoff=25");
  REQUIRE(out_of_range);
  CHECK(out_of_range->status == 400);

  server.stop();
  t.join();
}
