#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <httplib.h>

#include "irm/error.hpp"
#include "irm/experiment.hpp"
#include "irm/service.hpp"
#include "irm/session_io.hpp"
#include "irm/simuser.hpp"

using namespace irm;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::shared_ptr<const Dataset> anti(std::size_t n, std::size_t d, std::uint64_t seed) {
  return std::make_shared<const Dataset>(build_dataset(DatasetSpec{DatasetKind::AntiCorrelated, n, d, seed}, "anti"));
}

Dataset cars() {
  std::vector<Point> raw;
  for (auto r : std::vector<std::vector<double>>{{0.4, 0.8}, {0.6, 0.5}, {0.3, 0.6}, {0.7, 0.4}, {0.9, 0.2}})
    raw.push_back(Point{raw.size(), r, "car" + std::to_string(raw.size() + 1)});
  // Normalizing would move the points; keep them as given.
  Dataset ds;
  ds.name = "cars";
  ds.dim = 2;
  ds.points = raw;
  ds.columns = {"x", "y"};
  ds.offsets = {0, 0};
  ds.scales = {1, 1};
  return ds;
}

Session played(std::shared_ptr<const Dataset> ds, Strategy st, std::uint64_t seed, std::size_t rounds = 1000) {
  auto s = Session::start(ds, st, SessionOptions{4, 0.0, seed});
  const auto u = HiddenUser::sample(ds->dim, seed + 1000);
  for (std::size_t k = 0; k < rounds && !s.finished(); ++k) {
    std::vector<Point> shown;
    for (PointId id : s.next_display()) shown.push_back(ds->points[id]);
    if (st.feedback == FeedbackMode::FullSort)
      s.submit_sort(u.sort_points(shown));
    else
      s.submit_favorite(u.favorite(shown));
  }
  return s;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Io;
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("irm_test_" + name + "_" + std::to_string(std::random_device{}()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("replay reproduces finished and partial sessions") {
  const auto ds = anti(1500, 4, 2);
  for (auto st : {Strategy::sorting_simplex(), Strategy::uh_random()}) {
    for (std::size_t rounds : {std::size_t{2}, std::size_t{1000}}) {
      const auto s = played(ds, st, 7, rounds);
      const json doc = session_document(s, true);
      const auto again = replay(doc);
      CHECK(session_document(again, true) == doc);
      CHECK(replay(doc, ds).recommend().point == s.recommend().point);
      // The text form parses back to the same document.
      CHECK(parse_session_text(doc.dump(2)) == doc);
    }
  }
}

TEST_CASE("replay rejects damaged records") {
  const auto ds = anti(1500, 4, 2);
  const auto s = played(ds, Strategy::sorting_random(), 3);
  REQUIRE(s.rounds_completed() >= 3);
  const json doc = session_document(s);

  json bad = doc;
  bad["engine_version"] = "irm-engine/0.9";
  CHECK(code_of([&] { replay(bad, ds); }) == ErrorCode::VersionMismatch);
  bad = doc;
  bad["schema_version"] = 99;
  CHECK(code_of([&] { replay(bad, ds); }) == ErrorCode::VersionMismatch);

  bad = doc;
  bad["rounds"][1]["shown"][0] = 99999;
  try {
    replay(bad, ds);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CorruptRecord);
    CHECK(std::string(e.what()).find("round 2") != std::string::npos);
  }
  bad = doc;
  bad["rounds"][2]["width_after"] = 0.5;
  CHECK(code_of([&] { replay(bad, ds); }) == ErrorCode::CorruptRecord);

  CHECK(code_of([&] { replay(doc, anti(1500, 4, 3)); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { replay(doc); }) == ErrorCode::InvalidArgument);

  // A file cut off in the middle of the third round.
  const std::string text = doc.dump(2);
  const auto third = text.find("\"round\": 3");
  REQUIRE(third != std::string::npos);
  try {
    parse_session_text(text.substr(0, third + 40));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CorruptRecord);
    CHECK(std::string(e.what()).find("round 3") != std::string::npos);
  }
}

TEST_CASE("session files round trip") {
  const auto dir = scratch("files");
  const auto ds = anti(800, 3, 5);
  const auto s = played(ds, Strategy::uh_simplex(), 11);
  const auto path = (dir / "s.json").string();
  write_session(s, path);
  CHECK(session_document(replay(read_session_file(path)), true) == session_document(s, true));
  CHECK(code_of([&] { read_session_file((dir / "missing.json").string()); }) == ErrorCode::Io);
  fs::remove_all(dir);
}

TEST_CASE("experiment on the car example") {
  auto ds = std::make_shared<const Dataset>(cars());
  ExperimentConfig cfg;
  cfg.s_values = {2};
  cfg.user_weights = std::vector<double>{0.7, 0.3};
  cfg.trials = 3;
  const auto recs = run_experiment(cfg, ds);
  REQUIRE(recs.size() == 12);
  for (const auto& r : recs) {
    CHECK(r.error.empty());
    CHECK(r.status == "converged");
    CHECK(r.recommendation == 4);
    CHECK(r.final_regret == doctest::Approx(0.0));
    CHECK(r.total_displayed == 2 * r.rounds);
    CHECK(r.candidate_sizes.size() == r.rounds);
  }
  // Ordered by (algorithm, s, epsilon, seed).
  CHECK(recs.front().algorithm == "sorting-random");
  CHECK(recs.front().seed == 1);
  CHECK(recs[1].seed == 2);

  std::ostringstream csv;
  write_csv(recs, csv);
  std::istringstream in(csv.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "algorithm,s,epsilon,seed,rounds,total_displayed,final_regret,recommendation,status,candidate_sizes,"
                "wall_time_ms,error");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == recs.size());
  CHECK(to_json(recs).size() == recs.size());
}

TEST_CASE("experiment on two points") {
  std::vector<Point> raw{{0, {1, 0}, ""}, {1, {0, 1}, ""}};
  auto ds = std::make_shared<const Dataset>(make_dataset("two", raw));
  ExperimentConfig cfg;
  cfg.s_values = {2};
  cfg.seeds = {4, 5};
  const auto recs = run_experiment(cfg, ds);
  REQUIRE(recs.size() == 8);
  for (const auto& r : recs) {
    CHECK(r.rounds == 1);
    CHECK(r.total_displayed == 2);
    CHECK(r.final_regret == doctest::Approx(0.0));
  }
}

TEST_CASE("experiment errors are recorded per trial") {
  auto ds = anti(300, 3, 1);
  ExperimentConfig cfg;
  cfg.s_values = {4, 12};
  cfg.algorithms = {Strategy::sorting_simplex()};
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg.s_values = {4};
  cfg.keep_documents = true;
  const auto recs = run_experiment(cfg, ds);
  REQUIRE(recs.size() == 1);
  CHECK(recs[0].document.contains("rounds"));
  cfg.user_weights = std::vector<double>{0.5, 0.6, 0.1};
  const auto bad = run_experiment(cfg, ds);
  CHECK(bad[0].status == "error");
  CHECK_FALSE(bad[0].error.empty());
}

TEST_CASE("service session lifecycle") {
  Service svc;
  svc.add_dataset(build_dataset(DatasetSpec{DatasetKind::AntiCorrelated, 800, 3, 4}), "anti");
  CHECK(svc.handle("GET", "/api/health").status == 200);
  CHECK(svc.handle("GET", "/api/datasets").body.size() == 1);
  CHECK(svc.handle("GET", "/api/datasets/nope").status == 404);
  CHECK(svc.handle("GET", "/api/nothing").status == 404);
  CHECK(svc.handle("POST", "/api/sessions", "{not json").status == 400);

  auto created = svc.handle("POST", "/api/sessions", R"({"dataset":"anti","algorithm":"sorting-simplex","s":3})");
  REQUIRE(created.status == 200);
  const std::string id = created.body["id"];
  CHECK(created.body["round"] == 1);
  auto disp = svc.handle("GET", "/api/sessions/" + id + "/display").body;
  REQUIRE(disp["points"].size() == 3);
  std::vector<PointId> shown;
  for (const auto& p : disp["points"]) shown.push_back(p["id"]);

  json bad{{"round", 1}, {"order", {shown[0], shown[1]}}};
  auto r = svc.handle("POST", "/api/sessions/" + id + "/sort", bad.dump());
  CHECK(r.status == 422);
  CHECK(r.body["code"] == "not_a_permutation");
  bad["order"] = {shown[0], shown[1], "x"};
  CHECK(svc.handle("POST", "/api/sessions/" + id + "/sort", bad.dump()).status == 422);
  json stale{{"round", 2}, {"order", shown}};
  CHECK(svc.handle("POST", "/api/sessions/" + id + "/sort", stale.dump()).status == 409);
  CHECK(svc.handle("POST", "/api/sessions/" + id + "/favorite", json{{"round", 1}, {"favorite", shown[0]}}.dump()).status ==
        400);
  json good{{"round", 1}, {"order", shown}};
  r = svc.handle("POST", "/api/sessions/" + id + "/sort", good.dump());
  REQUIRE(r.status == 200);
  CHECK(r.body["rounds_completed"] == 1);
  // Replaying the same answer is stale now.
  CHECK(svc.handle("POST", "/api/sessions/" + id + "/sort", good.dump()).status == 409);
  CHECK(svc.handle("POST", "/api/sessions/" + id, "{}").status == 404);

  auto doc = svc.handle("GET", "/api/sessions/" + id + "/document").body;
  CHECK(doc["rounds"].size() == 1);
  r = svc.handle("POST", "/api/sessions/" + id + "/stop");
  CHECK(r.body["status"] == "stopped");
  CHECK(r.body.contains("recommendation"));
  CHECK(svc.handle("GET", "/api/sessions").body.size() == 1);

  auto fav = svc.handle("POST", "/api/sessions", R"({"dataset":"anti","algorithm":"uh-random","s":3,"seed":9})");
  const std::string fid = fav.body["id"];
  r = svc.handle("POST", "/api/sessions/" + fid + "/favorite", json{{"round", 1}, {"favorite", 99999}}.dump());
  CHECK(r.status == 422);
  CHECK(r.body["code"] == "not_displayed");
}

TEST_CASE("service uploads and simulated users stay hidden") {
  Service svc;
  const std::string csv = "model,speed,price\nA,100,30000\nB,120,45000\nC,90,20000\nD,130,60000\nE,95,50000\n";
  auto up = svc.handle("POST", "/api/datasets",
                       json{{"name", "cars"}, {"content", csv}, {"label_columns", {"model"}}, {"invert", {"price"}}}.dump());
  REQUIRE(up.status == 201);
  CHECK(up.body["n"] == 5);
  CHECK(up.body["columns"] == json{"speed", "price"});
  CHECK(svc.handle("POST", "/api/datasets", json{{"name", "cars"}, {"content", csv}}.dump()).status == 400);
  auto gen = svc.handle("POST", "/api/datasets", R"({"name":"g","generate":{"kind":"indep","n":500,"d":3,"seed":2}})");
  CHECK(gen.status == 201);

  const std::string secret = "0.123456789";
  auto s = svc.handle("POST", "/api/sessions",
                      json{{"dataset", "g"},
                           {"algorithm", "uh-simplex"},
                           {"s", 3},
                           {"simulated_user", {{"weights", {0.123456789, 0.5, 0.376543211}}}}}
                          .dump());
  REQUIRE(s.status == 200);
  const std::string id = s.body["id"];
  auto done = svc.handle("POST", "/api/sessions/" + id + "/simulate", "{}");
  CHECK(done.body["status"] == "converged");
  for (const std::string path : {"/api/sessions/" + id, "/api/sessions/" + id + "/display",
                                 "/api/sessions/" + id + "/document", std::string("/api/sessions")}) {
    const std::string text = svc.handle("GET", path).body.dump();
    CHECK(text.find(secret) == std::string::npos);
    CHECK(text.find("weights") == std::string::npos);
  }
  CHECK(done.body.dump().find(secret) == std::string::npos);
}

TEST_CASE("service state survives a restart") {
  const auto dir = scratch("state");
  std::string id;
  json before;
  {
    Service svc(ServiceOptions{dir.string()});
    svc.add_dataset(build_dataset(DatasetSpec{DatasetKind::AntiCorrelated, 600, 3, 8}), "anti");
    auto s = svc.handle("POST", "/api/sessions",
                        R"({"dataset":"anti","algorithm":"sorting-random","s":4,"simulated_user":{"seed":3}})");
    id = s.body["id"];
    svc.handle("POST", "/api/sessions/" + id + "/simulate", R"({"rounds":2})");
    before = svc.handle("GET", "/api/sessions/" + id + "/document").body;
    CHECK(before["rounds"].size() == 2);
  }
  Service again(ServiceOptions{dir.string()});
  CHECK(again.dataset_count() == 1);
  CHECK(again.handle("GET", "/api/sessions/" + id + "/document").body == before);
  auto more = again.handle("POST", "/api/sessions/" + id + "/simulate", "{}");
  CHECK(more.status == 200);
  CHECK(more.body["rounds_completed"].get<std::size_t>() > 2);
  fs::remove_all(dir);
}

TEST_CASE("service over HTTP") {
  Service svc;
  svc.add_dataset(build_dataset(DatasetSpec{DatasetKind::AntiCorrelated, 400, 3, 1}), "anti");
  const int port = svc.start_background();
  REQUIRE(port > 0);
  httplib::Client cli("127.0.0.1", port);
  auto health = cli.Get("/api/health");
  REQUIRE(health);
  CHECK(health->status == 200);
  CHECK(health->get_header_value("Access-Control-Allow-Origin") == "*");
  auto created = cli.Post("/api/sessions", R"({"dataset":"anti","algorithm":"sorting-simplex","s":3})", "application/json");
  REQUIRE(created);
  CHECK(created->status == 200);
  const auto body = json::parse(created->body);
  const std::string id = body["id"];
  auto bad = cli.Post("/api/sessions/" + id + "/sort", R"({"round":1,"order":[1]})", "application/json");
  REQUIRE(bad);
  CHECK(bad->status == 422);
  auto missing = cli.Get("/api/sessions/ffff/display");
  REQUIRE(missing);
  CHECK(missing->status == 404);
  svc.stop();
}
