#include "irm/service.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "irm/engine.hpp"
#include "irm/error.hpp"
#include "irm/session_io.hpp"
#include "irm/simuser.hpp"

namespace irm {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotAPermutation:
    case ErrorCode::NotDisplayed: return 422;
    case ErrorCode::StaleRound: return 409;
    case ErrorCode::NotFound: return 404;
    case ErrorCode::Io:
    case ErrorCode::MalformedProgram: return 500;
    default: return 400;
  }
}

ApiResponse fail(int status, const std::string& msg, const std::string& code) {
  return {status, json{{"error", msg}, {"code", code}}};
}

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : path.substr(0, path.find('?'))) {
    if (c == '/') {
      if (!cur.empty()) parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) parts.push_back(cur);
  return parts;
}

bool valid_id(const std::string& id) {
  if (id.empty() || id.size() > 64) return false;
  for (char c : id)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')) return false;
  return id.front() != '.';
}

json point_json(const Dataset& ds, PointId id) {
  const Point& p = ds.points.at(id);
  return json{{"id", id}, {"label", p.label}, {"coords", p.coords}, {"values", ds.original(p)}};
}

void write_file(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw Error(ErrorCode::Io, "cannot write '" + tmp.string() + "'");
    out << text;
  }
  fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

struct Service::Impl {
  struct Entry {
    Entry(std::string id, std::string dataset_id, Session session, std::optional<HiddenUser> user, json user_config)
        : id(std::move(id)), dataset_id(std::move(dataset_id)), session(std::move(session)), user(std::move(user)),
          user_config(std::move(user_config)) {}

    std::mutex mu;
    std::string id;
    std::string dataset_id;
    Session session;
    std::optional<HiddenUser> user;
    json user_config;  // persisted, never sent
  };

  ServiceOptions options;
  mutable std::mutex mu;
  std::map<std::string, std::shared_ptr<const Dataset>> datasets;
  std::map<std::string, std::shared_ptr<Entry>> sessions;
  std::mt19937_64 id_rng{std::random_device{}()};
  httplib::Server server;
  std::thread worker;

  std::string new_session_id() {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(id_rng()));
    return buf;
  }

  std::shared_ptr<const Dataset> dataset(const std::string& id) const {
    std::lock_guard lock(mu);
    auto it = datasets.find(id);
    if (it == datasets.end()) throw Error(ErrorCode::NotFound, "unknown dataset '" + id + "'");
    return it->second;
  }

  std::shared_ptr<Entry> entry(const std::string& id) const {
    std::lock_guard lock(mu);
    auto it = sessions.find(id);
    if (it == sessions.end()) throw Error(ErrorCode::NotFound, "unknown session '" + id + "'");
    return it->second;
  }

  json dataset_summary(const std::string& id, const Dataset& ds) const {
    return json{{"id", id}, {"name", ds.name}, {"n", ds.size()}, {"d", ds.dim}, {"columns", ds.columns},
                {"dropped_rows", ds.dropped_rows}};
  }

  json recommendation_json(const Entry& e) const {
    const auto rec = e.session.recommend();
    return json{{"point", point_json(e.session.dataset(), rec.point)}, {"regret_bound", rec.regret_bound}};
  }

  json display_json(const Entry& e) const {
    const Session& s = e.session;
    json j{{"session", e.id},
           {"status", to_string(s.status())},
           {"feedback", s.strategy().feedback == FeedbackMode::FullSort ? "sort" : "favorite"},
           {"candidates", s.candidates().size()},
           {"width", s.width()},
           {"rounds_completed", s.rounds_completed()},
           {"total_displayed", s.total_displayed()}};
    if (s.finished()) {
      j["round"] = nullptr;
      j["points"] = json::array();
      j["recommendation"] = recommendation_json(e);
    } else {
      j["round"] = s.current_round();
      json pts = json::array();
      for (PointId id : s.next_display()) pts.push_back(point_json(s.dataset(), id));
      j["points"] = std::move(pts);
    }
    return j;
  }

  json state_json(const Entry& e) const {
    const Session& s = e.session;
    json hist = json::array();
    for (const auto& r : s.history()) {
      if (!r.response) continue;
      hist.push_back(json{{"round", r.round},
                          {"shown", r.shown},
                          {"response", response_to_json(*r.response)},
                          {"candidates_after", r.candidates_after},
                          {"width_after", r.width_after},
                          {"wall_time_ms", r.wall_time_ms}});
    }
    json j{{"id", e.id},
           {"dataset", e.dataset_id},
           {"algorithm", s.strategy().name()},
           {"s", s.options().s},
           {"epsilon", s.options().epsilon},
           {"seed", s.options().seed},
           {"simulated", e.user.has_value()},
           {"status", to_string(s.status())},
           {"round", s.finished() ? json(nullptr) : json(s.current_round())},
           {"rounds_completed", s.rounds_completed()},
           {"total_displayed", s.total_displayed()},
           {"candidates", s.candidates().size()},
           {"width", s.width()},
           {"history", std::move(hist)},
           {"display", display_json(e)}};
    j["recommendation"] = s.rounds_completed() > 0 || s.finished() ? recommendation_json(e) : json(nullptr);
    return j;
  }

  void persist_dataset(const std::string& id, const Dataset& ds) const {
    if (options.state_dir.empty()) return;
    const fs::path dir = fs::path(options.state_dir) / "datasets";
    fs::create_directories(dir);
    write_file(dir / (id + ".json"), to_json(ds).dump());
  }

  void persist_session(const Entry& e) const {
    if (options.state_dir.empty()) return;
    const fs::path dir = fs::path(options.state_dir) / "sessions";
    fs::create_directories(dir);
    json rec{{"dataset_id", e.dataset_id}, {"document", session_document(e.session)}, {"simulated_user", e.user_config}};
    write_file(dir / (e.id + ".json"), rec.dump());
  }

  static std::optional<HiddenUser> make_user(const json& cfg, const Dataset& ds) {
    if (cfg.is_null()) return std::nullopt;
    if (cfg.contains("original_weights"))
      return HiddenUser::from_original_weights(ds, cfg.at("original_weights").get<std::vector<double>>());
    if (cfg.contains("weights")) return HiddenUser(UtilityVector{cfg.at("weights").get<std::vector<double>>()});
    return HiddenUser::sample(ds.dim, cfg.value("seed", std::uint64_t{1}));
  }

  void load_state() {
    if (options.state_dir.empty()) return;
    const fs::path root(options.state_dir);
    fs::create_directories(root);
    if (fs::exists(root / "datasets"))
      for (const auto& f : fs::directory_iterator(root / "datasets")) {
        if (f.path().extension() != ".json") continue;
        datasets[f.path().stem().string()] =
            std::make_shared<const Dataset>(dataset_from_json(json::parse(read_file(f.path()))));
      }
    if (fs::exists(root / "sessions"))
      for (const auto& f : fs::directory_iterator(root / "sessions")) {
        if (f.path().extension() != ".json") continue;
        const json rec = json::parse(read_file(f.path()));
        auto ds = datasets.at(rec.at("dataset_id").get<std::string>());
        auto e = std::make_shared<Entry>(f.path().stem().string(), rec.at("dataset_id").get<std::string>(),
                                         replay(rec.at("document"), ds), std::nullopt,
                                         rec.value("simulated_user", json(nullptr)));
        e->user = make_user(e->user_config, *ds);
        sessions[e->id] = std::move(e);
      }
  }

  ApiResponse create_dataset(const json& req) {
    std::string name = req.value("name", std::string());
    Dataset ds;
    if (req.contains("generate")) {
      const auto& g = req.at("generate");
      DatasetSpec spec;
      spec.kind = dataset_kind_from_string(g.value("kind", std::string("anti")));
      if (spec.kind == DatasetKind::File) throw Error(ErrorCode::InvalidArgument, "generate needs a synthetic kind");
      spec.n = g.value("n", std::size_t{1000});
      spec.d = g.value("d", std::size_t{4});
      spec.seed = g.value("seed", std::uint64_t{1});
      ds = build_dataset(spec, name);
    } else if (req.contains("content")) {
      DatasetSpec spec;
      spec.kind = DatasetKind::File;
      spec.columns = req.value("columns", std::vector<std::string>{});
      spec.label_columns = req.value("label_columns", std::vector<std::string>{});
      spec.invert = req.value("invert", std::vector<std::string>{});
      ds = dataset_from_table(parse_delimited(req.at("content").get<std::string>(), spec), spec,
                              name.empty() ? "upload" : name);
    } else {
      throw Error(ErrorCode::InvalidArgument, "dataset upload needs 'content' or 'generate'");
    }
    std::string id = req.value("id", ds.name);
    if (!valid_id(id)) throw Error(ErrorCode::InvalidArgument, "dataset id '" + id + "' is not usable");
    {
      std::lock_guard lock(mu);
      if (datasets.count(id)) throw Error(ErrorCode::InvalidArgument, "dataset id '" + id + "' already exists");
    }
    auto ptr = std::make_shared<const Dataset>(std::move(ds));
    persist_dataset(id, *ptr);
    {
      std::lock_guard lock(mu);
      datasets[id] = ptr;
    }
    return {201, dataset_summary(id, *ptr)};
  }

  ApiResponse create_session(const json& req) {
    const std::string ds_id = req.at("dataset").get<std::string>();
    auto ds = dataset(ds_id);
    const Strategy strategy = Strategy::from_name(req.value("algorithm", std::string("sorting-simplex")));
    SessionOptions opt;
    opt.s = req.value("s", std::size_t{4});
    opt.epsilon = req.value("epsilon", 0.0);
    opt.seed = req.value("seed", std::uint64_t{1});
    opt.max_rounds = options.max_rounds;
    const json user_cfg = req.value("simulated_user", json(nullptr));
    auto user = make_user(user_cfg, *ds);
    std::string id;
    {
      std::lock_guard lock(mu);
      do id = new_session_id();
      while (sessions.count(id));
    }
    auto e = std::make_shared<Entry>(id, ds_id, Session::start(ds, strategy, opt), std::move(user), user_cfg);
    persist_session(*e);
    json body = state_json(*e);
    {
      std::lock_guard lock(mu);
      sessions[id] = e;
    }
    return {200, body};
  }

  ApiResponse feedback(Entry& e, const std::string& kind, const json& req) {
    if (!req.contains("round")) throw Error(ErrorCode::InvalidArgument, "feedback needs the round it answers");
    const std::size_t round = req.at("round").get<std::size_t>();
    if (kind == "sort") {
      if (!req.contains("order") || !req.at("order").is_array())
        throw Error(ErrorCode::NotAPermutation, "not a permutation of displayed points");
      std::vector<PointId> order;
      for (const auto& v : req.at("order")) {
        if (!v.is_number_unsigned()) throw Error(ErrorCode::NotAPermutation, "not a permutation of displayed points");
        order.push_back(v.get<PointId>());
      }
      e.session.submit_sort(std::move(order), req.value("ties", std::vector<bool>{}), round);
    } else {
      e.session.submit_favorite(req.at("favorite").get<PointId>(), round);
    }
    persist_session(e);
    return {200, display_json(e)};
  }

  ApiResponse simulate(Entry& e, const json& req) {
    if (!e.user) throw Error(ErrorCode::InvalidArgument, "session has no simulated user");
    std::size_t budget = req.value("rounds", std::numeric_limits<std::size_t>::max());
    const Dataset& ds = e.session.dataset();
    std::vector<Point> shown;
    while (!e.session.finished() && budget-- > 0) {
      shown.clear();
      for (PointId id : e.session.next_display()) shown.push_back(ds.points[id]);
      if (e.session.strategy().feedback == FeedbackMode::FullSort) {
        std::vector<bool> ties;
        auto order = e.user->sort_points(shown, &ties);
        e.session.submit_sort(std::move(order), std::move(ties));
      } else {
        e.session.submit_favorite(e.user->favorite(shown));
      }
    }
    persist_session(e);
    return {200, state_json(e)};
  }

  ApiResponse route(const std::string& method, const std::string& path, const std::string& body) {
    const auto parts = split_path(path);
    if (parts.empty() || parts[0] != "api") return fail(404, "no such endpoint", "not_found");
    json req = json::object();
    if (method == "POST" && !body.empty()) {
      req = json::parse(body);
      if (!req.is_object()) throw Error(ErrorCode::InvalidArgument, "request body must be a JSON object");
    }
    const std::size_t n = parts.size();
    if (n == 2 && parts[1] == "health" && method == "GET") return {200, json{{"ok", true}, {"engine", kEngineVersion}}};
    if (n >= 2 && parts[1] == "datasets") {
      if (n == 2 && method == "GET") {
        json list = json::array();
        std::lock_guard lock(mu);
        for (const auto& [id, ds] : datasets) list.push_back(dataset_summary(id, *ds));
        return {200, list};
      }
      if (n == 2 && method == "POST") return create_dataset(req);
      if (n == 3 && method == "GET") return {200, dataset_summary(parts[2], *dataset(parts[2]))};
    }
    if (n >= 2 && parts[1] == "sessions") {
      if (n == 2 && method == "GET") {
        json list = json::array();
        std::lock_guard lock(mu);
        for (const auto& [id, e] : sessions) list.push_back(id);
        return {200, list};
      }
      if (n == 2 && method == "POST") return create_session(req);
      if (n >= 3) {
        auto e = entry(parts[2]);
        std::lock_guard lock(e->mu);
        if (n == 3 && method == "GET") return {200, state_json(*e)};
        if (n != 4) return fail(404, "no such endpoint", "not_found");
        const std::string& op = parts[3];
        if (method == "GET" && op == "display") return {200, display_json(*e)};
        if (method == "GET" && op == "document") return {200, session_document(e->session)};
        if (method == "POST" && (op == "sort" || op == "favorite")) return feedback(*e, op, req);
        if (method == "POST" && op == "simulate") return simulate(*e, req);
        if (method == "POST" && op == "stop") {
          e->session.stop();
          persist_session(*e);
          return {200, display_json(*e)};
        }
      }
    }
    return fail(404, "no such endpoint", "not_found");
  }
};

Service::Service(ServiceOptions options) : impl_(std::make_unique<Impl>()) {
  impl_->options = std::move(options);
  impl_->load_state();
  impl_->server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    const ApiResponse r = handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  impl_->server.Get(R"(/api/.*)", handler);
  impl_->server.Post(R"(/api/.*)", handler);
  impl_->server.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
}

Service::~Service() { stop(); }

std::string Service::add_dataset(Dataset dataset, std::string id) {
  if (id.empty()) id = dataset.name;
  if (!valid_id(id)) throw Error(ErrorCode::InvalidArgument, "dataset id '" + id + "' is not usable");
  auto ptr = std::make_shared<const Dataset>(std::move(dataset));
  impl_->persist_dataset(id, *ptr);
  std::lock_guard lock(impl_->mu);
  impl_->datasets[id] = std::move(ptr);
  return id;
}

std::size_t Service::dataset_count() const {
  std::lock_guard lock(impl_->mu);
  return impl_->datasets.size();
}

ApiResponse Service::handle(const std::string& method, const std::string& path, const std::string& body) {
  try {
    return impl_->route(method, path, body);
  } catch (const Error& e) {
    return fail(status_for(e.code()), e.what(), to_string(e.code()));
  } catch (const json::exception& e) {
    return fail(400, std::string("bad request: ") + e.what(), "parse");
  } catch (const std::exception& e) {
    return fail(500, e.what(), "internal");
  }
}

void Service::listen(const std::string& host, int port) {
  if (!impl_->server.bind_to_port(host, port))
    throw Error(ErrorCode::Io, "cannot bind " + host + ":" + std::to_string(port));
  impl_->server.listen_after_bind();
}

int Service::start_background(const std::string& host) {
  const int port = impl_->server.bind_to_any_port(host);
  if (port < 0) throw Error(ErrorCode::Io, "cannot bind " + host);
  impl_->worker = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return port;
}

void Service::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->worker.joinable()) impl_->worker.join();
}

}  // namespace irm
