#include "irm/session_io.hpp"

#include <bit>
#include <cstdio>
#include <fstream>
#include <regex>
#include <sstream>

#include "irm/error.hpp"

namespace irm {
namespace {

using nlohmann::json;

void fnv(std::uint64_t& h, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xffu;
    h *= 0x100000001b3ull;
  }
}

json options_json(const SessionOptions& o) {
  return json{{"max_rounds", o.max_rounds},
              {"prune_cap", o.prune_cap},
              {"prune_sample_pairs", o.prune_sample_pairs},
              {"cleanup_every", o.cleanup_every}};
}

[[noreturn]] void corrupt(std::size_t round, const std::string& what) {
  throw Error(ErrorCode::CorruptRecord, "corrupted session record at round " + std::to_string(round) + ": " + what);
}

}  // namespace

std::string dataset_fingerprint(const Dataset& ds) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  fnv(h, ds.points.size());
  fnv(h, ds.dim);
  for (const auto& p : ds.points)
    for (double x : p.coords) fnv(h, std::bit_cast<std::uint64_t>(x));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json response_to_json(const Response& r) {
  if (const auto* s = std::get_if<SortResponse>(&r)) {
    json j{{"order", s->order}};
    if (!s->tied_with_next.empty()) j["ties"] = s->tied_with_next;
    return j;
  }
  return json{{"favorite", std::get<FavoriteResponse>(r).favorite}};
}

Response response_from_json(const json& j) {
  if (j.contains("order")) return SortResponse{j.at("order").get<std::vector<PointId>>(), j.value("ties", std::vector<bool>{})};
  if (j.contains("favorite")) return FavoriteResponse{j.at("favorite").get<PointId>()};
  throw Error(ErrorCode::Parse, "response needs 'order' or 'favorite'");
}

json session_document(const Session& session, bool embed_dataset) {
  const Dataset& ds = session.dataset();
  json doc;
  doc["schema_version"] = kSessionSchemaVersion;
  doc["engine_version"] = kEngineVersion;
  doc["dataset"] = json{{"id", ds.name}, {"n", ds.size()}, {"d", ds.dim}, {"fingerprint", dataset_fingerprint(ds)}};
  doc["strategy"] = session.strategy().name();
  doc["s"] = session.options().s;
  doc["epsilon"] = session.options().epsilon;
  doc["seed"] = session.options().seed;
  doc["options"] = options_json(session.options());
  json rounds = json::array();
  json pending = nullptr;
  for (const auto& r : session.history()) {
    if (!r.response) {
      pending = json{{"round", r.round}, {"shown", r.shown}, {"random_fallback", r.random_fallback}};
      continue;
    }
    rounds.push_back(json{{"round", r.round},
                          {"shown", r.shown},
                          {"response", response_to_json(*r.response)},
                          {"random_fallback", r.random_fallback},
                          {"candidates_before", r.candidates_before},
                          {"candidates_after", r.candidates_after},
                          {"width_before", r.width_before},
                          {"width_after", r.width_after}});
  }
  doc["rounds"] = std::move(rounds);
  doc["pending"] = std::move(pending);
  doc["status"] = to_string(session.status());
  doc["apex"] = session.apex();
  doc["candidates"] = session.candidates().ids;
  doc["width"] = session.width();
  if (session.finished() || session.rounds_completed() > 0) {
    const auto rec = session.recommend();
    doc["recommendation"] = json{{"point", rec.point}, {"regret_bound", rec.regret_bound}};
  } else {
    doc["recommendation"] = nullptr;
  }
  if (embed_dataset) doc["dataset_document"] = to_json(ds);
  return doc;
}

Session replay(const json& doc, std::shared_ptr<const Dataset> dataset) {
  if (!doc.is_object()) throw Error(ErrorCode::CorruptRecord, "corrupted session record: not an object");
  if (doc.value("schema_version", -1) != kSessionSchemaVersion)
    throw Error(ErrorCode::VersionMismatch, "session schema version " + doc.value("schema_version", json(nullptr)).dump() +
                                                " is not supported (expected " + std::to_string(kSessionSchemaVersion) + ")");
  if (doc.value("engine_version", std::string()) != kEngineVersion)
    throw Error(ErrorCode::VersionMismatch, "session was recorded by engine '" + doc.value("engine_version", std::string()) +
                                                "', this is '" + kEngineVersion + "'");
  if (!dataset) throw Error(ErrorCode::InvalidArgument, "replay needs a dataset");

  Strategy strategy;
  SessionOptions opt;
  json rounds;
  try {
    const auto& dref = doc.at("dataset");
    if (dref.at("fingerprint").get<std::string>() != dataset_fingerprint(*dataset))
      throw Error(ErrorCode::InvalidArgument, "session was recorded on a different dataset than '" + dataset->name + "'");
    strategy = Strategy::from_name(doc.at("strategy").get<std::string>());
    opt.s = doc.at("s").get<std::size_t>();
    opt.epsilon = doc.at("epsilon").get<double>();
    opt.seed = doc.at("seed").get<std::uint64_t>();
    const auto& o = doc.at("options");
    opt.max_rounds = o.at("max_rounds").get<std::size_t>();
    opt.prune_cap = o.at("prune_cap").get<std::size_t>();
    opt.prune_sample_pairs = o.at("prune_sample_pairs").get<std::size_t>();
    opt.cleanup_every = o.at("cleanup_every").get<std::size_t>();
    rounds = doc.at("rounds");
    if (!rounds.is_array()) throw Error(ErrorCode::CorruptRecord, "rounds is not a list");
  } catch (const json::exception& e) {
    throw Error(ErrorCode::CorruptRecord, std::string("corrupted session record header: ") + e.what());
  }

  Session session = Session::start(std::move(dataset), strategy, opt);
  for (std::size_t k = 0; k < rounds.size(); ++k) {
    const std::size_t round = k + 1;
    const auto& r = rounds[k];
    std::vector<PointId> shown;
    Response resp;
    std::size_t cand_after = 0;
    double width_after = 0.0;
    try {
      if (r.at("round").get<std::size_t>() != round) corrupt(round, "rounds out of sequence");
      shown = r.at("shown").get<std::vector<PointId>>();
      resp = response_from_json(r.at("response"));
      cand_after = r.at("candidates_after").get<std::size_t>();
      width_after = r.at("width_after").get<double>();
    } catch (const json::exception& e) {
      corrupt(round, e.what());
    } catch (const Error& e) {
      corrupt(round, e.what());
    }
    if (session.finished()) corrupt(round, "the session had already ended");
    if (session.next_display() != shown) corrupt(round, "recorded display differs from the recomputed one");
    try {
      if (const auto* s = std::get_if<SortResponse>(&resp))
        session.submit_sort(s->order, s->tied_with_next, round);
      else
        session.submit_favorite(std::get<FavoriteResponse>(resp).favorite, round);
    } catch (const Error& e) {
      corrupt(round, std::string("recorded feedback rejected: ") + e.what());
    }
    const auto& last = session.history()[k];
    if (last.candidates_after != cand_after || last.width_after != width_after)
      corrupt(round, "recomputed candidates or width differ from the record");
  }

  const std::string status = doc.value("status", std::string());
  if (status == to_string(SessionStatus::Stopped) && !session.finished()) session.stop();
  if (status != to_string(session.status()))
    corrupt(rounds.size(), "final status '" + std::string(to_string(session.status())) + "' differs from the recorded '" +
                               status + "'");
  const auto& pending = doc.value("pending", json(nullptr));
  if (!pending.is_null() && pending.value("shown", std::vector<PointId>{}) != session.next_display())
    corrupt(rounds.size() + 1, "pending display differs from the recomputed one");
  const auto& rec = doc.value("recommendation", json(nullptr));
  if (!rec.is_null() && rec.value("point", PointId(-1)) != session.recommend().point)
    corrupt(rounds.size(), "recommendation differs from the record");
  return session;
}

Session replay(const json& doc) {
  if (!doc.contains("dataset_document"))
    throw Error(ErrorCode::InvalidArgument, "session document does not embed its dataset; supply one");
  return replay(doc, std::make_shared<const Dataset>(dataset_from_json(doc.at("dataset_document"))));
}

json parse_session_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    static const std::regex round_re("\"round\"\\s*:\\s*(\\d+)");
    std::string last;
    const std::string head = text.substr(0, upto);
    for (auto it = std::sregex_iterator(head.begin(), head.end(), round_re); it != std::sregex_iterator(); ++it)
      last = (*it)[1].str();
    if (last.empty()) throw Error(ErrorCode::CorruptRecord, "corrupted session record: damaged before the first round");
    throw Error(ErrorCode::CorruptRecord, "corrupted session record at round " + last + ": " + e.what());
  }
}

void write_session(const Session& session, const std::string& path, bool embed_dataset) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
  out << session_document(session, embed_dataset).dump(2) << '\n';
  if (!out) throw Error(ErrorCode::Io, "failed writing '" + path + "'");
}

json read_session_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_session_text(ss.str());
}

}  // namespace irm
