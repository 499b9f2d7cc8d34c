#include "irm/experiment.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

#include "irm/error.hpp"
#include "irm/session_io.hpp"
#include "irm/simuser.hpp"

namespace irm {
namespace {

template <class T>
std::string join(const std::vector<T>& v) {
  std::ostringstream os;
  os << std::setprecision(6);
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ";" : "") << v[i];
  return os.str();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::vector<std::uint64_t> ExperimentConfig::resolved_seeds() const {
  if (!seeds.empty()) return seeds;
  std::vector<std::uint64_t> out(trials);
  for (std::size_t i = 0; i < trials; ++i) out[i] = base_seed + i;
  return out;
}

void ExperimentConfig::validate() const {
  if (algorithms.empty()) throw Error(ErrorCode::InvalidArgument, "no algorithms selected");
  if (s_values.empty() || epsilons.empty()) throw Error(ErrorCode::InvalidArgument, "empty s or epsilon grid");
  if (seeds.empty() && trials < 1) throw Error(ErrorCode::InvalidArgument, "trials must be at least 1");
  for (std::size_t s : s_values)
    if (s < 2 || s > 10) throw Error(ErrorCode::InvalidArgument, "display size s must be between 2 and 10");
  for (double e : epsilons)
    if (!(e >= 0.0 && e <= 1.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must lie in [0, 1]");
  if (user_weights && user_original_weights)
    throw Error(ErrorCode::InvalidArgument, "give user weights in one space only");
}

TrialRecord run_trial(std::shared_ptr<const Dataset> dataset, Strategy strategy, std::size_t s, double epsilon,
                      std::uint64_t seed, const ExperimentConfig& config) {
  TrialRecord rec;
  rec.algorithm = strategy.name();
  rec.s = s;
  rec.epsilon = epsilon;
  rec.seed = seed;
  try {
    const HiddenUser user = config.user_original_weights
                                ? HiddenUser::from_original_weights(*dataset, *config.user_original_weights)
                            : config.user_weights ? HiddenUser(UtilityVector{*config.user_weights})
                                                  : HiddenUser::sample(dataset->dim, seed);
    SessionOptions opt;
    opt.s = s;
    opt.epsilon = epsilon;
    opt.seed = seed;
    opt.max_rounds = config.max_rounds;
    Session session = Session::start(dataset, strategy, opt);
    std::vector<Point> shown;
    while (!session.finished()) {
      shown.clear();
      for (PointId id : session.next_display()) shown.push_back(dataset->points[id]);
      if (strategy.feedback == FeedbackMode::FullSort) {
        std::vector<bool> ties;
        auto order = user.sort_points(shown, &ties);
        session.submit_sort(std::move(order), std::move(ties));
      } else {
        session.submit_favorite(user.favorite(shown));
      }
    }
    for (const auto& r : session.history()) {
      rec.candidate_sizes.push_back(r.candidates_after);
      rec.wall_time_ms.push_back(r.wall_time_ms);
    }
    rec.rounds = session.rounds_completed();
    rec.total_displayed = session.total_displayed();
    rec.recommendation = session.recommend().point;
    rec.final_regret = user.true_regret(dataset->points, dataset->points[rec.recommendation]);
    rec.status = to_string(session.status());
    if (config.keep_documents) rec.document = session_document(session);
  } catch (const Error& e) {
    rec.status = "error";
    rec.error = std::string(to_string(e.code())) + ": " + e.what();
  } catch (const std::exception& e) {
    rec.status = "error";
    rec.error = e.what();
  }
  return rec;
}

std::vector<TrialRecord> run_experiment(const ExperimentConfig& config, std::shared_ptr<const Dataset> dataset) {
  config.validate();
  if (!dataset) throw Error(ErrorCode::InvalidArgument, "experiment needs a dataset");
  auto algos = config.algorithms;
  std::sort(algos.begin(), algos.end(), [](const Strategy& a, const Strategy& b) { return a.name() < b.name(); });
  auto s_values = config.s_values;
  std::sort(s_values.begin(), s_values.end());
  auto eps = config.epsilons;
  std::sort(eps.begin(), eps.end());
  const auto seeds = config.resolved_seeds();

  std::vector<TrialRecord> out;
  for (const auto& a : algos)
    for (std::size_t s : s_values)
      for (double e : eps)
        for (std::uint64_t seed : seeds) out.push_back(run_trial(dataset, a, s, e, seed, config));
  return out;
}

void write_csv(const std::vector<TrialRecord>& records, std::ostream& out) {
  out << "algorithm,s,epsilon,seed,rounds,total_displayed,final_regret,recommendation,status,candidate_sizes,"
         "wall_time_ms,error\n";
  out << std::setprecision(10);
  for (const auto& r : records) {
    out << r.algorithm << ',' << r.s << ',' << r.epsilon << ',' << r.seed << ',' << r.rounds << ',' << r.total_displayed
        << ',' << r.final_regret << ',' << r.recommendation << ',' << r.status << ',' << join(r.candidate_sizes) << ','
        << join(r.wall_time_ms) << ',' << csv_field(r.error) << '\n';
  }
}

nlohmann::json to_json(const TrialRecord& r) {
  return nlohmann::json{{"algorithm", r.algorithm},
                        {"s", r.s},
                        {"epsilon", r.epsilon},
                        {"seed", r.seed},
                        {"rounds", r.rounds},
                        {"total_displayed", r.total_displayed},
                        {"final_regret", r.final_regret},
                        {"recommendation", r.recommendation},
                        {"status", r.status},
                        {"candidate_sizes", r.candidate_sizes},
                        {"wall_time_ms", r.wall_time_ms},
                        {"error", r.error}};
}

nlohmann::json to_json(const std::vector<TrialRecord>& records) {
  auto arr = nlohmann::json::array();
  for (const auto& r : records) arr.push_back(to_json(r));
  return arr;
}

}  // namespace irm
