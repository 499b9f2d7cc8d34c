#include "irm/engine.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <set>

#include "irm/error.hpp"
#include "irm/hull.hpp"

namespace irm {
namespace {

// Pairs closer than this over the whole polytope are never pruned. It sits
// below the strict-preference shift so that a strict answer always separates.
constexpr double kPruneMargin = kStrictShift / 2.0;

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

std::pair<PointId, PointId> unordered(PointId a, PointId b) { return a < b ? std::pair{a, b} : std::pair{b, a}; }

// Decides "p beats q everywhere on the polytope" with a cache of utility
// vectors known to lie in the polytope. Any such vector with f·q >= f·p is a
// certificate that the pair cannot be pruned, so most pairs never reach the LP.
class PairTester {
 public:
  PairTester(const UtilityPolytope& poly, std::vector<double> seed_witness) : poly_(poly) {
    witnesses_.push_back(std::move(seed_witness));
  }

  bool beaten(const Point& q, const Point& p) {
    const std::size_t d = q.dim();
    diff_.resize(d);
    for (std::size_t i = 0; i < d; ++i) diff_[i] = q.coords[i] - p.coords[i];
    for (std::size_t k = 0; k < witnesses_.size(); ++k) {
      if (dot(witnesses_[k], diff_) >= -kPruneMargin) {
        if (k > 0) std::swap(witnesses_[k], witnesses_[k / 2]);
        return false;
      }
    }
    auto best = poly_.maximize(diff_);
    if (!best) return false;
    if (best->second < -kPruneMargin) return true;
    witnesses_.push_back(std::move(best->first.weights));
    return false;
  }

 private:
  const UtilityPolytope& poly_;
  std::vector<std::vector<double>> witnesses_;
  std::vector<double> diff_;
};

}  // namespace

std::string Strategy::name() const {
  const char* fb = feedback == FeedbackMode::FullSort ? "sorting" : "uh";
  const char* disp = display == DisplayMode::SimplexNeighbors ? "simplex" : "random";
  return std::string(fb) + "-" + disp;
}

Strategy Strategy::from_name(const std::string& name) {
  std::string n;
  for (char c : name)
    if (c != '-' && c != '_') n.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (n == "sortingsimplex") return sorting_simplex();
  if (n == "sortingrandom") return sorting_random();
  if (n == "uhsimplex") return uh_simplex();
  if (n == "uhrandom") return uh_random();
  throw Error(ErrorCode::InvalidArgument, "unknown algorithm '" + name + "'");
}

const char* to_string(SessionStatus s) noexcept {
  switch (s) {
    case SessionStatus::AwaitingFeedback: return "awaiting_feedback";
    case SessionStatus::Converged: return "converged";
    case SessionStatus::Stopped: return "stopped";
  }
  return "unknown";
}

CandidateSet prune_candidates(std::span<const Point> dataset, const CandidateSet& candidates,
                              const UtilityPolytope& polytope, const PruneOptions& options) {
  if (candidates.size() <= 1) return candidates;
  const UtilityVector rep = centroid_utility(polytope);
  const std::size_t n = candidates.size();
  std::vector<double> val(n);
  for (std::size_t i = 0; i < n; ++i) val[i] = utility(rep, dataset[candidates.ids[i]]);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return val[a] > val[b]; });

  // rep itself is a witness, so only pruners with a larger representative
  // utility need testing.
  PairTester tester(polytope, rep.weights);
  std::vector<bool> removed(n, false);
  auto point = [&](std::size_t i) -> const Point& { return dataset[candidates.ids[i]]; };

  if (n <= options.full_pairwise_cap) {
    for (std::size_t qi = 0; qi < n; ++qi) {
      for (std::size_t p : order) {
        if (val[p] <= val[qi] + kPruneMargin) break;
        if (tester.beaten(point(qi), point(p))) {
          removed[qi] = true;
          break;
        }
      }
    }
  } else {
    std::vector<std::size_t> anchors;
    for (PointId a : options.anchors) {
      auto it = std::lower_bound(candidates.ids.begin(), candidates.ids.end(), a);
      if (it != candidates.ids.end() && *it == a) anchors.push_back(static_cast<std::size_t>(it - candidates.ids.begin()));
    }
    for (std::size_t qi = 0; qi < n; ++qi) {
      for (std::size_t p : anchors) {
        if (p == qi || val[p] <= val[qi] + kPruneMargin) continue;
        if (tester.beaten(point(qi), point(p))) {
          removed[qi] = true;
          break;
        }
      }
    }
    std::mt19937_64 rng(options.seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t k = 0; k < options.sample_pairs; ++k) {
      const std::size_t qi = pick(rng);
      const std::size_t p = pick(rng);
      if (qi == p || removed[qi] || val[p] <= val[qi] + kPruneMargin) continue;
      if (tester.beaten(point(qi), point(p))) removed[qi] = true;
    }
  }

  CandidateSet out;
  out.generation = candidates.generation;
  for (std::size_t i = 0; i < n; ++i)
    if (!removed[i]) out.ids.push_back(candidates.ids[i]);
  if (out.ids.empty()) out.ids.push_back(candidates.ids[order.front()]);
  return out;
}

Session Session::start(std::shared_ptr<const Dataset> dataset, Strategy strategy, SessionOptions options) {
  if (!dataset) throw Error(ErrorCode::InvalidArgument, "session needs a dataset");
  if (dataset->size() < 2) throw Error(ErrorCode::InvalidArgument, "dataset too small: need at least 2 points");
  if (options.s < 2 || options.s > 10) throw Error(ErrorCode::InvalidArgument, "display size s must be between 2 and 10");
  if (!(options.epsilon >= 0.0 && options.epsilon <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "epsilon must lie in [0, 1]");
  if (options.max_rounds == 0) throw Error(ErrorCode::InvalidArgument, "max_rounds must be positive");

  Session s;
  s.dataset_ = std::move(dataset);
  s.strategy_ = strategy;
  s.options_ = options;
  s.rng_.seed(options.seed);
  s.candidates_ = compute_skyline(s.dataset_->points);
  if (options.s > s.candidates_.size())
    throw Error(ErrorCode::InvalidArgument, "display size s = " + std::to_string(options.s) +
                                                " exceeds the skyline size " + std::to_string(s.candidates_.size()));
  s.polytope_ = UtilityPolytope(s.dataset_->dim);
  s.width_ = l1_width(s.polytope_);
  s.refresh_representative();
  s.apex_ = s.initial_apex_ = initial_vertex(s.dataset_->points, s.candidates_);
  s.prepare_display();
  return s;
}

const std::vector<PointId>& Session::next_display() const {
  if (status_ != SessionStatus::AwaitingFeedback || history_.empty()) return empty_;
  return history_.back().shown;
}

std::size_t Session::rounds_completed() const noexcept {
  if (history_.empty()) return 0;
  return history_.back().response ? history_.size() : history_.size() - 1;
}

std::size_t Session::total_displayed() const noexcept {
  std::size_t total = 0;
  for (const auto& r : history_)
    if (r.response) total += r.shown.size();
  return total;
}

void Session::check_pending(std::optional<std::size_t> round) const {
  if (status_ != SessionStatus::AwaitingFeedback)
    throw Error(ErrorCode::StaleRound, "session is not awaiting feedback (status " + std::string(to_string(status_)) + ")");
  if (round && *round != current_round())
    throw Error(ErrorCode::StaleRound, "feedback for round " + std::to_string(*round) + " but round " +
                                           std::to_string(current_round()) + " is displayed");
}

void Session::submit_sort(std::vector<PointId> order, std::vector<bool> tied_with_next,
                          std::optional<std::size_t> round) {
  check_pending(round);
  if (strategy_.feedback != FeedbackMode::FullSort)
    throw Error(ErrorCode::WrongFeedbackMode, "this session takes a favorite, not a sorted list");
  const auto& shown = history_.back().shown;
  auto a = order, b = shown;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (a != b) throw Error(ErrorCode::NotAPermutation, "not a permutation of displayed points");
  if (!tied_with_next.empty() && tied_with_next.size() + 1 != order.size() && tied_with_next.size() != order.size())
    throw Error(ErrorCode::InvalidArgument, "tie flags do not match the sorted list");
  tied_with_next.resize(tied_with_next.empty() ? 0 : order.size() - 1);
  SortResponse resp{order, tied_with_next};
  apply_feedback(std::move(order), std::move(tied_with_next), std::move(resp));
}

void Session::submit_favorite(PointId favorite, std::optional<std::size_t> round) {
  check_pending(round);
  if (strategy_.feedback != FeedbackMode::FavoriteOnly)
    throw Error(ErrorCode::WrongFeedbackMode, "this session takes a sorted list, not a favorite");
  const auto& shown = history_.back().shown;
  if (std::find(shown.begin(), shown.end(), favorite) == shown.end())
    throw Error(ErrorCode::NotDisplayed, "favorite " + std::to_string(favorite) + " was not displayed");
  std::vector<PointId> order{favorite};
  for (PointId id : shown)
    if (id != favorite) order.push_back(id);
  apply_feedback(std::move(order), {}, FavoriteResponse{favorite});
}

void Session::stop() {
  if (status_ != SessionStatus::AwaitingFeedback) return;
  if (!history_.empty() && !history_.back().response) history_.pop_back();
  status_ = SessionStatus::Stopped;
}

void Session::apply_feedback(std::vector<PointId> sorted, std::vector<bool> ties, Response response) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t idx = history_.size() - 1;
  DisplayRecord& rec = history_[idx];
  const auto pts = gather(sorted);

  UtilityPolytope next = strategy_.feedback == FeedbackMode::FullSort
                             ? shrink_with_sort(polytope_, pts, ties)
                             : shrink_with_choice(polytope_, pts.front(), std::span(pts).subspan(1));
  rec.response = std::move(response);
  for (std::size_t i = 0; i < sorted.size(); ++i)
    for (std::size_t j = i + 1; j < sorted.size(); ++j)
      if (strategy_.feedback == FeedbackMode::FullSort || i == 0) compared_.push_back(unordered(sorted[i], sorted[j]));
  std::sort(compared_.begin(), compared_.end());
  compared_.erase(std::unique(compared_.begin(), compared_.end()), compared_.end());

  if (is_empty(next)) {
    diagnostics_.push_back("round " + std::to_string(rec.round) + ": feedback contradicts earlier answers; session stopped");
    rec.candidates_after = candidates_.size();
    rec.width_after = width_;
    status_ = SessionStatus::Stopped;
    rec.wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return;
  }

  if (sorted.front() != apex_) {
    apex_ = sorted.front();
    neighbor_cache_.reset();
  }
  polytope_ = std::move(next);
  if (options_.cleanup_every > 0 && rec.round % options_.cleanup_every == 0) polytope_ = polytope_.without_redundant();

  PruneOptions popt;
  popt.full_pairwise_cap = options_.prune_cap;
  popt.sample_pairs = options_.prune_sample_pairs;
  popt.anchors = rec.shown;
  popt.seed = rng_();
  candidates_ = prune_candidates(dataset_->points, candidates_, polytope_, popt);
  candidates_.generation = rec.round;
  width_ = l1_width(polytope_);
  refresh_representative();
  rec.candidates_after = candidates_.size();
  rec.width_after = width_;

  if (candidates_.size() == 1) {
    status_ = SessionStatus::Converged;
  } else if (width_ <= options_.epsilon / (2.0 * static_cast<double>(dataset_->dim))) {
    width_stop_ = true;
    status_ = SessionStatus::Converged;
  } else if (all_candidates_compared()) {
    diagnostics_.push_back("round " + std::to_string(rec.round) + ": remaining candidates were reported as tied");
    status_ = SessionStatus::Converged;
  } else if (rec.round >= options_.max_rounds) {
    diagnostics_.push_back("round limit reached");
    status_ = SessionStatus::Stopped;
  } else {
    prepare_display();
  }
  history_[idx].wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

void Session::prepare_display() {
  std::vector<PointId> shown;
  bool fell_back = false;
  if (!candidates_.contains(apex_)) {
    apex_ = best_candidate();
    neighbor_cache_.reset();
  }
  if (candidates_.size() <= options_.s) {
    shown.push_back(apex_);
    std::vector<PointId> rest;
    for (PointId id : candidates_.ids)
      if (id != apex_) rest.push_back(id);
    std::stable_sort(rest.begin(), rest.end(), [&](PointId a, PointId b) {
      return utility(representative_, dataset_->points[a]) > utility(representative_, dataset_->points[b]);
    });
    shown.insert(shown.end(), rest.begin(), rest.end());
  } else if (strategy_.display == DisplayMode::Random) {
    shown = random_display(options_.s);
  } else {
    shown = simplex_display(fell_back);
    if (!fell_back && rounds_completed() > 0) {
      auto a = shown, b = history_.back().shown;
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      if (a == b) {
        shown = random_display(options_.s);
        fell_back = true;
        diagnostics_.push_back("round " + std::to_string(history_.size() + 1) + ": repeated display replaced by random points");
      }
    }
  }
  if (shown.size() <= 1) {
    status_ = SessionStatus::Converged;
    return;
  }
  DisplayRecord rec;
  rec.round = history_.size() + 1;
  rec.shown = std::move(shown);
  rec.random_fallback = fell_back;
  rec.candidates_before = candidates_.size();
  rec.width_before = width_;
  history_.push_back(std::move(rec));
}

std::vector<PointId> Session::simplex_display(bool& fell_back) {
  const std::size_t want = options_.s - 1;
  auto by_rep = [&](PointId a, PointId b) {
    const double ua = utility(representative_, dataset_->points[a]);
    const double ub = utility(representative_, dataset_->points[b]);
    return ua > ub || (ua == ub && a < b);
  };
  auto usable = [&]() {
    std::vector<PointId> nb;
    if (neighbor_cache_)
      for (PointId id : *neighbor_cache_)
        if (id != apex_ && candidates_.contains(id)) nb.push_back(id);
    return nb;
  };

  std::vector<PointId> nb = usable();
  const bool stale = !neighbor_cache_ || nb.empty() || (nb.size() < want && cache_truncated_);
  if (stale) {
    for (int attempt = 0; attempt < 2; ++attempt) {
      std::vector<Point> others;
      others.reserve(candidates_.size());
      for (PointId id : candidates_.ids)
        if (id != apex_) others.push_back(dataset_->points[id]);
      std::vector<std::size_t> priority(others.size());
      std::iota(priority.begin(), priority.end(), 0);
      std::stable_sort(priority.begin(), priority.end(),
                       [&](std::size_t a, std::size_t b) { return by_rep(others[a].id, others[b].id); });
      ++frame_computations_;
      const ConeFrame frame = conical_frame(dataset_->points[apex_], others, priority, want);
      if (!frame.degenerate) {
        neighbor_cache_ = frame.frame_members;
        cache_truncated_ = frame.frame_members.size() >= want;
        break;
      }
      // The apex is not a vertex of the candidates' hull (possible after a
      // random round); restart from the representative argmax.
      const PointId best = best_candidate();
      if (attempt == 0 && best != apex_) {
        diagnostics_.push_back("round " + std::to_string(history_.size() + 1) + ": apex " + std::to_string(apex_) +
                               " is not a hull vertex; restarting from " + std::to_string(best));
        apex_ = best;
        continue;
      }
      neighbor_cache_.reset();
      break;
    }
    nb = usable();
  }
  if (nb.empty()) {
    fell_back = true;
    diagnostics_.push_back("round " + std::to_string(history_.size() + 1) + ": no usable neighbours; random display");
    return random_display(options_.s);
  }
  std::stable_sort(nb.begin(), nb.end(), by_rep);
  if (nb.size() > want) nb.resize(want);
  std::vector<PointId> shown{apex_};
  shown.insert(shown.end(), nb.begin(), nb.end());
  return shown;
}

std::vector<PointId> Session::random_display(std::size_t count) {
  std::vector<PointId> pool = candidates_.ids;
  count = std::min(count, pool.size());
  for (std::size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
    std::swap(pool[i], pool[pick(rng_)]);
  }
  pool.resize(count);
  return pool;
}

void Session::refresh_representative() { representative_ = centroid_utility(polytope_); }

PointId Session::best_candidate() const {
  PointId best = candidates_.ids.front();
  double best_val = -1.0;
  for (PointId id : candidates_.ids) {
    const double v = utility(representative_, dataset_->points[id]);
    if (v > best_val) {
      best = id;
      best_val = v;
    }
  }
  return best;
}

bool Session::all_candidates_compared() const {
  if (candidates_.size() > options_.s) return false;
  for (std::size_t i = 0; i < candidates_.size(); ++i)
    for (std::size_t j = i + 1; j < candidates_.size(); ++j)
      if (!std::binary_search(compared_.begin(), compared_.end(), unordered(candidates_.ids[i], candidates_.ids[j])))
        return false;
  return true;
}

Recommendation Session::recommend() const {
  if (rounds_completed() == 0) return {initial_apex_, 1.0};
  Recommendation r;
  r.point = best_candidate();
  if (candidates_.size() == 1) {
    r.regret_bound = 0.0;
  } else if (width_stop_) {
    r.regret_bound = options_.epsilon;
  } else {
    const auto cand = gather(candidates_.ids);
    const Point& chosen = dataset_->points[r.point];
    r.regret_bound = max_regret_ratio(cand, std::span(&chosen, 1), polytope_);
  }
  return r;
}

std::vector<Point> Session::gather(std::span<const PointId> ids) const {
  std::vector<Point> out;
  out.reserve(ids.size());
  for (PointId id : ids) out.push_back(dataset_->points.at(id));
  return out;
}

}  // namespace irm
