#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "irm/data_io.hpp"
#include "irm/geometry.hpp"
#include "irm/skyline.hpp"

namespace irm {

enum class DisplayMode { SimplexNeighbors, Random };
enum class FeedbackMode { FullSort, FavoriteOnly };

struct Strategy {
  DisplayMode display = DisplayMode::SimplexNeighbors;
  FeedbackMode feedback = FeedbackMode::FullSort;

  static constexpr Strategy sorting_simplex() { return {DisplayMode::SimplexNeighbors, FeedbackMode::FullSort}; }
  static constexpr Strategy sorting_random() { return {DisplayMode::Random, FeedbackMode::FullSort}; }
  static constexpr Strategy uh_simplex() { return {DisplayMode::SimplexNeighbors, FeedbackMode::FavoriteOnly}; }
  static constexpr Strategy uh_random() { return {DisplayMode::Random, FeedbackMode::FavoriteOnly}; }

  /// "sorting-simplex", "sorting-random", "uh-simplex", "uh-random".
  std::string name() const;
  static Strategy from_name(const std::string& name);

  friend bool operator==(const Strategy&, const Strategy&) = default;
};

enum class SessionStatus { AwaitingFeedback, Converged, Stopped };
const char* to_string(SessionStatus s) noexcept;

/// Best-first order of the shown points. tied_with_next[k] marks order[k] and
/// order[k+1] as equally good; may be empty.
struct SortResponse {
  std::vector<PointId> order;
  std::vector<bool> tied_with_next;
};

struct FavoriteResponse {
  PointId favorite = 0;
};

using Response = std::variant<SortResponse, FavoriteResponse>;

struct DisplayRecord {
  std::size_t round = 0;  // 1-based
  std::vector<PointId> shown;
  std::optional<Response> response;  // empty while awaiting feedback
  bool random_fallback = false;      // a simplex round that displayed random points
  std::size_t candidates_before = 0;
  std::size_t candidates_after = 0;
  double width_before = 0.0;
  double width_after = 0.0;
  double wall_time_ms = 0.0;  // feedback receipt to next display ready
};

struct SessionOptions {
  std::size_t s = 4;
  double epsilon = 0.0;
  std::uint64_t seed = 1;
  std::size_t max_rounds = 1000;
  std::size_t prune_cap = 500;         // above this |C|, prune against anchors plus a sample
  std::size_t prune_sample_pairs = 200;
  std::size_t cleanup_every = 5;       // redundant-halfspace removal period, in rounds
};

struct Recommendation {
  PointId point = 0;
  double regret_bound = 1.0;
};

struct PruneOptions {
  std::size_t full_pairwise_cap = 500;
  std::size_t sample_pairs = 200;
  std::vector<PointId> anchors;  // pruners always tried when the cap applies
  std::uint64_t seed = 0;
};

/// Removes every candidate q for which some other candidate p beats it on the
/// whole polytope (max over the polytope of f·(q-p) is negative). Removals are
/// collected in one pass and applied together; the result is never empty.
CandidateSet prune_candidates(std::span<const Point> dataset, const CandidateSet& candidates,
                              const UtilityPolytope& polytope, const PruneOptions& options = {});

/// Single-owner interaction state machine for one user.
class Session {
 public:
  /// Skyline candidates, the full simplex, the initial vertex as apex and the
  /// first display prepared. Throws InvalidArgument for n < 2, s < 2, s > 10,
  /// epsilon outside [0,1], or s larger than the skyline.
  static Session start(std::shared_ptr<const Dataset> dataset, Strategy strategy, SessionOptions options);

  /// Points awaiting feedback; empty once converged or stopped.
  const std::vector<PointId>& next_display() const;

  /// round is the 1-based round being answered; a mismatch raises StaleRound.
  void submit_sort(std::vector<PointId> order, std::vector<bool> tied_with_next = {},
                   std::optional<std::size_t> round = std::nullopt);
  void submit_favorite(PointId favorite, std::optional<std::size_t> round = std::nullopt);

  /// Ends the interaction early; the session becomes Stopped.
  void stop();

  /// Argmax over the candidates of the representative utility. Before any
  /// feedback this is the initial apex with bound 1.
  Recommendation recommend() const;

  SessionStatus status() const noexcept { return status_; }
  bool finished() const noexcept { return status_ != SessionStatus::AwaitingFeedback; }
  /// Rounds answered so far.
  std::size_t rounds_completed() const noexcept;
  /// 1-based number of the round awaiting feedback (rounds_completed()+1).
  std::size_t current_round() const noexcept { return rounds_completed() + 1; }
  const Strategy& strategy() const noexcept { return strategy_; }
  const SessionOptions& options() const noexcept { return options_; }
  const Dataset& dataset() const noexcept { return *dataset_; }
  std::shared_ptr<const Dataset> dataset_ptr() const noexcept { return dataset_; }
  const CandidateSet& candidates() const noexcept { return candidates_; }
  const UtilityPolytope& polytope() const noexcept { return polytope_; }
  double width() const noexcept { return width_; }
  PointId apex() const noexcept { return apex_; }
  PointId initial_apex() const noexcept { return initial_apex_; }
  const std::vector<DisplayRecord>& history() const noexcept { return history_; }
  const std::vector<std::string>& diagnostics() const noexcept { return diagnostics_; }
  std::size_t total_displayed() const noexcept;
  bool width_stop() const noexcept { return width_stop_; }
  /// Number of conical frame computations so far.
  std::size_t frame_computations() const noexcept { return frame_computations_; }

 private:
  Session() = default;

  void check_pending(std::optional<std::size_t> round) const;
  void apply_feedback(std::vector<PointId> sorted, std::vector<bool> strict_pair_flags, Response response);
  void prepare_display();
  std::vector<PointId> simplex_display(bool& fell_back);
  std::vector<PointId> random_display(std::size_t count);
  void refresh_representative();
  PointId best_candidate() const;
  bool all_candidates_compared() const;
  std::vector<Point> gather(std::span<const PointId> ids) const;

  std::shared_ptr<const Dataset> dataset_;
  Strategy strategy_;
  SessionOptions options_;
  CandidateSet candidates_;
  UtilityPolytope polytope_;
  double width_ = 1.0;
  bool width_stop_ = false;
  PointId apex_ = 0;
  PointId initial_apex_ = 0;
  UtilityVector representative_;
  std::optional<std::vector<PointId>> neighbor_cache_;
  bool cache_truncated_ = false;  // frame search stopped at the display limit
  std::size_t frame_computations_ = 0;
  std::vector<std::pair<PointId, PointId>> compared_;  // unordered pairs seen in feedback, sorted
  std::vector<DisplayRecord> history_;
  std::vector<PointId> empty_;
  SessionStatus status_ = SessionStatus::AwaitingFeedback;
  std::mt19937_64 rng_;
  std::vector<std::string> diagnostics_;
};

}  // namespace irm
