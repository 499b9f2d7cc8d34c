#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace irm {

using PointId = std::size_t;

/// A dataset tuple. Coordinates are nonnegative and, after normalization,
/// lie in [0,1]; larger is better in every dimension.
struct Point {
  PointId id = 0;
  std::vector<double> coords;
  std::string label;

  std::size_t dim() const noexcept { return coords.size(); }
};

/// Throws InvalidArgument unless coords are finite, nonnegative and d >= 2.
void validate_point(const Point& p);

/// Nonnegative linear weights; members of the utility space sum to 1.
struct UtilityVector {
  std::vector<double> weights;

  std::size_t dim() const noexcept { return weights.size(); }
  bool on_simplex(double tol = 1e-9) const;
};

/// Shift applied to strict preference constraints (f·n >= kStrictShift).
inline constexpr double kStrictShift = 1e-9;

/// Origin-through halfspace {f : normal·f >= 0} encoding "preferred beats rejected".
struct Halfspace {
  std::vector<double> normal;
  PointId preferred = 0;
  PointId rejected = 0;
  /// false for pairs the user reported as tied (closed, unshifted).
  bool strict = true;

  bool contains(std::span<const double> f, double tol = 0.0) const;
};

/// The utility space: the standard simplex intersected with preference halfspaces.
/// Value type; every shrinking operation returns a new polytope.
class UtilityPolytope {
 public:
  UtilityPolytope() = default;
  explicit UtilityPolytope(std::size_t dim);
  UtilityPolytope(std::size_t dim, std::vector<Halfspace> halfspaces);

  std::size_t dim() const noexcept { return dim_; }
  const std::vector<Halfspace>& halfspaces() const noexcept { return halfspaces_; }

  UtilityPolytope with(Halfspace h) const;
  UtilityPolytope with(std::span<const Halfspace> hs) const;

  /// Simplex membership plus every halfspace (strict ones shifted), within tol.
  bool contains(std::span<const double> f, double tol = 1e-9) const;

  /// argmax of objective·f over the polytope; nullopt when empty.
  std::optional<std::pair<UtilityVector, double>> maximize(std::span<const double> objective) const;

  /// Returns a copy without halfspaces implied by the others.
  UtilityPolytope without_redundant() const;

 private:
  std::size_t dim_ = 0;
  std::vector<Halfspace> halfspaces_;
};

/// f·p. Throws DimensionMismatch.
double utility(const UtilityVector& f, std::span<const double> p);
double utility(const UtilityVector& f, const Point& p);

/// 1 - max_{S} f / max_{D} f.
double regret_ratio(std::span<const Point> dataset, std::span<const Point> subset, const UtilityVector& f);

enum class RegretMethod { ExactLp, Sampled };

/// sup over the polytope of regret_ratio. ExactLp solves one fractional LP
/// per dataset point; Sampled evaluates n_samples points drawn from the polytope.
double max_regret_ratio(std::span<const Point> dataset, std::span<const Point> subset,
                        const UtilityPolytope& polytope, RegretMethod method = RegretMethod::ExactLp,
                        std::size_t n_samples = 2000, unsigned long long seed = 1);

/// normal = preferred - rejected. Throws DuplicatePoints when they coincide.
Halfspace preference_halfspace(const Point& preferred, const Point& rejected, bool strict = true);

/// One halfspace per ordered pair of a best-first list. tied_with_next[k]
/// marks sorted[k] and sorted[k+1] as equal; pairs spanning only ties are closed.
UtilityPolytope shrink_with_sort(const UtilityPolytope& polytope, std::span<const Point> sorted,
                                 const std::vector<bool>& tied_with_next = {});

/// favorite-over-each-other halfspaces.
UtilityPolytope shrink_with_choice(const UtilityPolytope& polytope, const Point& favorite,
                                   std::span<const Point> others);

bool is_empty(const UtilityPolytope& polytope);

/// Largest per-coordinate LP range over the polytope (bounding-box width).
double l1_width(const UtilityPolytope& polytope);

/// Renormalized average of the d per-coordinate maximizers.
UtilityVector centroid_utility(const UtilityPolytope& polytope);

}  // namespace irm
