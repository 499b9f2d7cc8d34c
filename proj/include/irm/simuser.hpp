#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "irm/data_io.hpp"
#include "irm/geometry.hpp"

namespace irm {

enum class TieRule { ByIndex, Random };

/// A truthful user answering from a hidden linear utility. The engine never
/// receives this object; harness code feeds its answers back as feedback.
class HiddenUser {
 public:
  explicit HiddenUser(UtilityVector f_star, TieRule rule = TieRule::ByIndex, std::uint64_t tie_seed = 0);

  /// Uniform Dirichlet(1,...,1) draw on the simplex.
  static HiddenUser sample(std::size_t dim, std::uint64_t seed);

  /// A user whose weights apply to the original (denormalized) attribute
  /// values; converted into the equivalent utility on normalized coordinates.
  static HiddenUser from_original_weights(const Dataset& ds, std::vector<double> weights);

  /// Point ids in descending utility. ties_out[k] reports whether positions
  /// k and k+1 have equal utility.
  std::vector<PointId> sort_points(std::span<const Point> shown, std::vector<bool>* ties_out = nullptr) const;
  PointId favorite(std::span<const Point> shown) const;
  double true_regret(std::span<const Point> dataset, const Point& point) const;

  /// Utility in the space the user was defined in: original attribute values
  /// for users built from original weights, normalized coordinates otherwise.
  double reported_utility(const Point& p) const;
  const UtilityVector& hidden_utility() const noexcept { return f_star_; }

 private:
  UtilityVector f_star_;
  TieRule rule_;
  std::uint64_t tie_seed_;
  std::vector<double> original_weights_;
  std::vector<double> offsets_, scales_;
};

}  // namespace irm
