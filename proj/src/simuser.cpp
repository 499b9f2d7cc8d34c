#include "irm/simuser.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "irm/error.hpp"

namespace irm {

HiddenUser::HiddenUser(UtilityVector f_star, TieRule rule, std::uint64_t tie_seed)
    : f_star_(std::move(f_star)), rule_(rule), tie_seed_(tie_seed) {
  if (!f_star_.on_simplex(1e-9)) throw Error(ErrorCode::InvalidArgument, "hidden utility must lie on the simplex");
}

HiddenUser HiddenUser::sample(std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> w(dim);
  double sum = 0.0;
  for (double& x : w) {
    // Exp(1) via inversion keeps the draw portable across standard libraries.
    const double u = (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
    x = -std::log(u);
    sum += x;
  }
  for (double& x : w) x /= sum;
  return HiddenUser(UtilityVector{std::move(w)});
}

HiddenUser HiddenUser::from_original_weights(const Dataset& ds, std::vector<double> weights) {
  if (weights.size() != ds.dim) throw Error(ErrorCode::DimensionMismatch, "weight count differs from dataset dimension");
  // original = offset + scale * x, so weights·original = const + (weights ⊙ scale)·x.
  std::vector<double> original = weights;
  double sum = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (weights[k] < 0.0) throw Error(ErrorCode::InvalidArgument, "weights must be nonnegative");
    if (k < ds.scales.size()) weights[k] *= std::max(0.0, ds.scales[k]);
    sum += weights[k];
  }
  if (sum <= 0.0) throw Error(ErrorCode::InvalidArgument, "weights vanish on the normalized data");
  std::vector<double> normalized = weights;
  for (double& w : normalized) w /= sum;
  HiddenUser user(UtilityVector{std::move(normalized)});
  user.original_weights_ = std::move(original);
  user.offsets_ = ds.offsets;
  user.scales_ = ds.scales;
  return user;
}

std::vector<PointId> HiddenUser::sort_points(std::span<const Point> shown, std::vector<bool>* ties_out) const {
  std::vector<std::size_t> order(shown.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> u(shown.size());
  for (std::size_t i = 0; i < shown.size(); ++i) u[i] = utility(f_star_, shown[i]);
  std::vector<std::uint64_t> key(shown.size());
  if (rule_ == TieRule::Random) {
    std::mt19937_64 rng(tie_seed_);
    for (auto& k : key) k = rng();
  } else {
    for (std::size_t i = 0; i < shown.size(); ++i) key[i] = shown[i].id;
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (u[a] != u[b]) return u[a] > u[b];
    return key[a] < key[b];
  });
  std::vector<PointId> ids;
  ids.reserve(order.size());
  for (std::size_t i : order) ids.push_back(shown[i].id);
  if (ties_out) {
    ties_out->assign(order.empty() ? 0 : order.size() - 1, false);
    for (std::size_t k = 0; k + 1 < order.size(); ++k) (*ties_out)[k] = u[order[k]] == u[order[k + 1]];
  }
  return ids;
}

PointId HiddenUser::favorite(std::span<const Point> shown) const {
  if (shown.empty()) throw Error(ErrorCode::EmptyInput, "favorite of an empty display");
  return sort_points(shown).front();
}

double HiddenUser::reported_utility(const Point& p) const {
  if (original_weights_.empty()) return utility(f_star_, p);
  double u = 0.0;
  for (std::size_t k = 0; k < p.dim(); ++k) {
    const double scale = k < scales_.size() ? scales_[k] : 1.0;
    const double offset = k < offsets_.size() ? offsets_[k] : 0.0;
    u += original_weights_[k] * (offset + scale * p.coords[k]);
  }
  return u;
}

double HiddenUser::true_regret(std::span<const Point> dataset, const Point& point) const {
  if (original_weights_.empty()) return regret_ratio(dataset, std::span<const Point>(&point, 1), f_star_);
  if (dataset.empty()) throw Error(ErrorCode::EmptyInput, "regret against an empty dataset");
  double best = 0.0;
  for (const auto& p : dataset) best = std::max(best, reported_utility(p));
  if (best <= 0.0) throw Error(ErrorCode::ZeroUtility, "maximum utility over the dataset is zero");
  return std::clamp(1.0 - reported_utility(point) / best, 0.0, 1.0);
}

}  // namespace irm
