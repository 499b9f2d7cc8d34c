#include "irm/skyline.hpp"

#include <algorithm>
#include <numeric>

#include "irm/error.hpp"

namespace irm {

bool CandidateSet::contains(PointId id) const { return std::find(ids.begin(), ids.end(), id) != ids.end(); }

bool dominates(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw Error(ErrorCode::DimensionMismatch, "dominance test on points of different dimension");
  bool strictly = false;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] < q[i]) return false;
    strictly = strictly || p[i] > q[i];
  }
  return strictly;
}

bool dominates(const Point& p, const Point& q) { return dominates(std::span<const double>(p.coords), std::span<const double>(q.coords)); }

CandidateSet compute_skyline(std::span<const Point> dataset) {
  if (dataset.empty()) throw Error(ErrorCode::EmptyInput, "skyline of an empty dataset");
  const std::size_t d = dataset.front().dim();
  std::vector<double> sums(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (dataset[i].dim() != d) throw Error(ErrorCode::DimensionMismatch, "dataset points differ in dimension");
    sums[i] = std::accumulate(dataset[i].coords.begin(), dataset[i].coords.end(), 0.0);
  }
  // A point can only be dominated by one with a strictly larger sum, so scanning
  // by descending sum lets the window hold final skyline points only.
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return sums[a] > sums[b]; });

  std::vector<std::size_t> window;
  for (std::size_t idx : order) {
    const auto& q = dataset[idx].coords;
    bool keep = true;
    for (std::size_t w : window) {
      const auto& p = dataset[w].coords;
      if (p == q || dominates(std::span<const double>(p), std::span<const double>(q))) {
        keep = false;
        break;
      }
    }
    if (keep) window.push_back(idx);
  }
  // Equal-sum duplicates may have been visited out of dataset order; keep the first.
  std::sort(window.begin(), window.end());
  CandidateSet out;
  out.ids.reserve(window.size());
  for (std::size_t idx : window) out.ids.push_back(dataset[idx].id);
  return out;
}

}  // namespace irm
