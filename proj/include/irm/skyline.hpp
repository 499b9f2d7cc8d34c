#pragma once

#include <span>
#include <vector>

#include "irm/geometry.hpp"

namespace irm {

/// Candidate set C: ids into the dataset, in dataset order.
struct CandidateSet {
  std::vector<PointId> ids;
  std::size_t generation = 0;  // round of the last prune

  std::size_t size() const noexcept { return ids.size(); }
  bool empty() const noexcept { return ids.empty(); }
  bool contains(PointId id) const;
};

/// p[i] >= q[i] everywhere and strictly greater somewhere.
bool dominates(std::span<const double> p, std::span<const double> q);
bool dominates(const Point& p, const Point& q);

/// Points not dominated by any other, in dataset order; exact duplicates keep
/// their first occurrence. Sort-by-sum, then block-nested-loop.
CandidateSet compute_skyline(std::span<const Point> dataset);

}  // namespace irm
