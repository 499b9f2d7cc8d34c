#pragma once

#include <span>
#include <vector>

#include "irm/geometry.hpp"
#include "irm/lp.hpp"
#include "irm/skyline.hpp"

namespace irm {

/// Conical hull frame of the difference vectors {q - apex}.
struct ConeFrame {
  PointId apex = 0;
  std::vector<PointId> frame_members;  // in input order
  std::size_t checked_against = 0;     // difference vectors examined
  bool degenerate = false;             // apex is not a vertex: the cone contains a line
};

/// Maximizer of the uniform utility over the candidates, lowest id on ties.
/// `dataset` is indexed by PointId.
PointId initial_vertex(std::span<const Point> dataset, const CandidateSet& candidates);

/// Is there w >= 0 with sum w_i g_i = v? An empty generator set spans only 0.
bool in_conical_hull(std::span<const double> v, const std::vector<std::vector<double>>& generators,
                     double tolerance = lp::kTolerance);

/// Minimal generator subset of {q - apex : q in others}. Parallel differences
/// collapse onto the farthest point. Members are certified incrementally: a
/// vector inside the cone of the frame found so far is skipped, otherwise it
/// is tested against every other vector.
ConeFrame conical_frame(const Point& apex, std::span<const Point> others);

/// Same, but stops after `limit` members and visits candidates in `priority`
/// order (indices into `others`). Used by the display strategy, which only
/// needs s-1 neighbours.
ConeFrame conical_frame(const Point& apex, std::span<const Point> others, std::span<const std::size_t> priority,
                        std::size_t limit);

/// Convex hull neighbours of apex among the candidates: candidates whose
/// difference vector belongs to the conical frame. Empty for a singleton set.
std::vector<PointId> neighbors(const Point& apex, std::span<const Point> dataset, const CandidateSet& candidates);

}  // namespace irm
