#include "irm/hull.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "irm/error.hpp"

namespace irm {
namespace {

using Vec = std::vector<double>;

double norm2(const Vec& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// Cone membership over a subset of `vecs` given by index.
bool in_cone(const Vec& v, const std::vector<Vec>& vecs, std::span<const std::size_t> use, double tol) {
  const std::size_t d = v.size();
  if (use.empty()) return std::all_of(v.begin(), v.end(), [&](double x) { return std::abs(x) <= tol; });
  std::vector<lp::Constraint> rows(d);
  for (std::size_t i = 0; i < d; ++i) {
    rows[i].coeffs.resize(use.size());
    for (std::size_t k = 0; k < use.size(); ++k) rows[i].coeffs[k] = vecs[use[k]][i];
    rows[i].relation = lp::Relation::Equal;
    rows[i].rhs = v[i];
  }
  return lp::feasible(rows, use.size(), {}, tol);
}

// The cone of `use` contains a line iff 0 is a nontrivial nonnegative combination.
bool contains_line(const std::vector<Vec>& vecs, std::span<const std::size_t> use, double tol) {
  if (use.size() < 2) return false;
  const std::size_t d = vecs[use[0]].size();
  std::vector<lp::Constraint> rows(d + 1);
  for (std::size_t i = 0; i < d; ++i) {
    rows[i].coeffs.resize(use.size());
    for (std::size_t k = 0; k < use.size(); ++k) rows[i].coeffs[k] = vecs[use[k]][i] / norm2(vecs[use[k]]);
    rows[i].relation = lp::Relation::Equal;
  }
  rows[d].coeffs.assign(use.size(), 1.0);
  rows[d].relation = lp::Relation::Equal;
  rows[d].rhs = 1.0;
  return lp::feasible(rows, use.size(), {}, tol);
}

// Representatives of the distinct ray directions, keeping the longest vector.
std::vector<std::size_t> distinct_directions(const std::vector<Vec>& diffs) {
  std::vector<Vec> unit(diffs.size());
  std::vector<double> len(diffs.size());
  for (std::size_t k = 0; k < diffs.size(); ++k) {
    len[k] = norm2(diffs[k]);
    unit[k] = diffs[k];
    for (double& x : unit[k]) x /= len[k];
  }
  std::vector<std::size_t> order(diffs.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return unit[a] < unit[b]; });
  auto same = [&](std::size_t a, std::size_t b) {
    for (std::size_t i = 0; i < unit[a].size(); ++i)
      if (std::abs(unit[a][i] - unit[b][i]) > 1e-10) return false;
    return true;
  };
  std::vector<std::size_t> reps;
  for (std::size_t k = 0; k < order.size();) {
    std::size_t best = order[k], j = k + 1;
    while (j < order.size() && same(order[k], order[j])) {
      if (len[order[j]] > len[best] || (len[order[j]] == len[best] && order[j] < best)) best = order[j];
      ++j;
    }
    reps.push_back(best);
    k = j;
  }
  std::sort(reps.begin(), reps.end());
  return reps;
}

}  // namespace

PointId initial_vertex(std::span<const Point> dataset, const CandidateSet& candidates) {
  if (candidates.empty()) throw Error(ErrorCode::EmptyInput, "initial vertex of an empty candidate set");
  PointId best = candidates.ids.front();
  double best_val = -1.0;
  for (PointId id : candidates.ids) {
    const auto& c = dataset[id].coords;
    const double val = std::accumulate(c.begin(), c.end(), 0.0) / static_cast<double>(c.size());
    if (val > best_val || (val == best_val && id < best)) {
      best = id;
      best_val = val;
    }
  }
  return best;
}

bool in_conical_hull(std::span<const double> v, const std::vector<std::vector<double>>& generators, double tolerance) {
  for (const auto& g : generators)
    if (g.size() != v.size()) throw Error(ErrorCode::DimensionMismatch, "cone generator dimension differs from the vector");
  std::vector<std::size_t> all(generators.size());
  std::iota(all.begin(), all.end(), 0);
  return in_cone(Vec(v.begin(), v.end()), generators, all, tolerance);
}

ConeFrame conical_frame(const Point& apex, std::span<const Point> others, std::span<const std::size_t> priority,
                        std::size_t limit) {
  ConeFrame frame;
  frame.apex = apex.id;
  std::vector<Vec> diffs(others.size());
  for (std::size_t k = 0; k < others.size(); ++k) {
    const auto& q = others[k];
    if (q.dim() != apex.dim()) throw Error(ErrorCode::DimensionMismatch, "frame point dimension differs from the apex");
    if (q.id == apex.id || q.coords == apex.coords)
      throw Error(ErrorCode::DuplicatePoints, "apex " + std::to_string(apex.id) + " is not distinct from point " + std::to_string(q.id));
    diffs[k].resize(q.dim());
    for (std::size_t i = 0; i < q.dim(); ++i) diffs[k][i] = q.coords[i] - apex.coords[i];
  }
  if (others.empty()) return frame;

  const auto reps = distinct_directions(diffs);
  if (contains_line(diffs, reps, lp::kTolerance) && contains_line(diffs, reps, lp::kTolerance / 10.0)) {
    frame.degenerate = true;
    return frame;
  }

  std::vector<bool> is_rep(others.size(), false);
  for (std::size_t r : reps) is_rep[r] = true;
  std::vector<std::size_t> members;
  std::vector<std::size_t> rest;
  rest.reserve(reps.size());
  for (std::size_t k : priority) {
    if (k >= others.size() || !is_rep[k]) continue;
    if (members.size() >= limit) break;
    ++frame.checked_against;
    if (!members.empty() && in_cone(diffs[k], diffs, members, lp::kTolerance)) continue;
    rest.clear();
    for (std::size_t r : reps)
      if (r != k) rest.push_back(r);
    if (!in_cone(diffs[k], diffs, rest, lp::kTolerance)) members.push_back(k);
  }
  std::sort(members.begin(), members.end());
  for (std::size_t k : members) frame.frame_members.push_back(others[k].id);
  return frame;
}

ConeFrame conical_frame(const Point& apex, std::span<const Point> others) {
  std::vector<std::size_t> order(others.size());
  std::iota(order.begin(), order.end(), 0);
  return conical_frame(apex, others, order, others.size());
}

std::vector<PointId> neighbors(const Point& apex, std::span<const Point> dataset, const CandidateSet& candidates) {
  std::vector<Point> others;
  others.reserve(candidates.size());
  for (PointId id : candidates.ids)
    if (id != apex.id) others.push_back(dataset[id]);
  if (others.empty()) return {};
  return conical_frame(apex, others).frame_members;
}

}  // namespace irm
