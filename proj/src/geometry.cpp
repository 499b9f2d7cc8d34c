#include "irm/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "irm/error.hpp"
#include "irm/lp.hpp"

namespace irm {
namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void require_dim(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    std::ostringstream os;
    os << what << ": dimension " << got << " does not match " << want;
    throw Error(ErrorCode::DimensionMismatch, os.str());
  }
}

// Homogeneous row for a halfspace: strict ones become (n - shift*1)·f >= 0,
// which equals n·f >= shift on the simplex and keeps the right-hand side at 0.
std::vector<double> constraint_row(const Halfspace& h) {
  std::vector<double> row = h.normal;
  if (h.strict)
    for (double& a : row) a -= kStrictShift;
  return row;
}

lp::LinearProgram polytope_program(std::size_t dim, std::span<const Halfspace> hs, std::size_t skip = SIZE_MAX) {
  lp::LinearProgram prog;
  prog.num_vars = dim;
  prog.constraints.reserve(hs.size() + 1);
  prog.add(std::vector<double>(dim, 1.0), lp::Relation::Equal, 1.0);
  for (std::size_t k = 0; k < hs.size(); ++k)
    if (k != skip) prog.add(constraint_row(hs[k]), lp::Relation::GreaterEq, 0.0);
  return prog;
}

void clamp_to_simplex(std::vector<double>& w) {
  double sum = 0.0;
  for (double& x : w) {
    x = std::max(0.0, x);
    sum += x;
  }
  if (sum > 0.0)
    for (double& x : w) x /= sum;
}

}  // namespace

void validate_point(const Point& p) {
  if (p.dim() < 2) throw Error(ErrorCode::InvalidArgument, "points need at least 2 dimensions");
  for (double x : p.coords)
    if (!std::isfinite(x) || x < 0.0)
      throw Error(ErrorCode::InvalidArgument, "point " + std::to_string(p.id) + " has a negative or non-finite coordinate");
}

bool UtilityVector::on_simplex(double tol) const {
  double sum = 0.0;
  for (double w : weights) {
    if (w < -tol) return false;
    sum += w;
  }
  return std::abs(sum - 1.0) <= tol;
}

bool Halfspace::contains(std::span<const double> f, double tol) const {
  require_dim(f.size(), normal.size(), "halfspace membership");
  double threshold = 0.0;
  if (strict) threshold = kStrictShift * std::accumulate(f.begin(), f.end(), 0.0);
  return dot(normal, f) >= threshold - tol;
}

UtilityPolytope::UtilityPolytope(std::size_t dim) : dim_(dim) {
  if (dim < 2) throw Error(ErrorCode::InvalidArgument, "utility space needs at least 2 dimensions");
}

UtilityPolytope::UtilityPolytope(std::size_t dim, std::vector<Halfspace> halfspaces)
    : UtilityPolytope(dim) {
  for (const auto& h : halfspaces) require_dim(h.normal.size(), dim, "halfspace");
  halfspaces_ = std::move(halfspaces);
}

UtilityPolytope UtilityPolytope::with(Halfspace h) const {
  require_dim(h.normal.size(), dim_, "halfspace");
  UtilityPolytope out = *this;
  out.halfspaces_.push_back(std::move(h));
  return out;
}

UtilityPolytope UtilityPolytope::with(std::span<const Halfspace> hs) const {
  UtilityPolytope out = *this;
  for (const auto& h : hs) {
    require_dim(h.normal.size(), dim_, "halfspace");
    out.halfspaces_.push_back(h);
  }
  return out;
}

bool UtilityPolytope::contains(std::span<const double> f, double tol) const {
  require_dim(f.size(), dim_, "polytope membership");
  double sum = 0.0;
  for (double x : f) {
    if (x < -tol) return false;
    sum += x;
  }
  if (std::abs(sum - 1.0) > tol) return false;
  return std::all_of(halfspaces_.begin(), halfspaces_.end(), [&](const Halfspace& h) { return h.contains(f, tol); });
}

std::optional<std::pair<UtilityVector, double>> UtilityPolytope::maximize(std::span<const double> objective) const {
  require_dim(objective.size(), dim_, "objective");
  auto prog = polytope_program(dim_, halfspaces_);
  prog.objective.assign(objective.begin(), objective.end());
  auto out = lp::solve(prog);
  if (!out.optimal()) return std::nullopt;
  return std::make_pair(UtilityVector{std::move(out.solution)}, out.objective_value);
}

UtilityPolytope UtilityPolytope::without_redundant() const {
  std::vector<Halfspace> kept = halfspaces_;
  for (std::size_t k = kept.size(); k-- > 0;) {
    auto prog = polytope_program(dim_, kept, k);
    auto row = constraint_row(kept[k]);
    for (double& a : row) a = -a;
    prog.objective = std::move(row);
    auto out = lp::solve(prog);
    // min of the row over the others is -objective_value; implied when >= 0.
    if (out.optimal() && -out.objective_value >= -1e-12) kept.erase(kept.begin() + static_cast<std::ptrdiff_t>(k));
  }
  return UtilityPolytope(dim_, std::move(kept));
}

double utility(const UtilityVector& f, std::span<const double> p) {
  require_dim(p.size(), f.dim(), "utility");
  return dot(f.weights, p);
}

double utility(const UtilityVector& f, const Point& p) { return utility(f, std::span<const double>(p.coords)); }

double regret_ratio(std::span<const Point> dataset, std::span<const Point> subset, const UtilityVector& f) {
  if (dataset.empty() || subset.empty()) throw Error(ErrorCode::EmptyInput, "regret ratio needs nonempty dataset and subset");
  double best_d = -1.0, best_s = -1.0;
  for (const auto& p : dataset) best_d = std::max(best_d, utility(f, p));
  for (const auto& p : subset) best_s = std::max(best_s, utility(f, p));
  if (best_d <= 0.0) throw Error(ErrorCode::ZeroUtility, "maximum utility over the dataset is zero");
  return std::clamp(1.0 - best_s / best_d, 0.0, 1.0);
}

namespace {

double max_regret_exact(std::span<const Point> dataset, std::span<const Point> subset, const UtilityPolytope& poly) {
  const std::size_t d = poly.dim();
  // Variables (g, t): maximize -t s.t. g·s <= t for s in S, g·p = 1, g in the cone of the polytope.
  // The ratio is scale invariant so the simplex normalization can be dropped.
  lp::LinearProgram base;
  base.num_vars = d + 1;
  base.objective.assign(d + 1, 0.0);
  base.objective[d] = -1.0;
  for (const auto& s : subset) {
    std::vector<double> row(s.coords);
    row.push_back(-1.0);
    base.add(std::move(row), lp::Relation::LessEq, 0.0);
  }
  for (const auto& h : poly.halfspaces()) {
    std::vector<double> row = constraint_row(h);
    row.push_back(0.0);
    base.add(std::move(row), lp::Relation::GreaterEq, 0.0);
  }
  base.add(std::vector<double>(d + 1, 0.0), lp::Relation::Equal, 1.0);
  const std::size_t norm_row = base.constraints.size() - 1;

  double worst = 0.0;
  for (const auto& p : dataset) {
    auto& row = base.constraints[norm_row].coeffs;
    std::copy(p.coords.begin(), p.coords.end(), row.begin());
    row[d] = 0.0;
    auto out = lp::solve(base);
    if (!out.optimal()) continue;
    worst = std::max(worst, 1.0 - out.solution[d]);
  }
  return std::clamp(worst, 0.0, 1.0);
}

// Hit-and-run inside the polytope starting from its centroid utility.
std::vector<UtilityVector> sample_polytope(const UtilityPolytope& poly, std::size_t n, unsigned long long seed) {
  const std::size_t d = poly.dim();
  std::vector<UtilityVector> out;
  out.reserve(n + d + 1);
  for (std::size_t i = 0; i < d; ++i) {
    std::vector<double> e(d, 0.0);
    e[i] = 1.0;
    if (auto m = poly.maximize(e)) out.push_back(m->first);
  }
  UtilityVector x = centroid_utility(poly);
  out.push_back(x);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif;
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<double> dir(d);
    double mean = 0.0;
    for (double& v : dir) {
      v = gauss(rng);
      mean += v;
    }
    mean /= static_cast<double>(d);
    for (double& v : dir) v -= mean;
    double lo = -1e300, hi = 1e300;
    auto clip = [&](double a, double b) {  // a + t b >= 0
      if (std::abs(b) < 1e-15) return;
      const double t = -a / b;
      if (b > 0) lo = std::max(lo, t);
      else hi = std::min(hi, t);
    };
    for (std::size_t i = 0; i < d; ++i) clip(x.weights[i], dir[i]);
    for (const auto& h : poly.halfspaces()) {
      auto row = constraint_row(h);
      clip(dot(row, x.weights), dot(row, dir));
    }
    if (!(lo <= hi) || lo < -1e299 || hi > 1e299) continue;
    const double t = lo + (hi - lo) * unif(rng);
    for (std::size_t i = 0; i < d; ++i) x.weights[i] += t * dir[i];
    clamp_to_simplex(x.weights);
    out.push_back(x);
  }
  return out;
}

}  // namespace

double max_regret_ratio(std::span<const Point> dataset, std::span<const Point> subset, const UtilityPolytope& polytope,
                        RegretMethod method, std::size_t n_samples, unsigned long long seed) {
  if (dataset.empty() || subset.empty()) throw Error(ErrorCode::EmptyInput, "maximum regret ratio needs nonempty sets");
  if (is_empty(polytope)) throw Error(ErrorCode::EmptyPolytope, "maximum regret ratio over an empty utility space");
  for (const auto& p : dataset) require_dim(p.dim(), polytope.dim(), "maximum regret ratio");
  for (const auto& p : subset) require_dim(p.dim(), polytope.dim(), "maximum regret ratio");
  if (method == RegretMethod::ExactLp) return max_regret_exact(dataset, subset, polytope);

  double worst = 0.0;
  for (const auto& f : sample_polytope(polytope, n_samples, seed)) {
    double best_d = 0.0;
    for (const auto& p : dataset) best_d = std::max(best_d, utility(f, p));
    if (best_d <= 0.0) continue;
    worst = std::max(worst, regret_ratio(dataset, subset, f));
  }
  return worst;
}

Halfspace preference_halfspace(const Point& preferred, const Point& rejected, bool strict) {
  require_dim(rejected.dim(), preferred.dim(), "preference halfspace");
  Halfspace h;
  h.normal.resize(preferred.dim());
  bool nonzero = false;
  for (std::size_t i = 0; i < preferred.dim(); ++i) {
    h.normal[i] = preferred.coords[i] - rejected.coords[i];
    nonzero = nonzero || h.normal[i] != 0.0;
  }
  if (!nonzero)
    throw Error(ErrorCode::DuplicatePoints, "points " + std::to_string(preferred.id) + " and " +
                                                std::to_string(rejected.id) + " coincide; no preference halfspace");
  h.preferred = preferred.id;
  h.rejected = rejected.id;
  h.strict = strict;
  return h;
}

UtilityPolytope shrink_with_sort(const UtilityPolytope& polytope, std::span<const Point> sorted,
                                 const std::vector<bool>& tied_with_next) {
  if (sorted.size() < 2) throw Error(ErrorCode::InvalidArgument, "sorting feedback needs at least two points");
  for (std::size_t i = 0; i < sorted.size(); ++i)
    for (std::size_t j = i + 1; j < sorted.size(); ++j)
      if (sorted[i].id == sorted[j].id)
        throw Error(ErrorCode::DuplicatePoints, "point " + std::to_string(sorted[i].id) + " appears twice in the sorted list");
  if (!tied_with_next.empty() && tied_with_next.size() + 1 != sorted.size() && tied_with_next.size() != sorted.size())
    throw Error(ErrorCode::InvalidArgument, "tie flags do not match the sorted list");
  std::vector<Halfspace> hs;
  hs.reserve(sorted.size() * (sorted.size() - 1) / 2);
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    bool tied = true;
    for (std::size_t j = i + 1; j < sorted.size(); ++j) {
      tied = tied && !tied_with_next.empty() && tied_with_next[j - 1];
      hs.push_back(preference_halfspace(sorted[i], sorted[j], !tied));
    }
  }
  return polytope.with(hs);
}

UtilityPolytope shrink_with_choice(const UtilityPolytope& polytope, const Point& favorite, std::span<const Point> others) {
  if (others.empty()) throw Error(ErrorCode::InvalidArgument, "favorite feedback needs at least one other point");
  std::vector<Halfspace> hs;
  hs.reserve(others.size());
  for (const auto& q : others) {
    if (q.id == favorite.id) throw Error(ErrorCode::DuplicatePoints, "favorite also listed among the other points");
    hs.push_back(preference_halfspace(favorite, q));
  }
  return polytope.with(hs);
}

bool is_empty(const UtilityPolytope& polytope) {
  auto prog = polytope_program(polytope.dim(), polytope.halfspaces());
  return !lp::feasible(prog.constraints, prog.num_vars);
}

double l1_width(const UtilityPolytope& polytope) {
  const std::size_t d = polytope.dim();
  double width = 0.0;
  std::vector<double> obj(d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    obj[i] = 1.0;
    auto hi = polytope.maximize(obj);
    obj[i] = -1.0;
    auto lo = polytope.maximize(obj);
    obj[i] = 0.0;
    if (!hi || !lo) throw Error(ErrorCode::EmptyPolytope, "width of an empty utility space");
    width = std::max(width, hi->second + lo->second);
  }
  return std::max(0.0, width);
}

UtilityVector centroid_utility(const UtilityPolytope& polytope) {
  const std::size_t d = polytope.dim();
  std::vector<double> acc(d, 0.0), obj(d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    obj[i] = 1.0;
    auto m = polytope.maximize(obj);
    obj[i] = 0.0;
    if (!m) throw Error(ErrorCode::EmptyPolytope, "representative utility of an empty utility space");
    for (std::size_t k = 0; k < d; ++k) acc[k] += m->first.weights[k];
  }
  clamp_to_simplex(acc);
  return UtilityVector{std::move(acc)};
}

}  // namespace irm
