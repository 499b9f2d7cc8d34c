#include "irm/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "irm/error.hpp"

namespace irm::lp {
namespace {

void validate(const std::vector<Constraint>& constraints, std::size_t num_vars,
              const std::vector<double>& objective, const std::vector<double>& lower_bounds) {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::MalformedProgram, msg); };
  if (num_vars == 0) fail("linear program has no variables");
  if (!objective.empty() && objective.size() != num_vars) {
    std::ostringstream os;
    os << "objective has " << objective.size() << " coefficients, expected " << num_vars;
    fail(os.str());
  }
  if (!lower_bounds.empty() && lower_bounds.size() != num_vars) fail("lower bound vector has wrong length");
  for (std::size_t k = 0; k < constraints.size(); ++k) {
    const auto& c = constraints[k];
    if (c.coeffs.size() != num_vars) {
      std::ostringstream os;
      os << "constraint " << k << " has " << c.coeffs.size() << " coefficients, expected " << num_vars;
      fail(os.str());
    }
    if (!std::isfinite(c.rhs)) fail("non-finite right-hand side");
    for (double a : c.coeffs)
      if (!std::isfinite(a)) fail("non-finite constraint coefficient");
  }
  for (double b : lower_bounds)
    if (std::isnan(b) || b == std::numeric_limits<double>::infinity()) fail("invalid lower bound");
}

// Dense tableau in canonical form. Row `m` is the objective row.
class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : m_(rows), n_(cols), w_(cols + 1), t_((rows + 1) * (cols + 1), 0.0) {}

  double& at(std::size_t i, std::size_t j) { return t_[i * w_ + j]; }
  double at(std::size_t i, std::size_t j) const { return t_[i * w_ + j]; }
  double& rhs(std::size_t i) { return t_[i * w_ + n_]; }
  double rhs(std::size_t i) const { return t_[i * w_ + n_]; }
  double& cost(std::size_t j) { return t_[m_ * w_ + j]; }
  std::size_t rows() const { return m_; }
  std::size_t cols() const { return n_; }

  void pivot(std::size_t r, std::size_t c) {
    double* prow = &t_[r * w_];
    const double inv = 1.0 / prow[c];
    for (std::size_t j = 0; j < w_; ++j) prow[j] *= inv;
    prow[c] = 1.0;
    for (std::size_t i = 0; i <= m_; ++i) {
      if (i == r) continue;
      double* row = &t_[i * w_];
      const double f = row[c];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < w_; ++j) row[j] -= f * prow[j];
      row[c] = 0.0;
    }
  }

  // Drops row r by swapping the last constraint row into its place.
  void drop_row(std::size_t r) {
    const std::size_t last = m_ - 1;
    if (r != last) std::copy_n(&t_[last * w_], w_, &t_[r * w_]);
    std::copy_n(&t_[m_ * w_], w_, &t_[last * w_]);
    --m_;
    t_.resize((m_ + 1) * w_);
  }

 private:
  std::size_t m_, n_, w_;
  std::vector<double> t_;
};

enum class IterResult { Optimal, Unbounded };

class Simplex {
 public:
  Simplex(Tableau& t, std::vector<std::size_t>& basis, const std::vector<bool>& blocked)
      : t_(t), basis_(basis), blocked_(blocked) {}

  IterResult run() {
    bool degenerate = false;
    const std::size_t limit = 50 * (t_.rows() + t_.cols()) + 1000;
    for (std::size_t iter = 0; iter < limit; ++iter) {
      const auto enter = choose_entering(degenerate);
      if (!enter) return IterResult::Optimal;
      const auto leave = choose_leaving(*enter);
      if (!leave) return IterResult::Unbounded;
      degenerate = t_.rhs(*leave) <= kTolerance;
      t_.pivot(*leave, *enter);
      basis_[*leave] = *enter;
      for (std::size_t i = 0; i < t_.rows(); ++i)
        if (t_.rhs(i) < 0.0 && t_.rhs(i) > -kTolerance) t_.rhs(i) = 0.0;
    }
    throw Error(ErrorCode::MalformedProgram, "simplex iteration limit exceeded");
  }

 private:
  std::optional<std::size_t> choose_entering(bool bland) {
    std::optional<std::size_t> best;
    double best_val = -kTolerance;
    for (std::size_t j = 0; j < t_.cols(); ++j) {
      if (blocked_[j]) continue;
      const double r = t_.cost(j);
      if (r < best_val) {
        best = j;
        if (bland) break;
        best_val = r;
      }
    }
    return best;
  }

  std::optional<std::size_t> choose_leaving(std::size_t col) {
    std::optional<std::size_t> best;
    double best_ratio = 0.0;
    for (std::size_t i = 0; i < t_.rows(); ++i) {
      const double a = t_.at(i, col);
      if (a <= kTolerance) continue;
      const double ratio = t_.rhs(i) / a;
      if (!best || ratio < best_ratio - 1e-12 ||
          (ratio <= best_ratio + 1e-12 && basis_[i] < basis_[*best])) {
        best = i;
        best_ratio = ratio;
      }
    }
    return best;
  }

  Tableau& t_;
  std::vector<std::size_t>& basis_;
  const std::vector<bool>& blocked_;
};

struct Prepared {
  Tableau tableau;
  std::vector<std::size_t> basis;
  std::vector<bool> artificial;
  std::vector<std::size_t> pos_col;  // structural column of each variable
  std::vector<std::ptrdiff_t> neg_col;  // negative part column for free variables, or -1
  std::vector<double> shift;
  std::size_t num_struct = 0;
  bool has_artificials = false;
};

Prepared prepare(const std::vector<Constraint>& constraints, std::size_t num_vars,
                 const std::vector<double>& lower_bounds) {
  std::vector<std::size_t> pos_col(num_vars);
  std::vector<std::ptrdiff_t> neg_col(num_vars, -1);
  std::vector<double> shift(num_vars, 0.0);
  std::size_t ns = 0;
  for (std::size_t j = 0; j < num_vars; ++j) {
    const double lb = lower_bounds.empty() ? 0.0 : lower_bounds[j];
    pos_col[j] = ns++;
    if (std::isinf(lb)) {
      neg_col[j] = static_cast<std::ptrdiff_t>(ns++);
    } else {
      shift[j] = lb;
    }
  }

  const std::size_t m = constraints.size();
  std::vector<double> rhs(m);
  std::vector<double> sign(m, 1.0);
  std::vector<Relation> rel(m);
  std::size_t n_slack = 0, n_art = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& c = constraints[i];
    double b = c.rhs;
    for (std::size_t j = 0; j < num_vars; ++j) b -= c.coeffs[j] * shift[j];
    Relation r = c.relation;
    if (b < 0.0 || (b == 0.0 && r == Relation::GreaterEq)) {
      sign[i] = -1.0;
      b = -b;
      if (r == Relation::LessEq) r = Relation::GreaterEq;
      else if (r == Relation::GreaterEq) r = Relation::LessEq;
    }
    rhs[i] = b;
    rel[i] = r;
    if (r != Relation::Equal) ++n_slack;
    if (r != Relation::LessEq) ++n_art;
  }

  const std::size_t ncols = ns + n_slack + n_art;
  Prepared p{Tableau(m, ncols), std::vector<std::size_t>(m), std::vector<bool>(ncols, false),
             std::move(pos_col), std::move(neg_col), std::move(shift), ns, n_art > 0};
  std::size_t slack = ns, art = ns + n_slack;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& c = constraints[i];
    for (std::size_t j = 0; j < num_vars; ++j) {
      const double a = sign[i] * c.coeffs[j];
      p.tableau.at(i, p.pos_col[j]) = a;
      if (p.neg_col[j] >= 0) p.tableau.at(i, static_cast<std::size_t>(p.neg_col[j])) = -a;
    }
    p.tableau.rhs(i) = rhs[i];
    switch (rel[i]) {
      case Relation::LessEq:
        p.tableau.at(i, slack) = 1.0;
        p.basis[i] = slack++;
        break;
      case Relation::GreaterEq:
        p.tableau.at(i, slack++) = -1.0;
        p.tableau.at(i, art) = 1.0;
        p.artificial[art] = true;
        p.basis[i] = art++;
        break;
      case Relation::Equal:
        p.tableau.at(i, art) = 1.0;
        p.artificial[art] = true;
        p.basis[i] = art++;
        break;
    }
  }
  return p;
}

// Returns false when the program is infeasible. On success the tableau holds a
// basic feasible solution with every artificial column out of the basis and blocked.
bool phase_one(Prepared& p, std::vector<bool>& blocked, double feas_tol = kTolerance) {
  auto& t = p.tableau;
  blocked.assign(t.cols(), false);
  if (!p.has_artificials) {
    blocked = p.artificial;
    return true;
  }
  double scale = 1.0;
  for (std::size_t i = 0; i < t.rows(); ++i) scale = std::max(scale, std::abs(t.rhs(i)));
  // minimize sum of artificials == maximize -sum; canonical reduced costs.
  for (std::size_t j = 0; j <= t.cols(); ++j) t.cost(j) = 0.0;
  for (std::size_t j = 0; j < t.cols(); ++j)
    if (p.artificial[j]) t.cost(j) = 1.0;
  for (std::size_t i = 0; i < t.rows(); ++i) {
    if (!p.artificial[p.basis[i]]) continue;
    for (std::size_t j = 0; j <= t.cols(); ++j) t.cost(j) -= t.at(i, j);
  }
  Simplex(t, p.basis, blocked).run();
  // objective row rhs holds -(sum of artificials)
  if (-t.cost(t.cols()) > feas_tol * scale) return false;

  for (std::size_t i = 0; i < t.rows();) {
    if (!p.artificial[p.basis[i]]) {
      ++i;
      continue;
    }
    std::optional<std::size_t> col;
    double best = kTolerance;
    for (std::size_t j = 0; j < t.cols(); ++j) {
      if (p.artificial[j]) continue;
      if (std::abs(t.at(i, j)) > best) {
        best = std::abs(t.at(i, j));
        col = j;
      }
    }
    if (col) {
      t.pivot(i, *col);
      p.basis[i] = *col;
      ++i;
    } else {
      t.drop_row(i);
      p.basis[i] = p.basis.back();
      p.basis.pop_back();
    }
  }
  blocked = p.artificial;
  return true;
}

std::vector<double> extract(const Prepared& p, std::size_t num_vars) {
  std::vector<double> y(p.tableau.cols(), 0.0);
  for (std::size_t i = 0; i < p.tableau.rows(); ++i) y[p.basis[i]] = std::max(0.0, p.tableau.rhs(i));
  std::vector<double> x(num_vars);
  for (std::size_t j = 0; j < num_vars; ++j) {
    double v = y[p.pos_col[j]];
    if (p.neg_col[j] >= 0) v -= y[static_cast<std::size_t>(p.neg_col[j])];
    x[j] = v + p.shift[j];
  }
  return x;
}

}  // namespace

Outcome solve(const LinearProgram& lp) {
  validate(lp.constraints, lp.num_vars, lp.objective, lp.lower_bounds);
  Prepared p = prepare(lp.constraints, lp.num_vars, lp.lower_bounds);
  std::vector<bool> blocked;
  if (!phase_one(p, blocked)) return Outcome{Status::Infeasible, {}, 0.0};

  auto& t = p.tableau;
  for (std::size_t j = 0; j <= t.cols(); ++j) t.cost(j) = 0.0;
  if (!lp.objective.empty()) {
    for (std::size_t j = 0; j < lp.num_vars; ++j) {
      t.cost(p.pos_col[j]) = -lp.objective[j];
      if (p.neg_col[j] >= 0) t.cost(static_cast<std::size_t>(p.neg_col[j])) = lp.objective[j];
    }
    for (std::size_t i = 0; i < t.rows(); ++i) {
      const double cb = -t.cost(p.basis[i]);
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j <= t.cols(); ++j) t.cost(j) += cb * t.at(i, j);
    }
    if (Simplex(t, p.basis, blocked).run() == IterResult::Unbounded) return Outcome{Status::Unbounded, {}, 0.0};
  }

  Outcome out{Status::Optimal, extract(p, lp.num_vars), 0.0};
  if (!lp.objective.empty())
    for (std::size_t j = 0; j < lp.num_vars; ++j) out.objective_value += lp.objective[j] * out.solution[j];
  return out;
}

bool feasible(const std::vector<Constraint>& constraints, std::size_t num_vars,
              const std::vector<double>& lower_bounds, double tolerance) {
  validate(constraints, num_vars, {}, lower_bounds);
  Prepared p = prepare(constraints, num_vars, lower_bounds);
  std::vector<bool> blocked;
  return phase_one(p, blocked, tolerance);
}

double max_violation(const LinearProgram& lp, const std::vector<double>& x) {
  double worst = 0.0;
  for (std::size_t j = 0; j < lp.num_vars; ++j) {
    const double lb = lp.lower_bounds.empty() ? 0.0 : lp.lower_bounds[j];
    if (std::isfinite(lb)) worst = std::max(worst, lb - x[j]);
  }
  for (const auto& c : lp.constraints) {
    double lhs = 0.0;
    for (std::size_t j = 0; j < lp.num_vars; ++j) lhs += c.coeffs[j] * x[j];
    switch (c.relation) {
      case Relation::LessEq: worst = std::max(worst, lhs - c.rhs); break;
      case Relation::GreaterEq: worst = std::max(worst, c.rhs - lhs); break;
      case Relation::Equal: worst = std::max(worst, std::abs(lhs - c.rhs)); break;
    }
  }
  return worst;
}

}  // namespace irm::lp
