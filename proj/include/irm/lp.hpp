#pragma once

#include <optional>
#include <vector>

namespace irm::lp {

/// Constraint satisfaction and pivot tolerance.
inline constexpr double kTolerance = 1e-9;

enum class Relation { LessEq, Equal, GreaterEq };

struct Constraint {
  std::vector<double> coeffs;
  Relation relation = Relation::LessEq;
  double rhs = 0.0;
};

/// maximize objective·x subject to the constraints and x >= lower_bounds.
/// An empty lower_bounds vector means every variable is bounded below by 0;
/// -infinity marks a free variable.
struct LinearProgram {
  std::size_t num_vars = 0;
  std::vector<double> objective;
  std::vector<Constraint> constraints;
  std::vector<double> lower_bounds;

  void add(std::vector<double> coeffs, Relation rel, double rhs) {
    constraints.push_back(Constraint{std::move(coeffs), rel, rhs});
  }
};

enum class Status { Optimal, Infeasible, Unbounded };

struct Outcome {
  Status status = Status::Infeasible;
  std::vector<double> solution;  // filled iff Optimal
  double objective_value = 0.0;  // meaningful iff Optimal

  bool optimal() const noexcept { return status == Status::Optimal; }
};

/// Two-phase dense tableau simplex. Dantzig pricing, switching to Bland's rule
/// for as long as pivots stay degenerate. Throws Error(MalformedProgram) on
/// dimension mismatches.
Outcome solve(const LinearProgram& lp);

/// Phase one only: does any x >= lower bounds satisfy all constraints?
/// `tolerance` bounds the residual infeasibility accepted as feasible.
bool feasible(const std::vector<Constraint>& constraints, std::size_t num_vars,
              const std::vector<double>& lower_bounds = {}, double tolerance = kTolerance);

/// Largest violation of any constraint (or lower bound) at x.
double max_violation(const LinearProgram& lp, const std::vector<double>& x);

}  // namespace irm::lp
