#include <doctest.h>

#include <random>

#include "irm/error.hpp"
#include "irm/geometry.hpp"
#include "oracles.hpp"

using namespace irm;

namespace {

std::vector<Point> pts(std::initializer_list<std::vector<double>> rows) {
  std::vector<Point> out;
  for (const auto& r : rows) out.push_back(Point{out.size(), r, ""});
  return out;
}

// Grid points of the simplex inside poly, and those satisfying pred; they must agree.
template <class Pred>
void agree_on_grid(const UtilityPolytope& poly, Pred pred, std::size_t steps = 60) {
  std::size_t inside = 0;
  for (const auto& f : oracle::simplex_grid(poly.dim(), steps)) {
    const bool want = pred(f);
    // Points on a shifted strict boundary are ambiguous; skip them.
    bool boundary = false;
    for (const auto& h : poly.halfspaces()) boundary = boundary || std::abs(oracle::dot(h.normal, f)) < 1e-7;
    if (boundary) continue;
    CHECK(poly.contains(f) == want);
    inside += want;
  }
  CHECK(inside > 0);
}

}  // namespace

TEST_CASE("utilities of the three-point three-user table") {
  const auto p = pts({{10, 1}, {9, 2}, {8, 5}});
  const std::vector<std::vector<double>> expect{{8.2, 7.6, 7.4}, {7.3, 6.9, 7.1}, {6.4, 6.2, 6.8}};
  const std::vector<UtilityVector> users{{{0.8, 0.2}}, {{0.7, 0.3}}, {{0.6, 0.4}}};
  for (std::size_t u = 0; u < 3; ++u)
    for (std::size_t i = 0; i < 3; ++i) CHECK(utility(users[u], p[i]) == doctest::Approx(expect[u][i]));

  // Sorting p1 > p2 > p3 keeps only the first user; naming p1 the favorite keeps two.
  const UtilityPolytope all(2);
  const auto sorted = shrink_with_sort(all, p);
  const auto chosen = shrink_with_choice(all, p[0], std::vector<Point>{p[1], p[2]});
  CHECK(sorted.contains(users[0].weights));
  CHECK_FALSE(sorted.contains(users[1].weights));
  CHECK_FALSE(sorted.contains(users[2].weights));
  CHECK(chosen.contains(users[0].weights));
  CHECK(chosen.contains(users[1].weights));
  CHECK_FALSE(chosen.contains(users[2].weights));
}

TEST_CASE("regret ratio of a car subset") {
  const auto cars = pts({{0.4, 0.8}, {0.6, 0.5}, {0.3, 0.6}, {0.7, 0.4}, {0.9, 0.2}});
  const UtilityVector f{{0.7, 0.3}};
  const std::vector<Point> sub{cars[1], cars[3]};
  CHECK(regret_ratio(cars, sub, f) == doctest::Approx(1.0 - 0.61 / 0.69));
  CHECK(regret_ratio(cars, std::vector<Point>{cars[4]}, f) == doctest::Approx(0.0));
  CHECK_THROWS_AS(utility(UtilityVector{{1.0}}, cars[0]), Error);
}

TEST_CASE("three-dimensional sort and favorite regions") {
  const auto p = pts({{0.5, 0, 0.5}, {0, 0.5, 0.5}, {0.5, 0.5, 0}});  // p, q, r
  const UtilityPolytope all(3);
  // p > r > q
  const auto sorted = shrink_with_sort(all, std::vector<Point>{p[0], p[2], p[1]});
  agree_on_grid(sorted, [](const oracle::Vec& f) { return f[0] >= f[2] && f[2] >= f[1]; });
  for (const oracle::Vec& v : {oracle::Vec{1, 0, 0}, oracle::Vec{0.5, 0, 0.5}, oracle::Vec{1. / 3, 1. / 3, 1. / 3}})
    CHECK(sorted.contains(v, 1e-8));
  // Coordinate ranges match those of the vertex set.
  std::vector<double> obj(3, 0.0);
  const double want_max[3] = {1.0, 1.0 / 3, 0.5};
  for (int i = 0; i < 3; ++i) {
    obj.assign(3, 0.0);
    obj[i] = 1.0;
    CHECK(sorted.maximize(obj)->second == doctest::Approx(want_max[i]).epsilon(1e-6));
  }

  // p chosen over q and r: f1 >= f2 and f3 >= f2; triangle e3, e1, centre.
  const auto chosen = shrink_with_choice(all, p[0], std::vector<Point>{p[1], p[2]});
  agree_on_grid(chosen, [](const oracle::Vec& f) { return f[0] >= f[1] && f[2] >= f[1]; });
  for (const oracle::Vec& v : {oracle::Vec{0, 0, 1}, oracle::Vec{1. / 3, 1. / 3, 1. / 3}, oracle::Vec{1, 0, 0}})
    CHECK(chosen.contains(v, 1e-8));
  CHECK(l1_width(sorted) < l1_width(chosen) + 1e-12);
}

TEST_CASE("ties produce closed constraints") {
  const auto p = pts({{1, 0}, {0, 1}});
  const auto tied = shrink_with_sort(UtilityPolytope(2), p, {true});
  REQUIRE(tied.halfspaces().size() == 1);
  CHECK_FALSE(tied.halfspaces()[0].strict);
  CHECK(tied.contains(std::vector<double>{0.5, 0.5}));
  const auto strict = shrink_with_sort(UtilityPolytope(2), p);
  CHECK_FALSE(strict.contains(std::vector<double>{0.5, 0.5}, 0.0));
  CHECK(strict.contains(std::vector<double>{0.6, 0.4}));
}

TEST_CASE("duplicate points cannot form a halfspace") {
  const auto p = pts({{0.3, 0.3}, {0.3, 0.3}});
  try {
    preference_halfspace(p[0], p[1]);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DuplicatePoints);
  }
}

TEST_CASE("contradictory feedback empties the polytope") {
  const auto p = pts({{1, 0}, {0, 1}});
  auto poly = shrink_with_sort(UtilityPolytope(2), p);
  CHECK_FALSE(is_empty(poly));
  poly = shrink_with_sort(poly, std::vector<Point>{p[1], p[0]});
  CHECK(is_empty(poly));
  CHECK_FALSE(poly.maximize(std::vector<double>{1, 0}).has_value());
  CHECK_THROWS_AS(centroid_utility(poly), Error);
}

TEST_CASE("width never grows as halfspaces are added") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto cloud = oracle::random_points(12, 3, rng);
    const UtilityVector hidden{{0.2 + 0.01 * trial, 0.5, 0.3 - 0.01 * trial}};
    UtilityPolytope poly(3);
    double prev = l1_width(poly);
    CHECK(prev == doctest::Approx(1.0));
    for (std::size_t k = 0; k + 1 < cloud.size(); k += 2) {
      const bool first = utility(hidden, cloud[k]) >= utility(hidden, cloud[k + 1]);
      poly = poly.with(preference_halfspace(cloud[first ? k : k + 1], cloud[first ? k + 1 : k]));
      CHECK(poly.contains(hidden.weights));
      const double w = l1_width(poly);
      CHECK(w <= prev + 1e-9);
      prev = w;
      // Centroid stays inside and on the simplex.
      const auto c = centroid_utility(poly);
      CHECK(c.on_simplex());
      CHECK(poly.contains(c.weights, 1e-7));
    }
    const auto lean = poly.without_redundant();
    CHECK(lean.halfspaces().size() <= poly.halfspaces().size());
    for (const auto& f : oracle::simplex_grid(3, 30)) CHECK(lean.contains(f, 1e-7) == poly.contains(f, 1e-7));
  }
}

TEST_CASE("exact maximum regret agrees with a grid search and bounds sampling") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    const auto cloud = oracle::random_points(25, 3, rng);
    const std::vector<Point> sub{cloud[0], cloud[1]};
    UtilityPolytope poly(3);
    if (trial % 2) {
      const UtilityVector f{{0.3, 0.3, 0.4}};
      const bool keep = utility(f, cloud[2]) > utility(f, cloud[3]);
      poly = poly.with(preference_halfspace(cloud[keep ? 2 : 3], cloud[keep ? 3 : 2]));
    }
    const double exact = max_regret_ratio(cloud, sub, poly);
    const double sampled = max_regret_ratio(cloud, sub, poly, RegretMethod::Sampled, 3000, 3);
    double grid = 0.0;
    for (const auto& f : oracle::simplex_grid(3, 120)) {
      if (!poly.contains(f)) continue;
      grid = std::max(grid, regret_ratio(cloud, sub, UtilityVector{f}));
    }
    CHECK(exact >= grid - 1e-9);
    CHECK(exact <= grid + 0.03);
    CHECK(sampled <= exact + 1e-9);
  }
}
