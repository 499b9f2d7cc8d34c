// Brute-force reference implementations used to check the library. They
// share no code with src/ beyond the plain data types.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "irm/geometry.hpp"

namespace oracle {

using Vec = std::vector<double>;

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// All weight vectors with coordinates k/steps summing to one.
inline std::vector<Vec> simplex_grid(std::size_t d, std::size_t steps) {
  std::vector<Vec> out;
  std::vector<std::size_t> c(d, 0);
  auto rec = [&](auto&& self, std::size_t i, std::size_t left) -> void {
    if (i + 1 == d) {
      c[i] = left;
      Vec f(d);
      for (std::size_t k = 0; k < d; ++k) f[k] = static_cast<double>(c[k]) / static_cast<double>(steps);
      out.push_back(f);
      return;
    }
    for (std::size_t v = 0; v <= left; ++v) {
      c[i] = v;
      self(self, i + 1, left - v);
    }
  };
  rec(rec, 0, steps);
  return out;
}

// O(n^2) skyline, first occurrence kept among exact duplicates.
inline std::vector<std::size_t> skyline(const std::vector<Vec>& pts) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool keep = true;
    for (std::size_t j = 0; j < pts.size() && keep; ++j) {
      if (i == j) continue;
      if (pts[j] == pts[i]) {
        if (j < i) keep = false;
        continue;
      }
      bool ge = true, gt = false;
      for (std::size_t k = 0; k < pts[i].size(); ++k) {
        ge = ge && pts[j][k] >= pts[i][k];
        gt = gt || pts[j][k] > pts[i][k];
      }
      if (ge && gt) keep = false;
    }
    if (keep) out.push_back(i);
  }
  return out;
}

// Andrew's monotone chain; indices of strict hull vertices in ccw order.
inline std::vector<std::size_t> hull2d(const std::vector<Vec>& p) {
  std::vector<std::size_t> idx(p.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
  auto cross = [&](std::size_t o, std::size_t a, std::size_t b) {
    return (p[a][0] - p[o][0]) * (p[b][1] - p[o][1]) - (p[a][1] - p[o][1]) * (p[b][0] - p[o][0]);
  };
  std::vector<std::size_t> h(2 * p.size());
  std::size_t k = 0;
  for (std::size_t i : idx) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], i) <= 0) --k;
    h[k++] = i;
  }
  for (std::size_t t = idx.size() - 1, lo = k + 1; t-- > 0;) {
    const std::size_t i = idx[t];
    while (k >= lo && cross(h[k - 2], h[k - 1], i) <= 0) --k;
    h[k++] = i;
  }
  h.resize(k - 1);
  return h;
}

// Solves A x = b by Gaussian elimination with partial pivoting.
inline std::optional<Vec> solve_square(std::vector<Vec> a, Vec b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    if (std::abs(a[piv][c]) < 1e-12) return std::nullopt;
    std::swap(a[piv], a[c]);
    std::swap(b[piv], b[c]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double m = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= m * a[c][k];
      b[r] -= m * b[c];
    }
  }
  Vec x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
  return x;
}

// max c·x over {A x <= b} (rows already in <= form, bounds included) by
// enumerating every vertex. Only for tiny bounded programs.
inline std::optional<double> lp_vertex_max(const std::vector<Vec>& a, const Vec& b, const Vec& c) {
  const std::size_t n = c.size(), m = a.size();
  std::optional<double> best;
  std::vector<std::size_t> pick(n);
  auto rec = [&](auto&& self, std::size_t start, std::size_t depth) -> void {
    if (depth == n) {
      std::vector<Vec> sa;
      Vec sb;
      for (std::size_t r : pick) {
        sa.push_back(a[r]);
        sb.push_back(b[r]);
      }
      auto x = solve_square(sa, sb);
      if (!x) return;
      for (std::size_t r = 0; r < m; ++r)
        if (dot(a[r], *x) > b[r] + 1e-7) return;
      const double v = dot(c, *x);
      if (!best || v > *best) best = v;
      return;
    }
    for (std::size_t r = start; r < m; ++r) {
      pick[depth] = r;
      self(self, r + 1, depth + 1);
    }
  };
  rec(rec, 0, 0);
  return best;
}

inline double det(std::vector<Vec> m) {
  const std::size_t n = m.size();
  double out = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
    if (m[piv][c] == 0.0) return 0.0;
    if (piv != c) {
      std::swap(m[piv], m[c]);
      out = -out;
    }
    out *= m[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = m[r][c] / m[c][c];
      for (std::size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
    }
  }
  return out;
}

// Edges of the hull of points in general position: pairs sharing a facet,
// where facets are d-subsets whose hyperplane has every other point on one side.
inline std::set<std::pair<std::size_t, std::size_t>> hull_edges(const std::vector<irm::Point>& p) {
  const std::size_t n = p.size(), d = p[0].dim();
  std::set<std::pair<std::size_t, std::size_t>> edges;
  std::vector<std::size_t> pick(d);
  auto rec = [&](auto&& self, std::size_t start, std::size_t depth) -> void {
    if (depth == d) {
      // Normal by cofactors of the (d-1) x d matrix of differences.
      Vec normal(d);
      for (std::size_t col = 0; col < d; ++col) {
        std::vector<Vec> minor;
        for (std::size_t r = 1; r < d; ++r) {
          Vec row;
          for (std::size_t k = 0; k < d; ++k)
            if (k != col) row.push_back(p[pick[r]].coords[k] - p[pick[0]].coords[k]);
          minor.push_back(row);
        }
        normal[col] = ((col % 2) ? -1.0 : 1.0) * det(minor);
      }
      const double off = dot(normal, p[pick[0]].coords);
      int pos = 0, neg = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const double v = dot(normal, p[i].coords) - off;
        pos += v > 1e-12;
        neg += v < -1e-12;
      }
      if (pos == 0 || neg == 0)
        for (std::size_t a = 0; a < d; ++a)
          for (std::size_t b = a + 1; b < d; ++b) edges.insert({pick[a], pick[b]});
      return;
    }
    for (std::size_t i = start; i < n; ++i) {
      pick[depth] = i;
      self(self, i + 1, depth + 1);
    }
  };
  rec(rec, 0, 0);
  return edges;
}

// Graham scan: sort by angle around the lowest point, then keep left turns.
// Strict hull vertices in ccw order.
inline std::vector<std::size_t> graham2d(const std::vector<Vec>& p) {
  std::size_t pivot = 0;
  for (std::size_t i = 1; i < p.size(); ++i)
    if (p[i][1] < p[pivot][1] || (p[i][1] == p[pivot][1] && p[i][0] < p[pivot][0])) pivot = i;
  auto cross = [&](std::size_t o, std::size_t a, std::size_t b) {
    return (p[a][0] - p[o][0]) * (p[b][1] - p[o][1]) - (p[a][1] - p[o][1]) * (p[b][0] - p[o][0]);
  };
  auto dist = [&](std::size_t a) { return std::hypot(p[a][0] - p[pivot][0], p[a][1] - p[pivot][1]); };
  std::vector<std::size_t> rest;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (i != pivot) rest.push_back(i);
  std::sort(rest.begin(), rest.end(), [&](std::size_t a, std::size_t b) {
    const double aa = std::atan2(p[a][1] - p[pivot][1], p[a][0] - p[pivot][0]);
    const double ab = std::atan2(p[b][1] - p[pivot][1], p[b][0] - p[pivot][0]);
    if (aa != ab) return aa < ab;
    return dist(a) < dist(b);
  });
  std::vector<std::size_t> h{pivot};
  for (std::size_t i : rest) {
    while (h.size() >= 2 && cross(h[h.size() - 2], h.back(), i) <= 0) h.pop_back();
    h.push_back(i);
  }
  return h;
}

inline std::vector<irm::Point> random_points(std::size_t n, std::size_t d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<irm::Point> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].id = i;
    out[i].coords.resize(d);
    for (double& x : out[i].coords) x = u(rng);
  }
  return out;
}

}  // namespace oracle
