#pragma once

#include <cstddef>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <vector>

namespace qps {

// Lattice point in Z^nu. All norms in this project are l1.
using MultiIndex = std::vector<int>;

inline int l1_norm(const MultiIndex& n) {
  int s = 0;
  for (int c : n) s += std::abs(c);
  return s;
}

inline bool is_zero(const MultiIndex& n) {
  for (int c : n)
    if (c != 0) return false;
  return true;
}

inline MultiIndex negated(const MultiIndex& n) {
  MultiIndex r(n.size());
  for (std::size_t i = 0; i < n.size(); ++i) r[i] = -n[i];
  return r;
}

inline MultiIndex sub(const MultiIndex& a, const MultiIndex& b) {
  MultiIndex r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

// Representative of {n, -n} with the first nonzero component positive.
inline MultiIndex canonical_rep(const MultiIndex& n) {
  for (int c : n) {
    if (c > 0) return n;
    if (c < 0) return negated(n);
  }
  return n;
}

inline bool is_canonical(const MultiIndex& n) {
  for (int c : n) {
    if (c > 0) return true;
    if (c < 0) return false;
  }
  return true;  // zero
}

// (l1 norm, lexicographic) order; the deterministic order used everywhere.
struct NormLexLess {
  bool operator()(const MultiIndex& a, const MultiIndex& b) const {
    const int na = l1_norm(a), nb = l1_norm(b);
    if (na != nb) return na < nb;
    return a < b;
  }
};

namespace detail {
inline void ball_recurse(MultiIndex& cur, int dim, int nu, int budget,
                         const std::function<void(const MultiIndex&)>& fn) {
  if (dim == nu) {
    fn(cur);
    return;
  }
  for (int c = -budget; c <= budget; ++c) {
    cur[dim] = c;
    ball_recurse(cur, dim + 1, nu, budget - std::abs(c), fn);
  }
}
}  // namespace detail

// Visits every n in Z^nu with |n|_1 <= radius (including 0), lexicographic order.
inline void for_each_in_ball(int nu, int radius,
                             const std::function<void(const MultiIndex&)>& fn) {
  if (nu < 1) throw std::invalid_argument("for_each_in_ball: nu must be >= 1");
  if (radius < 0) return;
  MultiIndex cur(nu, 0);
  detail::ball_recurse(cur, 0, nu, radius, fn);
}

inline std::size_t ball_size(int nu, int radius) {
  // #{|n|_1 <= r} via Pascal recursion in the dimension.
  std::vector<std::size_t> row(radius + 1, 1);  // nu = 0
  for (int d = 1; d <= nu; ++d) {
    std::vector<std::size_t> next(radius + 1, 0);
    for (int r = 0; r <= radius; ++r) {
      std::size_t s = row[r];  // c_d = 0
      for (int c = 1; c <= r; ++c) s += 2 * row[r - c];
      next[r] = s;
    }
    row.swap(next);
  }
  return row[radius];
}

// All |n|_1 <= radius sorted by (l1, lex).
std::vector<MultiIndex> ball_points(int nu, int radius);

// Exact #{m in Z^nu : |m|_1 = r}.
double shell_count(int nu, int r);

// 2^nu * C(r+nu-1, nu-1) >= shell_count(nu, r); its term ratio is monotone,
// which makes geometric tail closures provable.
double shell_count_bound(int nu, int r);

}  // namespace qps
