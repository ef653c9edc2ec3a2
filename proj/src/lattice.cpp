#include "qps/lattice.hpp"

#include <algorithm>
#include <cmath>

namespace qps {

std::vector<MultiIndex> ball_points(int nu, int radius) {
  std::vector<MultiIndex> pts;
  pts.reserve(ball_size(nu, radius));
  for_each_in_ball(nu, radius, [&](const MultiIndex& n) { pts.push_back(n); });
  std::sort(pts.begin(), pts.end(), NormLexLess{});
  return pts;
}

namespace {
double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * double(n - k + i) / double(i);
  return r;
}
}  // namespace

double shell_count(int nu, int r) {
  if (r < 0) return 0.0;
  if (r == 0) return 1.0;
  // choose k nonzero coordinates, sign each, compose r into k positive parts
  double s = 0.0;
  for (int k = 1; k <= std::min(nu, r); ++k)
    s += std::ldexp(1.0, k) * binomial(nu, k) * binomial(r - 1, k - 1);
  return s;
}

double shell_count_bound(int nu, int r) {
  return std::ldexp(1.0, nu) * binomial(r + nu - 1, nu - 1);
}

}  // namespace qps
