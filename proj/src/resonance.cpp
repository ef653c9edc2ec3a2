#include "qps/resonance.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace qps {

double resonance_point(const MultiIndex& n, const FrequencyVector& f) {
  if (is_zero(n)) throw std::invalid_argument("resonance_point: n must be nonzero");
  return -0.5 * f.dot(n);
}

double window_radius(const MultiIndex& n, const FrequencyVector& f) {
  if (is_zero(n)) throw std::invalid_argument("window_radius: n must be nonzero");
  return f.a0 * std::pow(1.0 + l1_norm(n), -f.b0 - 3.0);
}

ResonantIndices resonant_indices(double k, const FrequencyVector& f, int N) {
  if (N < 1) throw std::invalid_argument("resonant_indices: N must be >= 1");
  ResonantIndices out;
  for_each_in_ball(f.nu, N, [&](const MultiIndex& n) {
    if (is_zero(n)) return;
    if (std::abs(k - resonance_point(n, f)) < window_radius(n, f))
      out.points.push_back(n);
  });
  std::sort(out.points.begin(), out.points.end(), NormLexLess{});
  for (std::size_t i = 1; i < out.points.size(); ++i)
    if (l1_norm(out.points[i - 1]) == l1_norm(out.points[i])) out.norm_tie = true;
  return out;
}

NonresonantError::NonresonantError(double k_)
    : std::runtime_error("no resonance window contains k within the search box"),
      k(k_) {}

std::vector<MultiIndex> cluster_from_indices(const std::vector<MultiIndex>& indices) {
  if (indices.empty())
    throw std::invalid_argument("cluster_from_indices: need at least one index");
  std::set<MultiIndex> s;
  s.insert(MultiIndex(indices[0].size(), 0));
  s.insert(indices[0]);
  for (std::size_t l = 1; l < indices.size(); ++l) {
    std::set<MultiIndex> reflected;
    for (const auto& m : s) reflected.insert(sub(indices[l], m));
    s.insert(reflected.begin(), reflected.end());
  }
  std::vector<MultiIndex> out(s.begin(), s.end());
  std::sort(out.begin(), out.end(), NormLexLess{});
  return out;
}

ResonanceCluster build_cluster(double k, const FrequencyVector& f, int N) {
  ResonantIndices ri = resonant_indices(k, f, N);
  if (ri.empty()) throw NonresonantError(k);
  ResonanceCluster c;
  c.k = k;
  c.indices = ri.points;
  c.cluster = cluster_from_indices(ri.points);
  c.search_radius = N;
  c.norm_tie = ri.norm_tie;
  return c;
}

}  // namespace qps
