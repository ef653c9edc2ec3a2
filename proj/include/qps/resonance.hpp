#pragma once

#include <stdexcept>
#include <vector>

#include "qps/potential.hpp"

namespace qps {

// Resonance point k_n = -(n.omega)/2. Rejects n = 0.
double resonance_point(const MultiIndex& n, const FrequencyVector& f);

// Half-width delta(n) = a0 (1 + |n|_1)^(-b0-3) of the open window around k_n.
double window_radius(const MultiIndex& n, const FrequencyVector& f);

struct ResonantIndices {
  std::vector<MultiIndex> points;  // sorted by (|n|_1, lex)
  bool norm_tie = false;  // two resonant indices share an l1 norm; downgrades
                          // downstream certificates to advisory
  bool empty() const { return points.empty(); }
};

// All n with 0 < |n|_1 <= N and |k - k_n| < delta(n) (strict: open window).
ResonantIndices resonant_indices(double k, const FrequencyVector& f, int N);

struct NonresonantError : std::runtime_error {
  explicit NonresonantError(double k);
  double k;
};

struct ResonanceCluster {
  double k = 0.0;
  std::vector<MultiIndex> indices;  // n^(0), ..., n^(l(k)), ordered
  std::vector<MultiIndex> cluster;  // reflection-generated set, (l1, lex) sorted
  int search_radius = 0;
  bool norm_tie = false;
};

// The reflection recursion: start from {0, n^(0)} and fold in T_{n^(l)}(S)
// = { n^(l) - s : s in S } for each successive index.
std::vector<MultiIndex> cluster_from_indices(const std::vector<MultiIndex>& indices);

// Cluster of k over the box |n|_1 <= N. Throws NonresonantError when no
// window contains k within the box.
ResonanceCluster build_cluster(double k, const FrequencyVector& f, int N);

}  // namespace qps
