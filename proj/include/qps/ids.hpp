#pragma once

#include <span>
#include <vector>

#include "qps/gaps.hpp"

namespace qps {

// Real-space cross-check of the Fourier-side spectrum: second-order finite
// differences on [0, L], eigenvalue counting by Sturm pivots, integrated
// density of states (counts below E per unit length) under both Dirichlet
// and Neumann truncation.
struct FiniteDifferenceModel {
  double L = 0.0;
  double h = 0.0;
  std::vector<double> potential;  // sampled at the grid points i*h, i = 0..L/h

  static FiniteDifferenceModel build(const FourierPotential& p, double L, double h);
  int grid_points() const { return static_cast<int>(potential.size()); }

  // # eigenvalues < E of the truncated operator.
  int count_below_dirichlet(double E) const;
  int count_below_neumann(double E) const;
};

struct IllConditionedError : std::runtime_error {
  IllConditionedError(double h2v);
  double h2_max_v;
};

struct IdsValue {
  double dirichlet = 0.0;
  double neumann = 0.0;
  double mid() const { return 0.5 * (dirichlet + neumann); }
};

// IDS bracket at each energy of E_grid. Dirichlet undercounts and Neumann
// overcounts the bulk value, both within O(1/L). Throws IllConditionedError
// if h^2 * sum|c| > 0.1.
std::vector<IdsValue> ids_estimate(const FourierPotential& p, double L, double h,
                                   std::span<const double> E_grid, int threads = 1);

struct GapLabelCheck {
  MultiIndex label;
  bool resolvable = false;  // gap wider than the local FD level spacing 2*pi*sqrt(E)/L
  double plateau = 0.0;     // IDS at the gap midpoint (Dirichlet/Neumann mean)
  double expected = 0.0;    // |m.omega| / (2 pi)
  double variation = 0.0;   // IDS spread across the gap probes
  bool constant_ok = false;
  bool label_ok = false;
  double fd_e_minus = 0.0, fd_e_plus = 0.0;  // plateau boundaries by bisection
};

struct GapLabelReport {
  std::vector<GapLabelCheck> checks;
  bool pass = true;  // over the resolvable gaps
  int resolvable_count = 0;
};

// Checks that the IDS is flat across every resolvable catalog gap (within
// 2/L) and that the plateau value matches the label, |m.omega|/(2 pi),
// within 5/L. Also reports the FD band edges bracketing each gap.
GapLabelReport gap_label_check(const GapCatalog& cat, const FourierPotential& p,
                               double L, double h);

}  // namespace qps
