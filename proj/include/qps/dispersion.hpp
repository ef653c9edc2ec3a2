#pragma once

#include <Eigen/Dense>
#include <complex>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>

#include "qps/resonance.hpp"

namespace qps {

// Fourier-basis truncation of -d^2/dx^2 + V to the box |n|_1 <= N:
// entry(n,n') = (n.omega + k)^2 [n = n'] + c(n - n').
struct GalerkinOperator {
  double k = 0.0;
  int box_radius = 0;
  std::vector<MultiIndex> basis;  // (l1, lex) sorted
  std::map<MultiIndex, int> index;
  Eigen::MatrixXcd matrix;

  int index_of(const MultiIndex& n) const {
    auto it = index.find(n);
    return it == index.end() ? -1 : it->second;
  }
};

struct BoxTooLargeError : std::runtime_error {
  BoxTooLargeError(std::size_t dim, std::size_t cap);
  std::size_t dim, cap;
};

GalerkinOperator build_matrix(const FourierPotential& p, double k, int N,
                              std::size_t dim_cap = 20000);

struct NonConvergenceError : std::runtime_error {
  NonConvergenceError(const std::string& what, double residual);
  double residual;
};

struct Eigensolution {
  Eigen::VectorXd values;    // ascending
  Eigen::MatrixXcd vectors;  // orthonormal columns
};

// Dense hermitian eigensolve (LAPACK zheevd). Rejects matrices that are not
// hermitian to 1e-12 relative tolerance; verifies ||Mv - lambda v|| <=
// 1e-10 ||M|| on the returned pairs (all columns for n <= 128, a fixed
// 64-column sample above) and signals non-convergence otherwise.
Eigensolution eigensolve_hermitian(const Eigen::MatrixXcd& M);

struct AmbiguousSelectionError : std::runtime_error {
  AmbiguousSelectionError(double k, double v0_first, double v0_second);
  double k, v0_first, v0_second;
};

// One point of the Floquet parametrization: E(k) and the coefficient vector
// phi(.;k) normalized to phi(0;k) = 1, with a truncation-error bracket from
// one refinement at box 2N.
struct DispersionSample {
  double k = 0.0;
  double energy = 0.0;
  std::map<MultiIndex, std::complex<double>> phi;
  double trunc_error = 0.0;
  int box_radius = 0;
};

DispersionSample dispersion_at(const FourierPotential& p, double k, int N,
                               std::size_t dim_cap = 20000);

struct ClusterOverlapError : std::runtime_error {
  explicit ClusterOverlapError(std::size_t cluster_size);
  std::size_t cluster_size;
};

struct GapEdges {
  double e_minus = 0.0, e_plus = 0.0;  // method-1 values (midpoint when closed)
  double err = 0.0;
  bool closed = false;
  bool mass_ok = true;      // both selected eigenvectors carried >= 90% mass on {0, m}
  double mass_min = 1.0;    // smaller of the two masses
  int method2_sides = 0;    // one-sided limits that produced a usable extrapolation
  double raw_width = 0.0;   // method-1 width before the closed-gap threshold
  std::optional<double> method2_minus, method2_plus;
};

// Edges of the gap labeled m: method 1 diagonalizes at k = |k_m| exactly and
// takes the two eigenpairs dominating {0, m}; method 2 Richardson-extrapolates
// dispersion_at(|k_m| +- eta_j) one-sidedly. Returns method-1 values with
// err = max(truncation bracket, |method1 - method2|). Widths below
// max(1e-12, 10 err) are reported closed (zero width).
GapEdges gap_edges(const FourierPotential& p, const MultiIndex& m, int N,
                   std::size_t dim_cap = 20000);

struct DispersionBoundsReport {
  bool pass = false;
  double k0 = 0.0;           // min(eps0, k/1024)
  double diff = 0.0;         // E(k) - E(k1)
  double lower_bound = 0.0;  // (k0)^2 (k-k1)^2
  double upper_bound = 0.0;  // 2k(k-k1) + 2 eps * sum of window radii between
  double lower_margin = 0.0, upper_margin = 0.0;
  double trunc_allowance = 0.0;
};

// Two-sided monotonicity bounds on E(k) - E(k1) for 0 < k - k1 < 1/4, k1 > 0.
DispersionBoundsReport verify_dispersion_bounds(const FourierPotential& p, double k1,
                                                double k, double eps0, int N);

struct FloquetResidual {
  double max_residual = 0.0;  // max_x | -psi'' + V psi - E psi |
  double tail_bound = 0.0;    // sup-norm bound from the coefficients leaking
                              // outside the box
};

FloquetResidual floquet_residual(const FourierPotential& p, const DispersionSample& s,
                                 std::span<const double> x_samples);

}  // namespace qps
