#pragma once

#include <complex>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "qps/lattice.hpp"

namespace qps {

// Frequency vector omega in R^nu together with the Diophantine parameters
// (a0, b0) of the lower bound |n.omega| >= a0 |n|^-b0. Dimensionless: the
// plane-wave convention is e^{i x (n.omega + k)} with free dispersion k^2.
struct FrequencyVector {
  int nu = 1;
  std::vector<double> omega;
  double a0 = 0.5;
  double b0 = 2.0;

  FrequencyVector() = default;
  FrequencyVector(std::vector<double> w, double a0_, double b0_);

  double dot(const MultiIndex& n) const {
    double s = 0.0;
    for (int i = 0; i < nu; ++i) s += omega[i] * n[i];
    return s;
  }
};

// Quasi-periodic potential V(x) = sum_{n != 0} c(n) e^{i (n.omega) x} with
// hermitian-symmetric coefficients bounded by eps * exp(-kappa0 |n|_1).
// The coefficient map is plain data; validate_potential reports violations
// rather than construction refusing them.
struct FourierPotential {
  FrequencyVector freq;
  std::map<MultiIndex, std::complex<double>> coeffs;
  double eps = 0.0;     // eps >= 0; zero potential is allowed
  double kappa0 = 1.0;  // in (0, 1]

  FourierPotential() = default;
  FourierPotential(FrequencyVector f, std::map<MultiIndex, std::complex<double>> c,
                   double eps_, double kappa0_);

  double coeff_l1() const;      // sum of |c(n)|
  int support_radius() const;   // max |n|_1 over stored coefficients (0 if none)
};

struct PotentialViolation {
  MultiIndex n;
  std::string inequality;  // the violated constraint, both sides evaluated
  double lhs = 0.0, rhs = 0.0;
};

struct ValidationReport {
  std::vector<PotentialViolation> violations;
  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

ValidationReport validate_potential(const FourierPotential& p);

// V(x); the imaginary part of the sum (|Im| < 1e-12 * sum|c| for hermitian
// maps) is discarded.
double eval_potential(const FourierPotential& p, double x);

struct DegenerateFrequencyError : std::runtime_error {
  MultiIndex dependency;
  explicit DegenerateFrequencyError(MultiIndex n);
};

struct DiophantineScan {
  double worst_ratio = 0.0;  // min over box of |n.omega| * |n|_1^b0
  MultiIndex worst_n;        // canonical representative attaining it
  double min_denominator = 0.0;  // min over box of |n.omega|
  MultiIndex min_denominator_n;
  int box_radius = 0;
  bool holds(double a0) const { return worst_ratio >= a0; }
};

// Scans 0 < |n|_1 <= N. The Diophantine condition is only ever certified on
// the finite box. Throws DegenerateFrequencyError if some n.omega == 0.
DiophantineScan diophantine_scan(const FrequencyVector& f, int N, int threads = 1);

}  // namespace qps
