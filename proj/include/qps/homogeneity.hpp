#pragma once

#include <string>
#include <vector>

#include "qps/gaps.hpp"

namespace qps {

// The spectrum model [bottom, inf) minus the listed gaps, widened by err on
// each side so every measure computed against it lower-bounds the truth;
// tail_allowance accounts for unlisted gaps (subtracted once per window).
struct SpectrumSet {
  double bottom = 0.0;
  std::vector<std::pair<double, double>> gaps;  // open intervals, sorted, disjoint
  double tail_allowance = 0.0;
  std::vector<std::string> advisory_flags;

  // Throws std::invalid_argument if the widened gaps overlap.
  static SpectrumSet from_catalog(const GapCatalog& cat);
};

struct MeasureBounds {
  double lower = 0.0;  // exact minus tail_allowance, clamped at 0
  double upper = 0.0;  // exact over the listed-gap model
};

// Lebesgue measure of (E - sigma, E + sigma) intersected with the model set,
// by sorted-interval sweep. Rejects sigma <= 0.
MeasureBounds intersect_measure(const SpectrumSet& s, double E, double sigma);

struct CertifyOptions {
  long max_cells = 8'000'000;  // refinement budget before signaling non-termination
};

struct BudgetExceededError : std::runtime_error {
  explicit BudgetExceededError(long cells);
};

struct HomogeneityCertificate {
  double tau_target = 0.5;
  double sigma_min = 0.0, sigma_max = 0.0;
  long tested_points = 0;
  double min_ratio = 0.0;         // certified family bound incl. interpolation loss
  double min_tested_ratio = 0.0;  // exact lower/sigma at tested nodes
  double witness_E = 0.0, witness_sigma = 0.0;  // argmin over tested nodes
  enum class Verdict { pass, fail, advisory } verdict = Verdict::fail;
  double error_budget = 0.0;  // the tail allowance folded into every window
  std::string provenance;
  bool has_fail_witness = false;
  double fail_E = 0.0, fail_sigma = 0.0, fail_ratio = 0.0;

  const char* verdict_str() const {
    switch (verdict) {
      case Verdict::pass: return "PASS";
      case Verdict::fail: return "FAIL";
      default: return "ADVISORY";
    }
  }
};

// Certifies inf over E in the set, sigma in [sigma_min, sigma_max] of
// |window cap S| / sigma > tau, by adaptive cell refinement: per cell the
// window measure is monotone in sigma and 2-Lipschitz in E, so
// (lower(E_mid, s_lo) - (E_hi - E_lo)) / s_hi bounds the whole cell.
// Energies beyond every gap are closed by one analytic remote bound.
HomogeneityCertificate certify(const SpectrumSet& s, double tau, double sigma_min,
                               double sigma_max, const CertifyOptions& opt = {});

struct ConstantsTooWeakError : std::runtime_error {
  ConstantsTooWeakError();
};

struct ProofReplayReport {
  double alpha = 0.0, beta = 0.0;  // alpha = (a/2)^(1/b), beta = 1/b
  double a = 0.0, b = 0.0;
  double sigma0 = 0.0;          // small-sigma branch holds for all sigma <= sigma0
  bool sigma0_unbounded = false;
  double listed_mass = 0.0;     // sum of listed gap widths
  double total_mass = 0.0;      // listed + tail bound
  double large_branch_margin = 0.0;  // sigma0/2 - total_mass
  bool large_branch_ok = false;
  double sigma_large = 0.0;     // 2 * total_mass; windows above this always pass
  bool covers_all_sigma = false;
  std::string summary;
};

// Replays the two-branch case analysis behind the tau = 1/2 certification:
// finds the largest sigma0 with 2 eps sum_{|m| >= ceil(alpha sigma^-beta)}
// e^{-kappa0 |m|/2} < sigma/2 for every sigma <= sigma0, then checks whether
// the total gap mass closes the large-sigma branch at sigma0. Throws
// ConstantsTooWeakError when no sigma0 > 0 exists.
ProofReplayReport proof_replay(const GapCatalog& cat, double a, double b);

}  // namespace qps
