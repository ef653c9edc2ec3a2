#pragma once

#include <map>
#include <stdexcept>
#include <string>

#include "qps/homogeneity.hpp"
#include "qps/ids.hpp"

namespace qps::cli {

// Exit-code contract of every subcommand.
inline constexpr int kOk = 0;           // all checks pass
inline constexpr int kFindings = 1;     // a verifier failed, witness in the report
inline constexpr int kUsage = 2;        // input/usage error
inline constexpr int kNumerical = 3;    // numerical non-convergence / budget

struct ConfigError : std::runtime_error {
  ConfigError(int line_, const std::string& msg);
  int line;  // 1-based; 0 when not tied to a line
};

// Line-based problem definition: `key = value` plus `coeff n1 ... re im`
// lines, '#' comments. Unknown keys are errors.
struct ProblemConfig {
  // potential
  int nu = 0;
  std::vector<double> omega;
  double a0 = 0.0, b0 = 0.0;
  double eps = 0.0, kappa0 = 0.0;
  std::map<MultiIndex, std::complex<double>> coeffs;
  // run parameters (documented defaults)
  int M = 4;
  int N = 0;  // 0 -> M + 2
  double sigma_min = 1e-3, sigma_max = 10.0, tau = 0.5;
  double a = 0.0;  // 0 -> fitted empirically
  double b = 0.0;  // 0 -> 4 * b0
  double eps0 = 1e-2;
  double L = 2000.0, h = 0.02;
  int threads = 1;

  std::string raw_text;  // verbatim config, embedded in reports
  std::string digest;    // fnv-1a of raw_text

  FourierPotential potential() const;
  int box_radius() const { return N > 0 ? N : M + 2; }
  double b_effective() const { return b > 0.0 ? b : 4.0 * b0; }
};

ProblemConfig parse_config(const std::string& text);

std::string write_catalog_csv(const GapCatalog& cat);
GapCatalog read_catalog_csv(const std::string& csv);

// Subcommands: validate, dispersion, gaps, certify, replay, oracle, all.
// Writes artifacts under out_dir and prints a one-line summary per step.
int run_command(const std::string& command, const ProblemConfig& cfg,
                const std::string& out_dir);

}  // namespace qps::cli
