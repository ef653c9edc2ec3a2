#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qps/dispersion.hpp"

namespace qps {

struct Gap {
  MultiIndex label;  // canonical representative of {m, -m}
  double e_minus = 0.0, e_plus = 0.0;
  double err = 0.0;
  bool closed = false;
  double width() const { return e_plus - e_minus; }
};

// Labeled gap structure: bottom of the spectrum, one gap per canonical label
// with 0 < |m|_1 <= M (closed gaps kept at zero width so the labels stay a
// complete enumeration), and a proven bound on the total length of every
// unlisted gap.
struct GapCatalog {
  double bottom = 0.0;
  double bottom_err = 0.0;
  std::vector<Gap> gaps;  // sorted by (|m|_1, lex)
  int label_radius = 0;   // M
  double tail_mass = 0.0; // upper bound on sum of unlisted gap lengths
  int nu = 1;
  double eps = 0.0, kappa0 = 1.0;
  std::vector<MultiIndex> unresolved;  // labels whose edges failed; voids certificates
  bool norm_tie = false;
  bool overlap = false;  // some pair of listed gaps overlaps beyond err

  bool certifiable() const { return unresolved.empty() && !norm_tie && !overlap; }
};

GapCatalog build_catalog(const FourierPotential& p, int M, int N, int threads = 1,
                         std::size_t dim_cap = 20000);

// Upper bound on the cumulative shell sum  sum_{|m|_1 >= R} exp(-kappa0 |m|_1 / 2)
// over Z^nu: exact shell counts until the terms are negligible, then a proven
// geometric closure.
double shell_tail_sum(int nu, double kappa0, int R);

// Proven upper bound on 2 eps sum_{|m|_1 > M} exp(-kappa0 |m|_1 / 2).
double gap_tail_bound(double eps, double kappa0, int nu, int M);

struct DecayReport {
  bool pass = true;
  double worst_margin = std::numeric_limits<double>::infinity();
  MultiIndex worst_label;
  std::vector<std::string> findings;
};

// Width of every gap against 2 eps exp(-kappa0 |m|/2) + 2 err.
DecayReport verify_gap_decay(const GapCatalog& cat);

struct SeparationReport {
  bool pass = true;
  double worst_margin = std::numeric_limits<double>::infinity();
  MultiIndex worst_m, worst_m2;
  double fitted_a = std::numeric_limits<double>::infinity();  // strict fit, no err allowance
  double b = 0.0;
  std::vector<std::string> findings;
};

// Pairwise gap separation  dist([m], [m']) >= a |m'|^-b - 2(err_m + err_m')
// over canonical label pairs with |m'| >= |m|.
SeparationReport verify_gap_separation(const GapCatalog& cat, double a, double b);

// Distance of every gap to the spectral bottom against a |m|^-b.
SeparationReport verify_bottom_separation(const GapCatalog& cat, double a, double b);

struct InverseCoeffReport {
  double eps_prime = 0.0;  // least eps' with width(m) <= eps' exp(-kappa |m|) for all gaps
  double kappa = 0.0;
  bool conclusion_pass = true;
  double worst_margin = std::numeric_limits<double>::infinity();
  MultiIndex worst_coeff;
  std::vector<std::string> findings;
};

// Fits the gap-decay hypothesis at rate kappa, then checks the implied
// coefficient bound |c(m)| <= sqrt(eps') exp(-kappa |m| / 2). Requires
// kappa > 4 kappa0.
InverseCoeffReport inverse_coefficient_check(const FourierPotential& p,
                                             const GapCatalog& cat, double kappa);

}  // namespace qps
