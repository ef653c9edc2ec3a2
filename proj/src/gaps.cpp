#include "qps/gaps.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qps/parallel.hpp"

namespace qps {

namespace {
std::string label_str(const MultiIndex& m) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < m.size(); ++i) os << (i ? "," : "") << m[i];
  os << ")";
  return os.str();
}
}  // namespace

double shell_tail_sum(int nu, double kappa0, int R) {
  if (R < 1) R = 1;
  const double x = std::exp(-0.5 * kappa0);
  double sum = 0.0;
  int r = R;
  for (;; ++r) {
    const double term = shell_count(nu, r) * std::pow(x, r);
    sum += term;
    if (r > R && term < 1e-30 * sum) break;
    if (r > R + 100000) break;  // unreachable at sane kappa0; hard stop
  }
  // Geometric closure over the majorant 2^nu C(r+nu-1, nu-1) x^r, whose term
  // ratio x (r+nu)/(r+1) is decreasing in r.
  const double q = x * (double(r) + 1.0 + nu) / (double(r) + 2.0);
  if (q < 1.0) {
    sum += shell_count_bound(nu, r + 1) * std::pow(x, r + 1) / (1.0 - q);
  } else {
    // extend until the closure ratio drops below 1 (x < 1 guarantees it does)
    int r2 = r;
    double term;
    do {
      ++r2;
      term = shell_count(nu, r2) * std::pow(x, r2);
      sum += term;
    } while (x * (double(r2) + 1.0 + nu) / (double(r2) + 2.0) >= 1.0);
    const double q2 = x * (double(r2) + 1.0 + nu) / (double(r2) + 2.0);
    sum += shell_count_bound(nu, r2 + 1) * std::pow(x, r2 + 1) / (1.0 - q2);
  }
  return sum;
}

double gap_tail_bound(double eps, double kappa0, int nu, int M) {
  if (M < 1) throw std::invalid_argument("gap_tail_bound: M must be >= 1");
  if (eps == 0.0) return 0.0;
  return 2.0 * eps * shell_tail_sum(nu, kappa0, M + 1);
}

GapCatalog build_catalog(const FourierPotential& p, int M, int N, int threads,
                         std::size_t dim_cap) {
  if (M < 1) throw std::invalid_argument("build_catalog: M must be >= 1");
  if (N < M + 2)
    throw std::invalid_argument("build_catalog: need N >= M + 2 so the box contains the labels");

  GapCatalog cat;
  cat.nu = p.freq.nu;
  cat.eps = p.eps;
  cat.kappa0 = p.kappa0;
  cat.label_radius = M;
  cat.tail_mass = gap_tail_bound(p.eps, p.kappa0, p.freq.nu, M);

  const DispersionSample ground = dispersion_at(p, 0.0, N, dim_cap);
  cat.bottom = ground.energy;
  cat.bottom_err = ground.trunc_error;

  std::vector<MultiIndex> labels;
  for_each_in_ball(p.freq.nu, M, [&](const MultiIndex& m) {
    if (!is_zero(m) && is_canonical(m)) labels.push_back(m);
  });
  std::sort(labels.begin(), labels.end(), NormLexLess{});

  struct Slot {
    bool ok = false;
    GapEdges edges;
  };
  std::vector<Slot> slots(labels.size());
  parallel_for(labels.size(), threads, [&](std::size_t i) {
    try {
      slots[i].edges = gap_edges(p, labels[i], N, dim_cap);
      slots[i].ok = true;
    } catch (const std::exception&) {
      slots[i].ok = false;
    }
  });

  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!slots[i].ok) {
      cat.unresolved.push_back(labels[i]);
      continue;
    }
    const GapEdges& e = slots[i].edges;
    if (!e.mass_ok) {
      cat.unresolved.push_back(labels[i]);
      continue;
    }
    if (e.e_minus < cat.bottom - e.err - cat.bottom_err) {
      // a gap below the spectral bottom is unsound; voids certificates
      cat.unresolved.push_back(labels[i]);
      continue;
    }
    Gap gp;
    gp.label = labels[i];
    gp.e_minus = e.e_minus;
    gp.e_plus = e.e_plus;
    gp.err = e.err;
    gp.closed = e.closed;
    cat.gaps.push_back(gp);
  }

  // Pairwise disjointness of the open gaps, up to err.
  std::vector<const Gap*> open;
  for (const auto& gpt : cat.gaps)
    if (!gpt.closed) open.push_back(&gpt);
  std::sort(open.begin(), open.end(),
            [](const Gap* a, const Gap* b) { return a->e_minus < b->e_minus; });
  for (std::size_t i = 1; i < open.size(); ++i)
    if (open[i]->e_minus < open[i - 1]->e_plus - open[i]->err - open[i - 1]->err)
      cat.overlap = true;
  return cat;
}

DecayReport verify_gap_decay(const GapCatalog& cat) {
  DecayReport rep;
  for (const auto& gp : cat.gaps) {
    const double bound =
        2.0 * cat.eps * std::exp(-0.5 * cat.kappa0 * l1_norm(gp.label)) + 2.0 * gp.err;
    const double margin = bound - gp.width();
    if (margin < rep.worst_margin) {
      rep.worst_margin = margin;
      rep.worst_label = gp.label;
    }
    if (margin < 0.0) {
      rep.pass = false;
      std::ostringstream os;
      os << "gap " << label_str(gp.label) << " width " << gp.width()
         << " exceeds 2*eps*exp(-kappa0|m|/2) + 2*err = " << bound;
      rep.findings.push_back(os.str());
    }
  }
  return rep;
}

SeparationReport verify_gap_separation(const GapCatalog& cat, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0))
    throw std::invalid_argument("verify_gap_separation: need a, b > 0");
  SeparationReport rep;
  rep.b = b;
  for (std::size_t i = 0; i < cat.gaps.size(); ++i) {
    for (std::size_t j = i + 1; j < cat.gaps.size(); ++j) {
      const Gap& g1 = cat.gaps[i];
      const Gap& g2 = cat.gaps[j];
      // the bound uses the larger-norm label
      const Gap& hi = l1_norm(g2.label) >= l1_norm(g1.label) ? g2 : g1;
      const double dist =
          std::max({0.0, g1.e_minus - g2.e_plus, g2.e_minus - g1.e_plus});
      const double allowance = 2.0 * (g1.err + g2.err);
      const double bound = a * std::pow(l1_norm(hi.label), -b);
      const double margin = dist - (bound - allowance);
      if (margin < rep.worst_margin) {
        rep.worst_margin = margin;
        rep.worst_m = g1.label;
        rep.worst_m2 = g2.label;
      }
      rep.fitted_a = std::min(rep.fitted_a, dist * std::pow(l1_norm(hi.label), b));
      if (margin < 0.0) {
        rep.pass = false;
        std::ostringstream os;
        os << "gaps " << label_str(g1.label) << " and " << label_str(g2.label)
           << " at distance " << dist << " violate a|m'|^-b = " << bound;
        rep.findings.push_back(os.str());
      }
    }
  }
  return rep;
}

SeparationReport verify_bottom_separation(const GapCatalog& cat, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0))
    throw std::invalid_argument("verify_bottom_separation: need a, b > 0");
  SeparationReport rep;
  rep.b = b;
  for (const auto& gp : cat.gaps) {
    const double dist = gp.e_minus - cat.bottom;
    const double allowance = 2.0 * (gp.err + cat.bottom_err);
    const double bound = a * std::pow(l1_norm(gp.label), -b);
    const double margin = dist - (bound - allowance);
    if (margin < rep.worst_margin) {
      rep.worst_margin = margin;
      rep.worst_m = gp.label;
    }
    rep.fitted_a = std::min(rep.fitted_a, dist * std::pow(l1_norm(gp.label), b));
    if (margin < 0.0) {
      rep.pass = false;
      std::ostringstream os;
      os << "gap " << label_str(gp.label) << " sits " << dist
         << " above the bottom, below a|m|^-b = " << bound;
      rep.findings.push_back(os.str());
    }
  }
  return rep;
}

InverseCoeffReport inverse_coefficient_check(const FourierPotential& p,
                                             const GapCatalog& cat, double kappa) {
  if (!(kappa > 4.0 * cat.kappa0))
    throw std::invalid_argument("inverse_coefficient_check: need kappa > 4 kappa0");
  InverseCoeffReport rep;
  rep.kappa = kappa;
  for (const auto& gp : cat.gaps)
    rep.eps_prime = std::max(rep.eps_prime, gp.width() * std::exp(kappa * l1_norm(gp.label)));

  const double root = std::sqrt(rep.eps_prime);
  for (const auto& [n, c] : p.coeffs) {
    const double bound = root * std::exp(-0.5 * kappa * l1_norm(n));
    const double margin = bound - std::abs(c);
    if (margin < rep.worst_margin) {
      rep.worst_margin = margin;
      rep.worst_coeff = n;
    }
    if (margin < 0.0) {
      rep.conclusion_pass = false;
      std::ostringstream os;
      os << "|c" << label_str(n) << "| = " << std::abs(c)
         << " exceeds sqrt(eps')exp(-kappa|m|/2) = " << bound;
      rep.findings.push_back(os.str());
    }
  }
  return rep;
}

}  // namespace qps
