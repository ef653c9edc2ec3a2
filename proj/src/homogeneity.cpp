#include "qps/homogeneity.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

namespace qps {

SpectrumSet SpectrumSet::from_catalog(const GapCatalog& cat) {
  SpectrumSet s;
  s.bottom = cat.bottom;
  s.tail_allowance = cat.tail_mass;
  for (const auto& gp : cat.gaps) {
    const double lo = gp.e_minus - gp.err;
    const double hi = gp.e_plus + gp.err;
    if (hi > lo) s.gaps.emplace_back(lo, hi);
  }
  std::sort(s.gaps.begin(), s.gaps.end());
  for (std::size_t i = 1; i < s.gaps.size(); ++i)
    if (s.gaps[i].first < s.gaps[i - 1].second)
      throw std::invalid_argument("SpectrumSet: widened gaps overlap");
  if (!cat.unresolved.empty())
    s.advisory_flags.push_back("unresolved gap labels in the catalog");
  if (cat.norm_tie) s.advisory_flags.push_back("resonant-index norm tie");
  if (cat.overlap) s.advisory_flags.push_back("overlapping listed gaps");
  return s;
}

MeasureBounds intersect_measure(const SpectrumSet& s, double E, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("intersect_measure: sigma must be > 0");
  const double lo = std::max(E - sigma, s.bottom);
  const double hi = E + sigma;
  double measure = std::max(0.0, hi - lo);
  if (measure > 0.0) {
    // gaps are sorted and disjoint; subtract each overlap
    for (const auto& [glo, ghi] : s.gaps) {
      if (ghi <= lo) continue;
      if (glo >= hi) break;
      measure -= std::max(0.0, std::min(hi, ghi) - std::max(lo, glo));
    }
  }
  MeasureBounds out;
  out.upper = measure;
  out.lower = std::max(0.0, measure - s.tail_allowance);
  return out;
}

BudgetExceededError::BudgetExceededError(long cells)
    : std::runtime_error("certification did not terminate within the refinement budget (" +
                         std::to_string(cells) + " cells)") {}

namespace {

struct Cell {
  double e_lo, e_hi, s_lo, s_hi;
};

}  // namespace

HomogeneityCertificate certify(const SpectrumSet& s, double tau, double sigma_min,
                               double sigma_max, const CertifyOptions& opt) {
  if (!(sigma_min > 0.0) || !(sigma_min < sigma_max))
    throw std::invalid_argument("certify: need 0 < sigma_min < sigma_max");

  HomogeneityCertificate cert;
  cert.tau_target = tau;
  cert.sigma_min = sigma_min;
  cert.sigma_max = sigma_max;
  cert.error_budget = s.tail_allowance;
  cert.min_tested_ratio = std::numeric_limits<double>::infinity();
  cert.min_ratio = std::numeric_limits<double>::infinity();

  const auto note_node = [&](double E, double sigma) {
    const MeasureBounds mb = intersect_measure(s, E, sigma);
    ++cert.tested_points;
    const double ratio = mb.lower / sigma;
    if (ratio < cert.min_tested_ratio) {
      cert.min_tested_ratio = ratio;
      cert.witness_E = E;
      cert.witness_sigma = sigma;
    }
    if (!cert.has_fail_witness && mb.upper / sigma <= tau) {
      cert.has_fail_witness = true;
      cert.fail_E = E;
      cert.fail_sigma = sigma;
      cert.fail_ratio = mb.upper / sigma;
    }
    return mb;
  };

  // Dedicated nodes: the bottom and every gap endpoint, over a geometric
  // sigma grid. These are the extremal windows.
  {
    std::vector<double> energies{s.bottom};
    for (const auto& [lo, hi] : s.gaps) {
      if (lo >= s.bottom) energies.push_back(lo);
      if (hi >= s.bottom) energies.push_back(hi);
    }
    const double ratio_step = std::pow(2.0, 0.25);
    for (double E : energies)
      for (double sg = sigma_min; sg < sigma_max * ratio_step; sg *= ratio_step)
        note_node(E, std::min(sg, sigma_max));
  }

  // Band segmentation of [bottom, E_cap]; beyond E_cap a window cannot touch
  // any gap and the remote bound applies.
  const double last_hi = s.gaps.empty() ? s.bottom : s.gaps.back().second;
  const double e_cap = std::max(s.bottom + 2.0 * sigma_max, last_hi + sigma_max) + 1.0;
  const double remote_bound = 2.0 - s.tail_allowance / sigma_min;

  std::deque<Cell> work;
  {
    double band_lo = s.bottom;
    auto push_band = [&](double lo, double hi) {
      if (hi <= lo) return;
      const int slices = static_cast<int>(std::ceil(std::log2(sigma_max / sigma_min)));
      double sl = sigma_min;
      for (int i = 0; i < slices; ++i) {
        const double sh = (i + 1 == slices) ? sigma_max : sl * 2.0;
        work.push_back({lo, hi, sl, sh});
        sl = sh;
      }
    };
    for (const auto& [glo, ghi] : s.gaps) {
      push_band(band_lo, std::min(glo, e_cap));
      band_lo = ghi;
      if (band_lo >= e_cap) break;
    }
    push_band(band_lo, e_cap);
  }

  long cells = 0;
  double family_min = remote_bound;
  // gap endpoints are the extremal windows; an uncertifiable dedicated node
  // already settles the verdict
  bool obstructed = cert.min_tested_ratio <= tau;
  while (!obstructed && !work.empty()) {
    if (++cells > opt.max_cells) throw BudgetExceededError(cells);
    const Cell c = work.front();
    work.pop_front();
    const double e_mid = 0.5 * (c.e_lo + c.e_hi);
    const MeasureBounds mb = note_node(e_mid, c.s_lo);
    // the node itself is inside the certification family: if its best
    // certifiable ratio is already <= tau, no refinement can ever succeed
    if (mb.lower / c.s_lo <= tau) {
      family_min = std::min(family_min, mb.lower / c.s_lo);
      obstructed = true;
      break;
    }
    const double bound = (mb.lower - (c.e_hi - c.e_lo)) / c.s_hi;
    if (bound > tau) {
      family_min = std::min(family_min, bound);
      continue;
    }
    if (cert.has_fail_witness) break;
    // refine whichever direction loses more
    const double e_loss = (c.e_hi - c.e_lo) / c.s_hi;
    const double s_loss = mb.lower / c.s_lo - mb.lower / c.s_hi;
    if (e_loss >= s_loss && c.e_hi - c.e_lo > 1e-14 * std::max(1.0, std::abs(e_mid))) {
      work.push_back({c.e_lo, e_mid, c.s_lo, c.s_hi});
      work.push_back({e_mid, c.e_hi, c.s_lo, c.s_hi});
    } else if (c.s_hi / c.s_lo > 1.0 + 1e-12) {
      const double s_mid = std::sqrt(c.s_lo * c.s_hi);
      work.push_back({c.e_lo, c.e_hi, c.s_lo, s_mid});
      work.push_back({c.e_lo, c.e_hi, s_mid, c.s_hi});
    } else {
      // numerically exhausted cell: report its bound as the family infimum
      family_min = std::min(family_min, bound);
      obstructed = true;
      break;
    }
  }

  cert.min_ratio = std::min(family_min, cert.min_tested_ratio);
  if (cert.has_fail_witness)
    cert.verdict = HomogeneityCertificate::Verdict::fail;
  else if (!obstructed && work.empty() && family_min > tau)
    cert.verdict = s.advisory_flags.empty() ? HomogeneityCertificate::Verdict::pass
                                            : HomogeneityCertificate::Verdict::advisory;
  else
    cert.verdict = HomogeneityCertificate::Verdict::fail;
  return cert;
}

ConstantsTooWeakError::ConstantsTooWeakError()
    : std::runtime_error("separation constants too weak: no sigma0 > 0 closes the "
                         "small-sigma branch") {}

ProofReplayReport proof_replay(const GapCatalog& cat, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("proof_replay: need a, b > 0");

  ProofReplayReport rep;
  rep.a = a;
  rep.b = b;
  rep.alpha = std::pow(0.5 * a, 1.0 / b);
  rep.beta = 1.0 / b;

  for (const auto& gp : cat.gaps) rep.listed_mass += gp.width();
  rep.total_mass = rep.listed_mass + cat.tail_mass;
  rep.sigma_large = 2.0 * rep.total_mass;

  if (cat.eps == 0.0) {
    rep.sigma0_unbounded = true;
    rep.sigma0 = std::numeric_limits<double>::infinity();
    rep.large_branch_ok = true;
    rep.large_branch_margin = std::numeric_limits<double>::infinity();
    rep.covers_all_sigma = true;
    rep.summary = "zero potential: both branches hold for every sigma";
    return rep;
  }

  // The threshold ceil(alpha sigma^-beta) is the step function R(sigma); on
  // the step with value R the inequality is tightest at the left edge
  // sigma_left(R) = (a/2) R^-b, so it fails somewhere iff
  // 4 eps T(R) > sigma_left(R), with T the shell tail sum.
  const double x = std::exp(-0.5 * cat.kappa0);
  int last_fail = 0;
  for (int R = 1;; ++R) {
    const double lhs = 4.0 * cat.eps * shell_tail_sum(cat.nu, cat.kappa0, R);
    const double sigma_left = 0.5 * a * std::pow(double(R), -b);
    const bool fail = lhs >= sigma_left;
    if (fail) last_fail = R;
    if (!fail) {
      // all larger R pass once the per-step ratio of lhs/rhs drops below 1
      const double q = x * (double(R) + 1.0 + cat.nu) / (double(R) + 2.0);
      if (q * std::pow((double(R) + 1.0) / double(R), b) < 1.0) break;
    }
    if (R > 2000000) throw ConstantsTooWeakError();
  }

  if (last_fail == 0) {
    rep.sigma0_unbounded = true;
    rep.sigma0 = std::numeric_limits<double>::infinity();
  } else {
    const double edge = 0.5 * a * std::pow(double(last_fail), -b);
    rep.sigma0 = std::nextafter(edge, 0.0);
    if (!(rep.sigma0 > 0.0)) throw ConstantsTooWeakError();
  }

  if (rep.sigma0_unbounded) {
    rep.large_branch_ok = true;
    rep.large_branch_margin = std::numeric_limits<double>::infinity();
    rep.covers_all_sigma = true;
  } else {
    rep.large_branch_margin = 0.5 * rep.sigma0 - rep.total_mass;
    rep.large_branch_ok = rep.large_branch_margin > 0.0;
    rep.covers_all_sigma = rep.large_branch_ok || rep.sigma_large <= rep.sigma0;
  }

  std::ostringstream os;
  os << "small-sigma branch holds for sigma <= " << rep.sigma0
     << "; large-sigma branch holds for sigma > " << rep.sigma_large
     << (rep.covers_all_sigma ? "; branches meet: tau = 1/2 for every sigma"
                              : "; branches do not meet: interval in between is uncovered");
  rep.summary = os.str();
  return rep;
}

}  // namespace qps
