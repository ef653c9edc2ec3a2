#include "qps/potential.hpp"

#include <cmath>
#include <sstream>

#include "qps/parallel.hpp"

namespace qps {

FrequencyVector::FrequencyVector(std::vector<double> w, double a0_, double b0_)
    : nu(static_cast<int>(w.size())), omega(std::move(w)), a0(a0_), b0(b0_) {
  if (nu < 1) throw std::invalid_argument("FrequencyVector: nu must be >= 1");
  bool all_zero = true;
  for (double x : omega) {
    if (!std::isfinite(x)) throw std::invalid_argument("FrequencyVector: omega must be finite");
    if (x != 0.0) all_zero = false;
  }
  if (all_zero) throw std::invalid_argument("FrequencyVector: omega must not be zero");
  if (!(a0 > 0.0 && a0 < 1.0))
    throw std::invalid_argument("FrequencyVector: need 0 < a0 < 1");
  if (!(b0 > nu))
    throw std::invalid_argument("FrequencyVector: need b0 > nu (standing assumption)");
}

FourierPotential::FourierPotential(FrequencyVector f,
                                   std::map<MultiIndex, std::complex<double>> c,
                                   double eps_, double kappa0_)
    : freq(std::move(f)), coeffs(std::move(c)), eps(eps_), kappa0(kappa0_) {
  if (!(eps >= 0.0) || !std::isfinite(eps))
    throw std::invalid_argument("FourierPotential: need eps >= 0");
  if (!(kappa0 > 0.0 && kappa0 <= 1.0))
    throw std::invalid_argument("FourierPotential: need kappa0 in (0, 1]");
  for (const auto& [n, v] : coeffs) {
    if (static_cast<int>(n.size()) != freq.nu)
      throw std::invalid_argument("FourierPotential: coefficient index has wrong dimension");
    (void)v;
  }
}

double FourierPotential::coeff_l1() const {
  double s = 0.0;
  for (const auto& [n, v] : coeffs) s += std::abs(v);
  return s;
}

int FourierPotential::support_radius() const {
  int r = 0;
  for (const auto& [n, v] : coeffs) r = std::max(r, l1_norm(n));
  return r;
}

std::string ValidationReport::to_string() const {
  if (violations.empty()) return "ok\n";
  std::ostringstream os;
  for (const auto& v : violations) {
    os << "violation at n = (";
    for (std::size_t i = 0; i < v.n.size(); ++i) os << (i ? "," : "") << v.n[i];
    os << "): " << v.inequality << "  [lhs = " << v.lhs << ", rhs = " << v.rhs << "]\n";
  }
  return os.str();
}

ValidationReport validate_potential(const FourierPotential& p) {
  ValidationReport rep;
  for (const auto& [n, c] : p.coeffs) {
    if (is_zero(n)) {
      rep.violations.push_back({n, "coefficient at origin forbidden", std::abs(c), 0.0});
      continue;
    }
    const double bound = p.eps * std::exp(-p.kappa0 * l1_norm(n));
    if (std::abs(c) > bound)
      rep.violations.push_back({n, "|c(n)| <= eps*exp(-kappa0*|n|)", std::abs(c), bound});
    auto it = p.coeffs.find(negated(n));
    if (it == p.coeffs.end()) {
      rep.violations.push_back({n, "conj(c(n)) = c(-n): mirror coefficient missing",
                                std::abs(c), 0.0});
    } else {
      const std::complex<double> diff = std::conj(c) - it->second;
      const double tol = 1e-15 * (std::abs(c) + 1.0);
      if (std::abs(diff) > tol)
        rep.violations.push_back({n, "conj(c(n)) = c(-n)", std::abs(diff), tol});
    }
  }
  return rep;
}

double eval_potential(const FourierPotential& p, double x) {
  std::complex<double> s(0.0, 0.0);
  for (const auto& [n, c] : p.coeffs)
    s += c * std::exp(std::complex<double>(0.0, p.freq.dot(n) * x));
  return s.real();
}

DegenerateFrequencyError::DegenerateFrequencyError(MultiIndex n)
    : std::runtime_error("rationally dependent frequency vector: n.omega == 0"),
      dependency(std::move(n)) {}

DiophantineScan diophantine_scan(const FrequencyVector& f, int N, int threads) {
  if (N < 1) throw std::invalid_argument("diophantine_scan: N must be >= 1");

  struct Local {
    double worst_ratio = std::numeric_limits<double>::infinity();
    MultiIndex worst_n;
    double min_den = std::numeric_limits<double>::infinity();
    MultiIndex min_den_n;
    MultiIndex degenerate;  // empty unless an exact zero was found
  };

  const std::vector<MultiIndex> pts = ball_points(f.nu, N);
  const auto consider = [&](Local& loc, const MultiIndex& n) {
    if (is_zero(n) || !is_canonical(n)) return;  // ratio(n) == ratio(-n)
    const double den = std::abs(f.dot(n));
    if (den == 0.0) {
      if (loc.degenerate.empty()) loc.degenerate = n;
      return;
    }
    const double norm = l1_norm(n);
    const double ratio = den * std::pow(norm, f.b0);
    if (ratio < loc.worst_ratio || (ratio == loc.worst_ratio && n < loc.worst_n)) {
      loc.worst_ratio = ratio;
      loc.worst_n = n;
    }
    if (den < loc.min_den || (den == loc.min_den && n < loc.min_den_n)) {
      loc.min_den = den;
      loc.min_den_n = n;
    }
  };

  std::vector<Local> locals = parallel_partition<Local>(
      pts.size(), threads,
      [&](Local& loc, std::size_t i) { consider(loc, pts[i]); });

  Local best;
  for (const auto& loc : locals) {
    if (!loc.degenerate.empty() &&
        (best.degenerate.empty() || NormLexLess{}(loc.degenerate, best.degenerate)))
      best.degenerate = loc.degenerate;
    if (loc.worst_n.empty()) continue;
    if (loc.worst_ratio < best.worst_ratio ||
        (loc.worst_ratio == best.worst_ratio &&
         (best.worst_n.empty() || loc.worst_n < best.worst_n))) {
      best.worst_ratio = loc.worst_ratio;
      best.worst_n = loc.worst_n;
    }
    if (loc.min_den < best.min_den ||
        (loc.min_den == best.min_den &&
         (best.min_den_n.empty() || loc.min_den_n < best.min_den_n))) {
      best.min_den = loc.min_den;
      best.min_den_n = loc.min_den_n;
    }
  }
  if (!best.degenerate.empty()) throw DegenerateFrequencyError(best.degenerate);

  DiophantineScan out;
  out.worst_ratio = best.worst_ratio;
  out.worst_n = best.worst_n;
  out.min_denominator = best.min_den;
  out.min_denominator_n = best.min_den_n;
  out.box_radius = N;
  return out;
}

}  // namespace qps
