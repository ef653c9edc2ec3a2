#include "qps/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#define LAPACK_COMPLEX_CUSTOM
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace qps {

using cd = std::complex<double>;

BoxTooLargeError::BoxTooLargeError(std::size_t dim_, std::size_t cap_)
    : std::runtime_error("Galerkin dimension " + std::to_string(dim_) +
                         " exceeds the configured cap " + std::to_string(cap_)),
      dim(dim_), cap(cap_) {}

NonConvergenceError::NonConvergenceError(const std::string& what_, double residual_)
    : std::runtime_error(what_ + " (attained residual " + std::to_string(residual_) + ")"),
      residual(residual_) {}

AmbiguousSelectionError::AmbiguousSelectionError(double k_, double a, double b)
    : std::runtime_error("ambiguous Floquet selection near k = " + std::to_string(k_) +
                         ": top |v(0)| values " + std::to_string(a) + " and " +
                         std::to_string(b) + " differ by < 1e-3"),
      k(k_), v0_first(a), v0_second(b) {}

ClusterOverlapError::ClusterOverlapError(std::size_t n)
    : std::runtime_error("resonance cluster overflows the dimension cap (size " +
                         std::to_string(n) + ")"),
      cluster_size(n) {}

GalerkinOperator build_matrix(const FourierPotential& p, double k, int N,
                              std::size_t dim_cap) {
  if (N < 1) throw std::invalid_argument("build_matrix: N must be >= 1");
  const std::size_t dim = ball_size(p.freq.nu, N);
  if (dim > dim_cap) throw BoxTooLargeError(dim, dim_cap);

  GalerkinOperator g;
  g.k = k;
  g.box_radius = N;
  g.basis = ball_points(p.freq.nu, N);
  for (std::size_t i = 0; i < g.basis.size(); ++i)
    g.index.emplace(g.basis[i], static_cast<int>(i));

  const int n = static_cast<int>(dim);
  g.matrix = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const double q = p.freq.dot(g.basis[i]) + k;
    g.matrix(i, i) = q * q;
  }
  for (int b = 0; b < n; ++b) {
    for (const auto& [j, c] : p.coeffs) {
      if (is_zero(j)) continue;  // invalid data; validate_potential reports it
      MultiIndex na = g.basis[b];
      for (std::size_t d = 0; d < na.size(); ++d) na[d] += j[d];
      const int a = g.index_of(na);
      if (a >= 0) g.matrix(a, b) += c;
    }
  }
  return g;
}

Eigensolution eigensolve_hermitian(const Eigen::MatrixXcd& M) {
  const int n = static_cast<int>(M.rows());
  if (M.cols() != n || n < 1)
    throw std::invalid_argument("eigensolve_hermitian: matrix must be square");
  const double max_abs = M.cwiseAbs().maxCoeff();
  const double herm_dev = (M - M.adjoint()).cwiseAbs().maxCoeff();
  if (herm_dev > 1e-12 * std::max(max_abs, 1e-300))
    throw std::invalid_argument("eigensolve_hermitian: matrix is not hermitian to 1e-12");

  Eigensolution sol;
  sol.vectors = M;
  sol.values.resize(n);
  const int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', n, sol.vectors.data(), n,
                                  sol.values.data());
  if (info != 0)
    throw NonConvergenceError("zheevd failed to converge (info = " + std::to_string(info) + ")",
                              std::numeric_limits<double>::infinity());

  const double norm_m =
      std::max({std::abs(sol.values(0)), std::abs(sol.values(n - 1)), 1e-300});
  const double tol = 1e-10 * norm_m;
  std::vector<int> cols;
  if (n <= 128) {
    cols.resize(n);
    for (int i = 0; i < n; ++i) cols[i] = i;
  } else {
    for (int s = 0; s < 64; ++s) cols.push_back(static_cast<int>((std::size_t)s * (n - 1) / 63));
    cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
  }
  for (int i : cols) {
    const double res = (M * sol.vectors.col(i) - sol.values(i) * sol.vectors.col(i)).norm();
    if (!(res <= tol))
      throw NonConvergenceError("eigenpair residual exceeds 1e-10 * ||M||", res);
  }
  return sol;
}

namespace {

// Band view of the Galerkin operator in lexicographic basis order; compact
// coefficient support keeps the bandwidth ~ support * (box side).
struct BandModel {
  int n = 0;
  int kd = 0;
  std::vector<MultiIndex> basis;  // lexicographic
  Eigen::VectorXd diag;
  std::vector<cd> supp_c;
  std::vector<std::vector<int>> plus;  // plus[b][t] = index of basis[b] + supp_j[t]

  static BandModel build(const FourierPotential& p, double k, int N) {
    BandModel m;
    m.basis.reserve(ball_size(p.freq.nu, N));
    for_each_in_ball(p.freq.nu, N, [&](const MultiIndex& x) { m.basis.push_back(x); });
    m.n = static_cast<int>(m.basis.size());
    std::map<MultiIndex, int> index;
    for (int i = 0; i < m.n; ++i) index.emplace(m.basis[i], i);

    m.diag.resize(m.n);
    for (int i = 0; i < m.n; ++i) {
      const double q = p.freq.dot(m.basis[i]) + k;
      m.diag(i) = q * q;
    }
    std::vector<MultiIndex> supp_j;
    for (const auto& [j, c] : p.coeffs) {
      if (is_zero(j)) continue;
      supp_j.push_back(j);
      m.supp_c.push_back(c);
    }
    m.plus.assign(m.n, std::vector<int>(supp_j.size(), -1));
    for (int b = 0; b < m.n; ++b) {
      for (std::size_t t = 0; t < supp_j.size(); ++t) {
        MultiIndex na = m.basis[b];
        for (std::size_t d = 0; d < na.size(); ++d) na[d] += supp_j[t][d];
        auto it = index.find(na);
        if (it != index.end()) {
          m.plus[b][t] = it->second;
          m.kd = std::max(m.kd, std::abs(it->second - b));
        }
      }
    }
    return m;
  }

  // y = (A - shift) x
  void matvec(const Eigen::VectorXcd& x, double shift, Eigen::VectorXcd& y) const {
    y = (diag.array() - shift).matrix().asDiagonal() * x;
    for (int b = 0; b < n; ++b) {
      const cd xb = x(b);
      if (xb == cd(0.0, 0.0)) continue;
      const auto& row = plus[b];
      for (std::size_t t = 0; t < row.size(); ++t)
        if (row[t] >= 0) y(row[t]) += supp_c[t] * xb;
    }
  }
};

struct RefineResult {
  double theta = 0.0;  // Rayleigh estimate of the nearby big-box eigenvalue
  double bracket = 0.0;  // |lambda - theta| <= bracket for some true eigenvalue
};

// One deterministic banded shifted solve from the padded small-box vector;
// the hermitian residual bound certifies the result.
RefineResult band_refine(const BandModel& m, double shift_in, const Eigen::VectorXcd& seed) {
  const int kl = m.kd, ku = m.kd, ldab = 2 * kl + ku + 1;

  Eigen::VectorXcd v = seed;
  const double seed_norm = v.norm();
  if (seed_norm == 0.0) return {shift_in, std::numeric_limits<double>::infinity()};
  v /= seed_norm;

  Eigen::VectorXcd resid(m.n);
  m.matvec(v, shift_in, resid);
  const double seed_residual = resid.norm();

  double shift = shift_in;
  for (int attempt = 0; attempt < 3; ++attempt) {
    std::vector<cd> ab((std::size_t)ldab * m.n, cd(0.0, 0.0));
    const auto at = [&](int a, int b) -> cd& {
      return ab[(std::size_t)b * ldab + (kl + ku + a - b)];
    };
    for (int b = 0; b < m.n; ++b) {
      at(b, b) = m.diag(b) - shift;
      const auto& row = m.plus[b];
      for (std::size_t t = 0; t < row.size(); ++t)
        if (row[t] >= 0) at(row[t], b) += m.supp_c[t];
    }
    std::vector<lapack_int> ipiv(m.n);
    const int info = LAPACKE_zgbtrf(LAPACK_COL_MAJOR, m.n, m.n, kl, ku, ab.data(), ldab,
                                    ipiv.data());
    if (info != 0) {  // exact singularity: nudge the shift and refactor
      shift = shift_in + std::pow(10.0, 4.0 * attempt) * 1e-12 * (1.0 + std::abs(shift_in));
      continue;
    }
    Eigen::VectorXcd w = v;
    bool ok = true;
    for (int pass = 0; pass < 2 && ok; ++pass) {
      const int si = LAPACKE_zgbtrs(LAPACK_COL_MAJOR, 'N', m.n, kl, ku, 1, ab.data(), ldab,
                                    ipiv.data(), w.data(), m.n);
      const double nw = w.norm();
      if (si != 0 || !std::isfinite(nw) || nw == 0.0) ok = false;
      else w /= nw;
    }
    if (!ok) break;
    Eigen::VectorXcd aw(m.n);
    m.matvec(w, 0.0, aw);
    const double theta = w.dot(aw).real();  // Eigen dot conjugates the lhs
    const double r = (aw - theta * w).norm();
    if (std::isfinite(theta) && std::isfinite(r)) return {theta, r};
    break;
  }
  // Fallback: the seed itself brackets an eigenvalue within its residual.
  return {shift_in, seed_residual};
}

int refinement_radius(int nu, int N, std::size_t dim_cap) {
  int nr = 2 * N;
  while (nr > N + 1 && ball_size(nu, nr) > dim_cap) --nr;
  return nr;
}

// Truncation bracket for an eigenpair of the box-N problem against box nr.
double truncation_bracket(const FourierPotential& p, double k, int nr, double energy,
                          const std::vector<MultiIndex>& small_basis,
                          const Eigen::VectorXcd& small_vec) {
  const BandModel big = BandModel::build(p, k, nr);
  std::map<MultiIndex, int> big_index;
  for (int i = 0; i < big.n; ++i) big_index.emplace(big.basis[i], i);
  Eigen::VectorXcd seed = Eigen::VectorXcd::Zero(big.n);
  for (std::size_t i = 0; i < small_basis.size(); ++i)
    seed(big_index.at(small_basis[i])) = small_vec(static_cast<int>(i));
  const RefineResult r = band_refine(big, energy, seed);
  return std::abs(energy - r.theta) + r.bracket;
}

struct Selection {
  int best = -1;
  double v0_best = 0.0, v0_second = 0.0;
};

Selection select_by_v0(const Eigensolution& sol, int i0, double k) {
  Selection s;
  const int n = static_cast<int>(sol.values.size());
  double best_dist = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double a = std::abs(sol.vectors(i0, i));
    const double dist = std::abs(sol.values(i) - k * k);
    if (a > s.v0_best || (a == s.v0_best && dist < best_dist)) {
      s.v0_second = s.v0_best;
      s.v0_best = a;
      s.best = i;
      best_dist = dist;
    } else if (a > s.v0_second) {
      s.v0_second = a;
    }
  }
  return s;
}

double neville_at_zero(const std::vector<double>& xs, std::vector<double> fs) {
  const std::size_t n = xs.size();
  for (std::size_t m = 1; m < n; ++m)
    for (std::size_t i = 0; i + m < n; ++i)
      fs[i] = (xs[i] * fs[i + 1] - xs[i + m] * fs[i]) / (xs[i] - xs[i + m]);
  return fs[0];
}

}  // namespace

DispersionSample dispersion_at(const FourierPotential& p, double k, int N,
                               std::size_t dim_cap) {
  const GalerkinOperator g = build_matrix(p, k, N, dim_cap);
  const Eigensolution sol = eigensolve_hermitian(g.matrix);
  const int i0 = g.index_of(MultiIndex(p.freq.nu, 0));
  const Selection sel = select_by_v0(sol, i0, k);
  if (sel.v0_best - sel.v0_second < 1e-3)
    throw AmbiguousSelectionError(k, sel.v0_best, sel.v0_second);

  DispersionSample s;
  s.k = k;
  s.energy = sol.values(sel.best);
  s.box_radius = N;
  const cd v0 = sol.vectors(i0, sel.best);
  for (std::size_t i = 0; i < g.basis.size(); ++i)
    s.phi.emplace(g.basis[i], sol.vectors(static_cast<int>(i), sel.best) / v0);
  s.phi[MultiIndex(p.freq.nu, 0)] = cd(1.0, 0.0);  // exact by construction

  const int nr = refinement_radius(p.freq.nu, N, dim_cap);
  s.trunc_error = truncation_bracket(p, k, nr, s.energy, g.basis, sol.vectors.col(sel.best));
  return s;
}

GapEdges gap_edges(const FourierPotential& p, const MultiIndex& m, int N,
                   std::size_t dim_cap) {
  if (is_zero(m)) throw std::invalid_argument("gap_edges: label must be nonzero");
  if (l1_norm(m) > N)
    throw std::invalid_argument("gap_edges: box must contain the label (|m| <= N)");
  const double mw = p.freq.dot(m);
  if (mw == 0.0) throw DegenerateFrequencyError(m);
  const MultiIndex ms = mw > 0.0 ? negated(m) : m;  // resonance point at +|m.omega|/2
  const double kstar = 0.5 * std::abs(mw);

  const ResonanceCluster cl = build_cluster(kstar, p.freq, N);
  if (cl.cluster.size() > dim_cap) throw ClusterOverlapError(cl.cluster.size());

  const GalerkinOperator g = build_matrix(p, kstar, N, dim_cap);
  const Eigensolution sol = eigensolve_hermitian(g.matrix);
  const int i0 = g.index_of(MultiIndex(p.freq.nu, 0));
  const int im = g.index_of(ms);

  int ia = -1, ib = -1;
  double ma = -1.0, mb = -1.0;  // two largest masses on {0, m}
  for (int i = 0; i < static_cast<int>(sol.values.size()); ++i) {
    const double mass =
        std::norm(sol.vectors(i0, i)) + std::norm(sol.vectors(im, i));
    if (mass > ma) {
      mb = ma; ib = ia;
      ma = mass; ia = i;
    } else if (mass > mb) {
      mb = mass; ib = i;
    }
  }
  if (sol.values(ia) > sol.values(ib)) std::swap(ia, ib);

  GapEdges out;
  out.mass_min = std::min(ma, mb);
  out.mass_ok = out.mass_min >= 0.9;
  const double lam_lo = sol.values(ia), lam_hi = sol.values(ib);
  out.raw_width = lam_hi - lam_lo;

  const int nr = refinement_radius(p.freq.nu, N, dim_cap);
  double err = std::max(
      truncation_bracket(p, kstar, nr, lam_lo, g.basis, sol.vectors.col(ia)),
      truncation_bracket(p, kstar, nr, lam_hi, g.basis, sol.vectors.col(ib)));

  // Method 2: one-sided limits. Samples must sit inside the window and, for
  // an open gap, inside the quadratic regime of the avoided crossing; outside
  // it the extrapolation converges to the crossing midpoint instead of the
  // edge and the reconciliation err saturates at width/2.
  double eta0 = std::min(window_radius(ms, p.freq) / 4.0, 1e-2);
  if (out.raw_width > 1e-11)
    eta0 = std::min(eta0, out.raw_width / (4.0 * (2.0 * kstar + 1.0)));
  for (int side = -1; side <= 1; side += 2) {
    std::vector<double> xs, fs;
    double sample_trunc = 0.0;
    for (int j = 0; j <= 4; ++j) {
      const double eta = eta0 * std::ldexp(1.0, -j);
      try {
        const DispersionSample smp = dispersion_at(p, kstar + side * eta, N, dim_cap);
        xs.push_back(eta);
        fs.push_back(smp.energy);
        sample_trunc = std::max(sample_trunc, smp.trunc_error);
      } catch (const AmbiguousSelectionError&) {
        // strong two-level mixing at this eta; drop the sample
      }
    }
    if (xs.size() < 2) continue;
    const double limit = neville_at_zero(xs, fs);
    ++out.method2_sides;
    err = std::max(err, sample_trunc);
    if (side < 0) {
      out.method2_minus = limit;
      err = std::max(err, std::abs(lam_lo - limit));
    } else {
      out.method2_plus = limit;
      err = std::max(err, std::abs(lam_hi - limit));
    }
  }

  out.err = err;
  if (out.raw_width <= std::max(1e-12, 10.0 * err)) {
    out.closed = true;
    const double mid = 0.5 * (lam_lo + lam_hi);
    out.e_minus = out.e_plus = mid;
  } else {
    out.e_minus = lam_lo;
    out.e_plus = lam_hi;
  }
  return out;
}

DispersionBoundsReport verify_dispersion_bounds(const FourierPotential& p, double k1,
                                                double k, double eps0, int N) {
  if (!(k1 > 0.0) || !(k - k1 > 0.0) || !(k - k1 < 0.25))
    throw std::invalid_argument(
        "verify_dispersion_bounds: need k1 > 0 and 0 < k - k1 < 1/4");
  const DispersionSample s1 = dispersion_at(p, k1, N);
  const DispersionSample s2 = dispersion_at(p, k, N);

  DispersionBoundsReport r;
  r.k0 = std::min(eps0, k / 1024.0);
  r.diff = s2.energy - s1.energy;
  r.lower_bound = r.k0 * r.k0 * (k - k1) * (k - k1);

  double window_sum = 0.0;
  for_each_in_ball(p.freq.nu, N, [&](const MultiIndex& n) {
    if (is_zero(n)) return;
    const double kn = resonance_point(n, p.freq);
    if (k1 < kn && kn < k) window_sum += window_radius(n, p.freq);
  });
  r.upper_bound = 2.0 * k * (k - k1) + 2.0 * p.eps * window_sum;
  r.lower_margin = r.diff - r.lower_bound;
  r.upper_margin = r.upper_bound - r.diff;
  r.trunc_allowance = s1.trunc_error + s2.trunc_error;
  r.pass = r.lower_margin > 0.0 && r.upper_margin > 0.0;
  return r;
}

FloquetResidual floquet_residual(const FourierPotential& p, const DispersionSample& s,
                                 std::span<const double> x_samples) {
  FloquetResidual out;
  for (double x : x_samples) {
    cd psi(0.0, 0.0), hpsi(0.0, 0.0);
    for (const auto& [n, c] : s.phi) {
      const double q = p.freq.dot(n) + s.k;
      const cd wave = std::exp(cd(0.0, q * x));
      psi += c * wave;
      hpsi += c * q * q * wave;  // -psi'' termwise
    }
    const double v = eval_potential(p, x);
    out.max_residual =
        std::max(out.max_residual, std::abs(hpsi + v * psi - s.energy * psi));
  }

  // Sup-norm bound on the part of V*psi that leaks outside the box.
  const int reach = s.box_radius + p.support_radius();
  for_each_in_ball(p.freq.nu, reach, [&](const MultiIndex& n) {
    if (l1_norm(n) <= s.box_radius) return;
    double amp = 0.0;
    for (const auto& [j, c] : p.coeffs) {
      auto it = s.phi.find(sub(n, j));
      if (it != s.phi.end()) amp += std::abs(c) * std::abs(it->second);
    }
    out.tail_bound += amp;
  });
  return out;
}

}  // namespace qps
