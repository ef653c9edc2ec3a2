#include "qps/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "qps/format.hpp"
#include "qps/parallel.hpp"

namespace qps::cli {

namespace fs = std::filesystem;

ConfigError::ConfigError(int line_, const std::string& msg)
    : std::runtime_error(line_ > 0 ? "line " + std::to_string(line_) + ": " + msg : msg),
      line(line_) {}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

double parse_double(const std::string& tok, int line) {
  double v = 0.0;
  const char* b = tok.data();
  const char* e = tok.data() + tok.size();
  auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc() || res.ptr != e)
    throw ConfigError(line, "malformed number '" + tok + "'");
  return v;
}

long parse_int(const std::string& tok, int line) {
  long v = 0;
  const char* b = tok.data();
  const char* e = tok.data() + tok.size();
  auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc() || res.ptr != e)
    throw ConfigError(line, "malformed integer '" + tok + "'");
  return v;
}

std::string label_str(const MultiIndex& m) {
  std::string s = "(";
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(m[i]);
  }
  return s + ")";
}

}  // namespace

FourierPotential ProblemConfig::potential() const {
  return FourierPotential(FrequencyVector(omega, a0, b0), coeffs, eps, kappa0);
}

ProblemConfig parse_config(const std::string& text) {
  ProblemConfig cfg;
  cfg.raw_text = text;
  cfg.digest = digest_hex(text);

  struct Line {
    int no;
    std::string content;
  };
  std::vector<Line> lines;
  {
    std::istringstream is(text);
    std::string raw;
    int no = 0;
    while (std::getline(is, raw)) {
      ++no;
      const auto hash = raw.find('#');
      if (hash != std::string::npos) raw.resize(hash);
      const std::string t = trim(raw);
      if (!t.empty()) lines.push_back({no, t});
    }
  }

  // pass 1: nu (needed to parse omega and coeff lines)
  int nu_line = 0;
  for (const auto& ln : lines) {
    const auto eq = ln.content.find('=');
    if (eq == std::string::npos) continue;
    if (trim(ln.content.substr(0, eq)) != "nu") continue;
    if (nu_line) throw ConfigError(ln.no, "duplicate key 'nu'");
    nu_line = ln.no;
    const long v = parse_int(trim(ln.content.substr(eq + 1)), ln.no);
    if (v < 1 || v > 8) throw ConfigError(ln.no, "nu must be in [1, 8]");
    cfg.nu = static_cast<int>(v);
  }
  if (!cfg.nu) throw ConfigError(0, "missing required key 'nu'");

  std::map<std::string, int> seen{{"nu", nu_line}};
  const auto once = [&](const std::string& key, int line) {
    if (!seen.emplace(key, line).second)
      throw ConfigError(line, "duplicate key '" + key + "'");
  };

  for (const auto& ln : lines) {
    const auto toks0 = split_ws(ln.content);
    if (!toks0.empty() && toks0[0] == "coeff") {
      if (static_cast<int>(toks0.size()) != 1 + cfg.nu + 2)
        throw ConfigError(ln.no, "coeff line needs " + std::to_string(cfg.nu) +
                                     " integer components plus re and im");
      MultiIndex n(cfg.nu);
      for (int i = 0; i < cfg.nu; ++i) {
        const long v = parse_int(toks0[1 + i], ln.no);
        if (v < -1000000 || v > 1000000) throw ConfigError(ln.no, "coefficient index out of range");
        n[i] = static_cast<int>(v);
      }
      if (is_zero(n)) throw ConfigError(ln.no, "coefficient at origin forbidden");
      const double re = parse_double(toks0[1 + cfg.nu], ln.no);
      const double im = parse_double(toks0[2 + cfg.nu], ln.no);
      if (!cfg.coeffs.emplace(n, std::complex<double>(re, im)).second)
        throw ConfigError(ln.no, "duplicate coefficient at " + label_str(n));
      continue;
    }

    const auto eq = ln.content.find('=');
    if (eq == std::string::npos)
      throw ConfigError(ln.no, "expected 'key = value' or a coeff line");
    const std::string key = trim(ln.content.substr(0, eq));
    const std::string val = trim(ln.content.substr(eq + 1));
    if (val.empty()) throw ConfigError(ln.no, "empty value for key '" + key + "'");

    if (key == "nu") continue;  // handled in pass 1
    if (key == "omega") {
      once(key, ln.no);
      const auto toks = split_ws(val);
      if (static_cast<int>(toks.size()) != cfg.nu)
        throw ConfigError(ln.no, "omega needs exactly nu = " + std::to_string(cfg.nu) +
                                     " components");
      for (const auto& t : toks) cfg.omega.push_back(parse_double(t, ln.no));
    } else if (key == "a0") { once(key, ln.no); cfg.a0 = parse_double(val, ln.no); }
    else if (key == "b0") { once(key, ln.no); cfg.b0 = parse_double(val, ln.no); }
    else if (key == "eps") { once(key, ln.no); cfg.eps = parse_double(val, ln.no); }
    else if (key == "kappa0") { once(key, ln.no); cfg.kappa0 = parse_double(val, ln.no); }
    else if (key == "M") { once(key, ln.no); cfg.M = static_cast<int>(parse_int(val, ln.no)); }
    else if (key == "N") { once(key, ln.no); cfg.N = static_cast<int>(parse_int(val, ln.no)); }
    else if (key == "sigma_min") { once(key, ln.no); cfg.sigma_min = parse_double(val, ln.no); }
    else if (key == "sigma_max") { once(key, ln.no); cfg.sigma_max = parse_double(val, ln.no); }
    else if (key == "tau") { once(key, ln.no); cfg.tau = parse_double(val, ln.no); }
    else if (key == "a") { once(key, ln.no); cfg.a = parse_double(val, ln.no); }
    else if (key == "b") { once(key, ln.no); cfg.b = parse_double(val, ln.no); }
    else if (key == "eps0") { once(key, ln.no); cfg.eps0 = parse_double(val, ln.no); }
    else if (key == "L") { once(key, ln.no); cfg.L = parse_double(val, ln.no); }
    else if (key == "h") { once(key, ln.no); cfg.h = parse_double(val, ln.no); }
    else if (key == "threads") {
      once(key, ln.no);
      cfg.threads = static_cast<int>(parse_int(val, ln.no));
      if (cfg.threads < 1) throw ConfigError(ln.no, "threads must be >= 1");
    } else {
      throw ConfigError(ln.no, "unknown key '" + key + "'");
    }
  }

  for (const char* req : {"omega", "a0", "b0", "eps", "kappa0"})
    if (!seen.count(req)) throw ConfigError(0, std::string("missing required key '") + req + "'");

  // semantic checks, surfaced with the config vocabulary
  try {
    (void)cfg.potential();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(0, e.what());
  }
  if (cfg.M < 1) throw ConfigError(0, "M must be >= 1");
  if (cfg.N != 0 && cfg.N < cfg.M + 2)
    throw ConfigError(0, "N must be >= M + 2 (box must contain the gap labels)");
  if (!(cfg.sigma_min > 0.0) || !(cfg.sigma_max > cfg.sigma_min))
    throw ConfigError(0, "need 0 < sigma_min < sigma_max");
  if (!(cfg.tau > 0.0)) throw ConfigError(0, "tau must be > 0");
  if (!(cfg.eps0 > 0.0)) throw ConfigError(0, "eps0 must be > 0");
  if (!(cfg.L > 0.0) || !(cfg.h > 0.0)) throw ConfigError(0, "L and h must be > 0");
  if (cfg.a < 0.0 || cfg.b < 0.0) throw ConfigError(0, "a and b must be >= 0 (0 = fitted)");
  return cfg;
}

std::string write_catalog_csv(const GapCatalog& cat) {
  std::ostringstream os;
  os << "# nu = " << cat.nu << "\n";
  os << "# eps = " << fmt17(cat.eps) << "\n";
  os << "# kappa0 = " << fmt17(cat.kappa0) << "\n";
  os << "# M = " << cat.label_radius << "\n";
  os << "# bottom = " << fmt17(cat.bottom) << "\n";
  os << "# bottom_err = " << fmt17(cat.bottom_err) << "\n";
  os << "# tail_bound = " << fmt17(cat.tail_mass) << "\n";
  os << "# norm_tie = " << (cat.norm_tie ? 1 : 0) << "\n";
  os << "# overlap = " << (cat.overlap ? 1 : 0) << "\n";
  for (const auto& m : cat.unresolved) {
    os << "# unresolved =";
    for (int c : m) os << " " << c;
    os << "\n";
  }
  for (int i = 1; i <= cat.nu; ++i) os << "m" << i << ",";
  os << "e_minus,e_plus,err\n";
  for (const auto& gp : cat.gaps) {
    for (int c : gp.label) os << c << ",";
    os << fmt17(gp.e_minus) << "," << fmt17(gp.e_plus) << "," << fmt17(gp.err) << "\n";
  }
  return os.str();
}

GapCatalog read_catalog_csv(const std::string& csv) {
  GapCatalog cat;
  std::istringstream is(csv);
  std::string line;
  bool header_seen = false;
  int no = 0;
  while (std::getline(is, line)) {
    ++no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = trim(line.substr(1, eq - 1));
      const std::string val = trim(line.substr(eq + 1));
      if (key == "nu") cat.nu = static_cast<int>(parse_int(val, no));
      else if (key == "eps") cat.eps = parse_double(val, no);
      else if (key == "kappa0") cat.kappa0 = parse_double(val, no);
      else if (key == "M") cat.label_radius = static_cast<int>(parse_int(val, no));
      else if (key == "bottom") cat.bottom = parse_double(val, no);
      else if (key == "bottom_err") cat.bottom_err = parse_double(val, no);
      else if (key == "tail_bound") cat.tail_mass = parse_double(val, no);
      else if (key == "norm_tie") cat.norm_tie = parse_int(val, no) != 0;
      else if (key == "overlap") cat.overlap = parse_int(val, no) != 0;
      else if (key == "unresolved") {
        MultiIndex m;
        for (const auto& t : split_ws(val)) m.push_back(static_cast<int>(parse_int(t, no)));
        cat.unresolved.push_back(m);
      } else {
        throw ConfigError(no, "unknown catalog preamble key '" + key + "'");
      }
      continue;
    }
    if (!header_seen) {
      header_seen = true;  // column names are fixed by construction
      continue;
    }
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (static_cast<int>(cells.size()) != cat.nu + 3)
      throw ConfigError(no, "catalog row has wrong arity");
    Gap gp;
    gp.label.resize(cat.nu);
    for (int i = 0; i < cat.nu; ++i) gp.label[i] = static_cast<int>(parse_int(cells[i], no));
    gp.e_minus = parse_double(cells[cat.nu], no);
    gp.e_plus = parse_double(cells[cat.nu + 1], no);
    gp.err = parse_double(cells[cat.nu + 2], no);
    gp.closed = gp.e_plus == gp.e_minus;
    cat.gaps.push_back(gp);
  }
  if (!header_seen) throw ConfigError(0, "catalog has no header row");
  return cat;
}

namespace {

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << content;
}

void append_config(std::ostringstream& os, const ProblemConfig& cfg) {
  os << "## config\n" << cfg.raw_text;
  if (!cfg.raw_text.empty() && cfg.raw_text.back() != '\n') os << "\n";
}

struct StepResult {
  int code = kOk;
};

StepResult do_validate(const ProblemConfig& cfg, const fs::path& out) {
  const FourierPotential p = cfg.potential();
  const ValidationReport rep = validate_potential(p);

  std::ostringstream os;
  os << "potential validation\n";
  os << "config_digest = " << cfg.digest << "\n";
  os << "coefficients = " << p.coeffs.size() << "\n";
  os << "eps = " << fmt17(p.eps) << "\n";
  os << "kappa0 = " << fmt17(p.kappa0) << "\n";
  os << "invariant_violations = " << rep.violations.size() << "\n";
  os << rep.to_string();

  int code = rep.ok() ? kOk : kFindings;
  try {
    const DiophantineScan scan = diophantine_scan(p.freq, cfg.box_radius(), cfg.threads);
    os << "diophantine_box = " << scan.box_radius << "\n";
    os << "worst_ratio = " << fmt17(scan.worst_ratio) << " at " << label_str(scan.worst_n)
       << "\n";
    os << "min_denominator = " << fmt17(scan.min_denominator) << " at "
       << label_str(scan.min_denominator_n) << "\n";
    os << "diophantine_on_box = " << (scan.holds(p.freq.a0) ? "HOLDS" : "FAILS") << "\n";
    if (!scan.holds(p.freq.a0)) code = kFindings;
  } catch (const DegenerateFrequencyError& e) {
    os << "diophantine_on_box = DEGENERATE at " << label_str(e.dependency) << "\n";
    code = kUsage;
  }
  append_config(os, cfg);
  write_file(out / "validate_report.txt", os.str());
  std::cout << "validate: exit " << code << "\n";
  return {code};
}

StepResult do_dispersion(const ProblemConfig& cfg, const fs::path& out) {
  const FourierPotential p = cfg.potential();
  const int N = cfg.box_radius();
  double kmax = 1.0;
  for_each_in_ball(p.freq.nu, cfg.M, [&](const MultiIndex& m) {
    if (!is_zero(m)) kmax = std::max(kmax, std::abs(resonance_point(m, p.freq)));
  });
  kmax += 0.5;

  const int points = 257;
  struct Row {
    double k = 0.0, e = 0.0, trunc = 0.0;
    bool ok = false;
  };
  std::vector<Row> rows(points);
  parallel_for(points, cfg.threads, [&](std::size_t i) {
    rows[i].k = kmax * double(i) / double(points - 1);
    try {
      const DispersionSample s = dispersion_at(p, rows[i].k, N);
      rows[i].e = s.energy;
      rows[i].trunc = s.trunc_error;
      rows[i].ok = true;
    } catch (const AmbiguousSelectionError&) {
      rows[i].ok = false;
    }
  });

  std::ostringstream os;
  os << "k,E,trunc_error,status\n";
  for (const auto& r : rows) {
    if (r.ok)
      os << fmt17(r.k) << "," << fmt17(r.e) << "," << fmt17(r.trunc) << ",ok\n";
    else
      os << fmt17(r.k) << ",nan,nan,near-resonant\n";
  }
  write_file(out / "dispersion.csv", os.str());
  std::cout << "dispersion: " << points << " samples, exit 0\n";
  return {kOk};
}

GapCatalog make_catalog(const ProblemConfig& cfg) {
  return build_catalog(cfg.potential(), cfg.M, cfg.box_radius(), cfg.threads);
}

StepResult do_gaps(const ProblemConfig& cfg, const GapCatalog& cat, const fs::path& out) {
  write_file(out / "catalog.csv", write_catalog_csv(cat));

  const FourierPotential p = cfg.potential();
  const double b_eff = cfg.b_effective();
  const DecayReport decay = verify_gap_decay(cat);
  const SeparationReport sep = verify_gap_separation(cat, cfg.a > 0.0 ? cfg.a : 1.0, b_eff);
  const SeparationReport bot = verify_bottom_separation(cat, cfg.a > 0.0 ? cfg.a : 1.0, b_eff);

  std::ostringstream os;
  os << "gap catalog report\n";
  os << "config_digest = " << cfg.digest << "\n";
  os << "bottom = " << fmt17(cat.bottom) << " (err " << fmt17(cat.bottom_err) << ")\n";
  os << "tail_bound = " << fmt17(cat.tail_mass) << "\n";
  int open = 0;
  for (const auto& g : cat.gaps) open += g.closed ? 0 : 1;
  os << "labels = " << cat.gaps.size() << " (open " << open << ", closed "
     << cat.gaps.size() - open << ", unresolved " << cat.unresolved.size() << ")\n";
  for (const auto& m : cat.unresolved) os << "unresolved " << label_str(m) << "\n";
  os << "norm_tie = " << (cat.norm_tie ? 1 : 0) << "\n";
  os << "overlap = " << (cat.overlap ? 1 : 0) << "\n";
  os << "decay_check = " << (decay.pass ? "PASS" : "FAIL") << " worst_margin "
     << fmt17(decay.worst_margin) << " at " << label_str(decay.worst_label) << "\n";
  for (const auto& f : decay.findings) os << "  " << f << "\n";
  os << "separation_b = " << fmt17(b_eff) << "\n";
  os << "separation_fitted_a = " << fmt17(sep.fitted_a) << "\n";
  if (cfg.a > 0.0)
    os << "separation_check(a = " << fmt17(cfg.a) << ") = " << (sep.pass ? "PASS" : "FAIL")
       << " worst_margin " << fmt17(sep.worst_margin) << "\n";
  os << "bottom_fitted_a = " << fmt17(bot.fitted_a) << "\n";
  if (cfg.a > 0.0)
    os << "bottom_check(a = " << fmt17(cfg.a) << ") = " << (bot.pass ? "PASS" : "FAIL")
       << " worst_margin " << fmt17(bot.worst_margin) << "\n";

  int code = kOk;
  if (!cat.certifiable() || !decay.pass) code = kFindings;
  if (cfg.a > 0.0 && (!sep.pass || !bot.pass)) code = kFindings;

  const double kappa = 5.0 * cat.kappa0;
  const InverseCoeffReport inv = inverse_coefficient_check(p, cat, kappa);
  os << "inverse_check_kappa = " << fmt17(kappa) << "\n";
  os << "inverse_eps_prime = " << fmt17(inv.eps_prime) << "\n";
  os << "inverse_conclusion = " << (inv.conclusion_pass ? "PASS" : "FAIL")
     << " worst_margin " << fmt17(inv.worst_margin) << "\n";
  for (const auto& f : inv.findings) os << "  " << f << "\n";
  if (!inv.conclusion_pass) code = kFindings;

  append_config(os, cfg);
  write_file(out / "gaps_report.txt", os.str());
  std::cout << "gaps: " << cat.gaps.size() << " labels, exit " << code << "\n";
  return {code};
}

StepResult do_certify(const ProblemConfig& cfg, const GapCatalog& cat, const fs::path& out) {
  const SpectrumSet s = SpectrumSet::from_catalog(cat);
  const HomogeneityCertificate cert = certify(s, cfg.tau, cfg.sigma_min, cfg.sigma_max);

  std::ostringstream os;
  os << "homogeneity certificate\n";
  os << "config_digest = " << cfg.digest << "\n";
  os << "catalog_digest = " << digest_hex(write_catalog_csv(cat)) << "\n";
  os << "tau_target = " << fmt17(cert.tau_target) << "\n";
  os << "sigma_min = " << fmt17(cert.sigma_min) << "\n";
  os << "sigma_max = " << fmt17(cert.sigma_max) << "\n";
  os << "tested_points = " << cert.tested_points << "\n";
  os << "min_ratio = " << fmt17(cert.min_ratio) << "\n";
  os << "min_tested_ratio = " << fmt17(cert.min_tested_ratio) << " at E = "
     << fmt17(cert.witness_E) << ", sigma = " << fmt17(cert.witness_sigma) << "\n";
  os << "error_budget = " << fmt17(cert.error_budget) << "\n";
  for (const auto& f : s.advisory_flags) os << "advisory: " << f << "\n";
  if (cert.has_fail_witness)
    os << "fail_witness: E = " << fmt17(cert.fail_E) << ", sigma = " << fmt17(cert.fail_sigma)
       << ", upper_ratio = " << fmt17(cert.fail_ratio) << "\n";
  os << cert.verdict_str() << " " << fmt17(cert.min_ratio) << " " << fmt17(cert.tau_target)
     << " " << fmt17(cert.sigma_min) << " " << fmt17(cert.sigma_max) << "\n";
  append_config(os, cfg);
  write_file(out / "certificate.txt", os.str());

  const int code = cert.verdict == HomogeneityCertificate::Verdict::pass ? kOk : kFindings;
  std::cout << "certify: " << cert.verdict_str() << ", exit " << code << "\n";
  return {code};
}

StepResult do_replay(const ProblemConfig& cfg, const GapCatalog& cat, const fs::path& out) {
  const double b_eff = cfg.b_effective();
  const SeparationReport sep = verify_gap_separation(cat, cfg.a > 0.0 ? cfg.a : 1.0, b_eff);
  const SeparationReport bot = verify_bottom_separation(cat, cfg.a > 0.0 ? cfg.a : 1.0, b_eff);
  const double a_eff = cfg.a > 0.0 ? cfg.a : std::min(sep.fitted_a, bot.fitted_a);

  std::ostringstream os;
  os << "homogeneity proof replay\n";
  os << "config_digest = " << cfg.digest << "\n";
  os << "b = " << fmt17(b_eff) << (cfg.b > 0.0 ? " (input)\n" : " (default 4*b0)\n");
  os << "a = " << fmt17(a_eff) << (cfg.a > 0.0 ? " (input)\n" : " (fitted)\n");

  int code = kOk;
  if (!(a_eff > 0.0) || !std::isfinite(a_eff)) {
    os << "constants too weak: no usable separation constant\n";
    code = kFindings;
  } else {
    const SeparationReport sep2 = verify_gap_separation(cat, a_eff, b_eff);
    const SeparationReport bot2 = verify_bottom_separation(cat, a_eff, b_eff);
    os << "separation_check = " << (sep2.pass ? "PASS" : "FAIL") << "\n";
    os << "bottom_check = " << (bot2.pass ? "PASS" : "FAIL") << "\n";
    if (!sep2.pass || !bot2.pass) code = kFindings;
    try {
      const ProofReplayReport rep = proof_replay(cat, a_eff, b_eff);
      os << "alpha = " << fmt17(rep.alpha) << "\n";
      os << "beta = " << fmt17(rep.beta) << "\n";
      os << "sigma0 = " << fmt17(rep.sigma0) << "\n";
      os << "listed_gap_mass = " << fmt17(rep.listed_mass) << "\n";
      os << "total_gap_mass = " << fmt17(rep.total_mass) << "\n";
      os << "large_branch_margin = " << fmt17(rep.large_branch_margin) << " ("
         << (rep.large_branch_ok ? "PASS" : "FAIL") << ")\n";
      os << "sigma_large = " << fmt17(rep.sigma_large) << "\n";
      os << "covers_all_sigma = " << (rep.covers_all_sigma ? 1 : 0) << "\n";
      os << rep.summary << "\n";
    } catch (const ConstantsTooWeakError& e) {
      os << e.what() << "\n";
      code = kFindings;
    }
  }
  append_config(os, cfg);
  write_file(out / "replay_report.txt", os.str());
  std::cout << "replay: exit " << code << "\n";
  return {code};
}

StepResult do_oracle(const ProblemConfig& cfg, const GapCatalog& cat, const fs::path& out) {
  const FourierPotential p = cfg.potential();
  const GapLabelReport rep = gap_label_check(cat, p, cfg.L, cfg.h);

  std::ostringstream os;
  os << "finite-difference ids cross-check\n";
  os << "config_digest = " << cfg.digest << "\n";
  os << "L = " << fmt17(cfg.L) << "\n";
  os << "h = " << fmt17(cfg.h) << "\n";
  os << "resolvable_gaps = " << rep.resolvable_count << "\n";
  for (const auto& c : rep.checks) {
    os << "gap " << label_str(c.label);
    if (!c.resolvable) {
      os << ": below FD resolution\n";
      continue;
    }
    os << ": plateau = " << fmt17(c.plateau) << ", expected = " << fmt17(c.expected)
       << ", variation = " << fmt17(c.variation) << ", constant "
       << (c.constant_ok ? "PASS" : "FAIL") << ", label " << (c.label_ok ? "PASS" : "FAIL")
       << ", fd_edges = [" << fmt17(c.fd_e_minus) << ", " << fmt17(c.fd_e_plus) << "]\n";
  }
  os << "overall = " << (rep.pass ? "PASS" : "FAIL") << "\n";
  append_config(os, cfg);
  write_file(out / "oracle_report.txt", os.str());

  const int code = rep.pass ? kOk : kFindings;
  std::cout << "oracle: exit " << code << "\n";
  return {code};
}

}  // namespace

int run_command(const std::string& command, const ProblemConfig& cfg,
                const std::string& out_dir) {
  const fs::path out(out_dir);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) {
    std::cerr << "cannot create output directory " << out_dir << "\n";
    return kUsage;
  }

  try {
    if (command == "validate") return do_validate(cfg, out).code;
    if (command == "dispersion") return do_dispersion(cfg, out).code;
    if (command == "gaps") return do_gaps(cfg, make_catalog(cfg), out).code;
    if (command == "certify") return do_certify(cfg, make_catalog(cfg), out).code;
    if (command == "replay") return do_replay(cfg, make_catalog(cfg), out).code;
    if (command == "oracle") return do_oracle(cfg, make_catalog(cfg), out).code;
    if (command == "all") {
      int code = do_validate(cfg, out).code;
      if (code == kUsage) return code;
      code = std::max(code, do_dispersion(cfg, out).code);
      const GapCatalog cat = make_catalog(cfg);
      code = std::max(code, do_gaps(cfg, cat, out).code);
      code = std::max(code, do_certify(cfg, cat, out).code);
      code = std::max(code, do_replay(cfg, cat, out).code);
      code = std::max(code, do_oracle(cfg, cat, out).code);
      return code;
    }
    std::cerr << "unknown command '" << command << "'\n";
    return kUsage;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kUsage;
  } catch (const NonConvergenceError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return kNumerical;
  }
}

}  // namespace qps::cli
