#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "qps/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"spectrum, gap catalog and homogeneity certification for 1d continuum "
               "Schrodinger operators with small analytic quasi-periodic potentials"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  const char* names[] = {"validate", "dispersion", "gaps", "certify", "replay", "oracle", "all"};
  const char* descs[] = {
      "check potential invariants and scan the Diophantine condition",
      "sample E(k) over a k-grid into dispersion.csv",
      "build the labeled gap catalog and verify decay/separation bounds",
      "build a catalog and certify Carleson homogeneity over [sigma_min, sigma_max]",
      "replay the two-branch small/large-sigma certification with fitted constants",
      "cross-check gap locations and labels against finite-difference IDS counts",
      "full pipeline: validate, dispersion, gaps, certify, replay, oracle"};
  for (int i = 0; i < 7; ++i) {
    auto* sub = app.add_subcommand(names[i], descs[i]);
    sub->add_option("-c,--config", config_path, "problem definition file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("-o,--out", out_dir, "output directory (default: out)");
  }

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  std::ifstream in(config_path, std::ios::binary);
  if (!in) {
    std::cerr << "cannot open " << config_path << "\n";
    return qps::cli::kUsage;
  }
  std::ostringstream buf;
  buf << in.rdbuf();

  try {
    const qps::cli::ProblemConfig cfg = qps::cli::parse_config(buf.str());
    return qps::cli::run_command(command, cfg, out_dir);
  } catch (const qps::cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return qps::cli::kUsage;
  }
}
