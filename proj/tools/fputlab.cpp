// fputlab: experiment driver.  See `fputlab --help` and `fputlab <subcommand> --help`.

#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "fputlab/experiments.hpp"

namespace {

using fputlab::cli::ExperimentConfig;

struct Flags {
  std::string alpha, beta, gamma, format = "json";
};

void addChain(CLI::App* sub, ExperimentConfig& cfg, Flags& flags, bool withBetaGamma = true) {
  sub->add_option("--alpha", flags.alpha, "cubic coefficient alpha (decimal or p/q, read exactly; default 1)");
  if (withBetaGamma) {
    sub->add_option("--beta", flags.beta, "quartic coefficient beta (default 0)");
    sub->add_option("--gamma", flags.gamma, "quintic coefficient gamma (default 0)");
    sub->add_flag("--toda", cfg.toda, "Toda chain: beta = 2 alpha^2/3, gamma = alpha^3/3");
  }
}

void addOutput(CLI::App* sub, ExperimentConfig& cfg, Flags& flags) {
  sub->add_option("--out", cfg.out, std::string("output directory (default $") + fputlab::cli::kOutEnv +
                                        ", else ./fputlab-out)");
  sub->add_option("--format", flags.format, "stdout report format: json, csv or text")
      ->check(CLI::IsMember({"json", "csv", "text"}));
}

void addGrid(CLI::App* sub, ExperimentConfig& cfg, const std::string& help) {
  sub->add_option("--grid", cfg.grid, help);
}

void addTime(CLI::App* sub, ExperimentConfig& cfg, const std::string& tHelp) {
  sub->add_option("--dt", cfg.dt, "time step (default 1e-4)");
  sub->add_option("--tfinal", cfg.tfinal, tHelp);
  sub->add_option("--seed", cfg.seed, "seed for random initial data (default 1)");
  sub->add_flag("!--no-dealias", cfg.dealias, "disable the 2/3-rule dealiasing");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fputlab: normal forms of FPUT chains and their continuum limits"};
  // --h is the small parameter, so help is long-form only.
  app.set_help_flag("--help", "print this help and exit");
  app.require_subcommand(1);
  ExperimentConfig cfg;
  Flags flags;

  std::map<std::string, CLI::App*> subs;
  subs["verify-tables"] = app.add_subcommand("verify-tables", "check every bracket identity of the three tables");
  subs["verify-hierarchy"] = app.add_subcommand("verify-hierarchy", "check [K_i, K_j] = 0 for i, j in {1, 3, 5, 7}");
  subs["solve"] = app.add_subcommand("solve", "normal form, obstruction r and conserved coefficients");
  subs["toda-scan"] = app.add_subcommand("toda-scan", "obstruction r over a (beta, gamma) grid and its zero set");
  subs["residual-scan"] = app.add_subcommand("residual-scan", "invariance residual of the slaving relation vs h");
  subs["evolve"] = app.add_subcommand("evolve", "integrate a continuum flow and monitor the KdV integrals");
  subs["compare-lattice"] = app.add_subcommand("compare-lattice", "chain vs exact two-wave continuum flow, n = 1/h");

  for (auto& [name, sub] : subs) addOutput(sub, cfg, flags);

  addChain(subs["solve"], cfg, flags);
  subs["solve"]->add_flag("--symbolic", cfg.symbolic, "keep alpha, beta, gamma as symbols");
  subs["solve"]->add_option("--lambda4", cfg.lambda4, "free normal-form coefficient lambda4 (default 0)");

  addChain(subs["toda-scan"], cfg, flags, false);
  addGrid(subs["toda-scan"], cfg, "points per axis on [-2, 2]^2 (default 9)");

  addChain(subs["residual-scan"], cfg, flags);
  subs["residual-scan"]->add_option("--h", cfg.hs, "small parameter h, repeatable (default 1/32 .. 1/256)");
  addGrid(subs["residual-scan"], cfg, "grid points N (default 256)");

  auto* ev = subs["evolve"];
  addChain(ev, cfg, flags);
  ev->add_option("--h", cfg.hs, "small parameter h (default 0.1)");
  addGrid(ev, cfg, "grid points N (default 256)");
  addTime(ev, cfg, "final time (default 1)");
  ev->add_option("--field", cfg.field, "exact, expanded, reduced, kdv or normalized (default kdv)");
  ev->add_option("--order", cfg.order, "truncation order for expanded/reduced (default 6)");
  ev->add_option("--kdv", cfg.kdvWhich, "hierarchy member for --field kdv: 1, 3, 5 or 7 (default 3)");
  ev->add_option("--profile", cfg.profile, "initial U: sin, twomode or random (default sin)");
  ev->add_option("--lambda4", cfg.lambda4, "lambda4 for --field normalized (default 0)");

  auto* cl = subs["compare-lattice"];
  addChain(cl, cfg, flags);
  addGrid(cl, cfg, "chain length n = N = 1/h (default 64)");
  cl->add_option("--h", cfg.hs, "must equal 1/grid if given");
  addTime(cl, cfg, "continuum time (default 0.1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  for (auto& [name, sub] : subs)
    if (sub->parsed()) cfg.subcommand = name;
  if (!flags.alpha.empty()) cfg.alpha = flags.alpha;
  if (!flags.beta.empty()) cfg.beta = flags.beta;
  if (!flags.gamma.empty()) cfg.gamma = flags.gamma;
  cfg.format = fputlab::report::parseFormat(flags.format);
  return fputlab::cli::runAndEmit(cfg, std::cout, std::cerr);
}
