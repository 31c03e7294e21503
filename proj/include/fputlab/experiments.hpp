#pragma once

// Subcommands of the fputlab driver.  Each one runs a piece of the pipeline,
// records exact and measured results plus pass/fail checks in a Report, and
// writes its data tables as <experiment>_<field>_<N>_<h>.csv under the output
// directory.

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fputlab/rational.hpp"
#include "fputlab/report.hpp"

namespace fputlab::cli {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// verify-tables, verify-hierarchy, solve, toda-scan, residual-scan, evolve,
// compare-lattice.
const std::vector<std::string>& subcommands();

// Environment variable naming the default output root.
inline constexpr const char* kOutEnv = "FPUTLAB_OUT";

struct ExperimentConfig {
  std::string subcommand;

  // Chain parameters as typed; decimals are read exactly ("0.1" is 1/10).
  std::optional<std::string> alpha, beta, gamma;
  bool toda = false;
  bool symbolic = false;  // solve only: keep alpha, beta, gamma as parameters
  std::string lambda4 = "0";

  std::vector<double> hs;  // empty: subcommand default
  long grid = 0;           // 0: subcommand default
  std::optional<double> dt, tfinal;
  unsigned seed = 1;

  // evolve
  std::string field = "kdv";  // exact, expanded, reduced, kdv, normalized
  int order = 6;
  int kdvWhich = 3;
  std::string profile = "sin";  // sin, twomode, random
  bool dealias = true;

  std::filesystem::path out;  // empty: $FPUTLAB_OUT, else "fputlab-out"
  report::Format format = report::Format::json;
};

// Resolved, validated form of the config with every default filled in.
struct ResolvedConfig {
  ExperimentConfig raw;
  Rational alpha, beta, gamma, lambda4;
  std::vector<double> hs;
  long grid = 0;
  double dt = 0, tfinal = 0;
  std::filesystem::path out;
};

// Throws ConfigError with a message naming the offending flag.
ResolvedConfig resolve(const ExperimentConfig& cfg);

// Runs the subcommand.  Numerical failures (blow-up, self-verification errors)
// become failed checks; only configuration problems throw.
report::Report run(const ResolvedConfig& cfg);

// resolve + run + emit; prints the report in the requested format to `out`
// and diagnostics to `err`.  Returns the exit code: 0 all checks pass, 1 a
// check failed, 2 invalid configuration or I/O failure.
int runAndEmit(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace fputlab::cli
