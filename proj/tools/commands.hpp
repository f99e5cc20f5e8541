#pragma once

// The catmap command line: configuration, the five suites, and the driver
// that writes reports.jsonl / summary.csv and maps failures to the exit code.

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "catmap/analysis.hpp"

namespace catmap::cli {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RunConfig {
  Int p = 5;
  int k = 2;
  Int n = 0;  ///< composite modulus; overrides p^k when nonzero
  std::array<Int, 4> matrix{1, 2, 2, 5};
  std::string suite = "all";
  std::string out = "catmap_out";
  std::optional<double> tol;
  int jobs = 1;
  std::uint64_t seed = 1;
};

inline const std::vector<std::string> kSuites = {"quantize", "eigen", "figure", "verify", "expsum", "all"};

Int modulus_of(const RunConfig& c);
bool is_prime_power(const RunConfig& c);

/// Rejects every invalid combination before computing anything.
void validate(const RunConfig& c);

struct SuiteResult {
  std::vector<VerificationReport> reports;
  std::vector<std::string> files;  ///< written, relative to the output directory
};

/// Lazily computed shared state for one run.
class Session {
 public:
  explicit Session(RunConfig c);
  const RunConfig& config() const { return config_; }
  Int N() const { return N_; }
  TorusMatrix A() const;
  const Eigenbasis& basis();  ///< prime-power N only
  const std::vector<TensorEigenvector>& tensor();  ///< composite N only
  double tol_or(double fallback) const { return config_.tol.value_or(fallback); }
  std::string path(const std::string& file) const;

 private:
  RunConfig config_;
  Int N_;
  std::optional<Eigenbasis> basis_;
  std::optional<std::vector<TensorEigenvector>> tensor_;
};

SuiteResult cmd_quantize(Session& s);
SuiteResult cmd_eigenbasis(Session& s);
SuiteResult cmd_figure(Session& s);
SuiteResult cmd_verify(Session& s);
SuiteResult cmd_expsum(Session& s);

/// Runs the configured suites, writes reports.jsonl and summary.csv, prints a
/// summary to log. Returns 0 iff every report passed.
int run(const RunConfig& c, std::ostream& log);

/// argv parsing plus CATMAP_OUT; returns the process exit code (2 on bad input).
int main_entry(int argc, char** argv);

}  // namespace catmap::cli
