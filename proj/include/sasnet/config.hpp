#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "sasnet/scenario.hpp"

namespace sasnet {

/// Solver knobs shared by the decomposition stack and the CLI.
struct SolverOptions {
  double epsilon = 1e-3;    // Benders gap tolerance (normalized EE units)
  double upsilon = 1e-4;    // Dinkelbach tolerance (normalized rate units)
  double rho = 1.0;         // ADMM penalty
  bool adaptive_rho = true;
  double chi_down = -1e6;
  double chi_up = 1e6;
  int max_benders_iters = 100;
  int max_dinkelbach_iters = 30;
  int admm_max_iters = 2000;
  double admm_tol = 1e-4;
  // Budget of association bits per optimality cut whose duals are estimated
  // by finite differences; every bit is sampled when the problem has at most
  // this many bits.
  int fd_bit_budget = 16;
  int pgd_max_steps = 40;
  // EE values are divided by this unit inside the solver stack, so the
  // default tolerances act on O(1) quantities. 1e6 puts EE in Mbit/J.
  double ee_unit = 1e6;
  bool trace = true;
};

/// `key = value` text file with '#' comments. Unknown keys are errors.
class KeyValueConfig {
 public:
  static KeyValueConfig parse_file(const std::string& path);
  static KeyValueConfig parse_text(const std::string& text);

  bool has(const std::string& key) const;
  double get_double(const std::string& key, double fallback);
  int get_int(const std::string& key, int fallback);
  bool get_bool(const std::string& key, bool fallback);

  /// Keys present in the file but never consumed by a getter.
  std::vector<std::string> unconsumed() const;

  const std::string& text() const { return text_; }

 private:
  std::map<std::string, std::string> values_;
  std::map<std::string, bool> consumed_;
  std::string text_;
};

/// Parses scenario + solver options; throws std::invalid_argument on unknown
/// keys or malformed values (fail-fast).
struct ParsedConfig {
  ScenarioConfig scenario;
  SolverOptions solver;
  std::string raw_text;  // byte-exact snapshot of the config file
};

ParsedConfig load_config_file(const std::string& path);
ParsedConfig load_config_text(const std::string& text);

}  // namespace sasnet
