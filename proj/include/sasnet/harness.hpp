#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sasnet/baselines.hpp"
#include "sasnet/config.hpp"

namespace sasnet {

struct RunRecord {
  std::string scenario_hash;
  AlgorithmTag algorithm = AlgorithmTag::Proposed;
  std::uint64_t seed = 0;
  double eta_abs = 0.0, eta_sat = 0.0, eta_cbs = 0.0, eta_total = 0.0;  // bit/J
  int iters = 1;
  double wall_ms = 0.0;
  bool converged = true;
  int violation_count = 0;
  std::string config_snapshot;  // reproduces the run together with the seed
};

struct RunArtifacts {
  RunRecord record;
  Association assoc;
  Allocation alloc;
  EEReport report;
  std::optional<ProposedResult> proposed;  // set for the proposed algorithm
  std::vector<Violation> violations;
};

/// Executes one allocator on the generated scenario.
RunArtifacts run_algorithm(const ParsedConfig& cfg, AlgorithmTag alg, std::uint64_t seed);

std::string results_csv_header();
std::string results_csv_row(const RunRecord& r);

/// Deployment CSV: slot,abs_id,x,y,h,served_lue_ids
std::string deployment_csv(const Scenario& s, const Association& as, const Allocation& al);

/// Writes results.csv, trace/residual CSVs, the deployment CSV, the scenario
/// dump and the config snapshot into `out_dir`.
void write_run_outputs(const RunArtifacts& a, const Scenario& s, const std::string& out_dir,
                       bool trace);

struct SweepRow {
  std::string variable;
  int value = 0;
  AlgorithmTag algorithm = AlgorithmTag::Proposed;
  double mean_eta_total = 0.0, std_eta_total = 0.0;
  double mean_eta_abs = 0.0, mean_eta_sat = 0.0, mean_eta_cbs = 0.0;
  int runs = 0;
};

/// Cross-product sweep over one scenario variable; (value, seed) pairs run
/// concurrently. variable is one of lue_count, hue_count, abs_count.
std::vector<SweepRow> sweep(const ParsedConfig& base, const std::string& variable,
                            const std::vector<int>& values, const std::vector<std::uint64_t>& seeds,
                            const std::vector<AlgorithmTag>& algorithms);

std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace sasnet
