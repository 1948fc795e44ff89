// sasnet command line: run one allocator, sweep a scenario variable, or dump
// scenario/gain tables for debugging.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include <CLI11.hpp>

#include "sasnet/harness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNotConverged = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitInternalError = 3;

std::vector<std::uint64_t> parse_seeds(const std::string& csv) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stoull(tok));
  return out;
}

std::vector<int> parse_ints(const std::string& csv) {
  std::vector<int> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"space-air-sea maritime network energy-efficiency simulator"};
  app.require_subcommand(1);

  std::string config_path, algorithm = "proposed", out_dir = "out", trace_flag = "on";
  std::uint64_t seed = 1;
  double epsilon = -1, upsilon = -1, rho = -1;
  int max_benders = -1;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "scenario/solver config file")->required();
    cmd->add_option("--seed", seed, "root RNG seed");
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--epsilon", epsilon, "Benders gap tolerance (normalized EE units)");
    cmd->add_option("--upsilon", upsilon, "Dinkelbach tolerance");
    cmd->add_option("--rho", rho, "ADMM penalty");
    cmd->add_option("--max-benders-iter", max_benders, "Benders iteration cap");
    cmd->add_option("--trace", trace_flag, "on/off: write trace CSVs")
        ->check(CLI::IsMember({"on", "off"}));
  };

  CLI::App* run_cmd = app.add_subcommand("run", "run one allocator and write its artifacts");
  add_common(run_cmd);
  run_cmd->add_option("--algorithm", algorithm,
                      "proposed|centralized|greedy|random|dynamic");

  std::string sweep_var = "abs_count", sweep_values = "2,3,4", sweep_seeds = "1,2,3",
              sweep_algorithms = "proposed,centralized,greedy,random,dynamic";
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "cross-product runs over one variable");
  add_common(sweep_cmd);
  sweep_cmd->add_option("--variable", sweep_var, "lue_count|hue_count|abs_count");
  sweep_cmd->add_option("--values", sweep_values, "comma-separated values");
  sweep_cmd->add_option("--seeds", sweep_seeds, "comma-separated seeds");
  sweep_cmd->add_option("--algorithms", sweep_algorithms, "comma-separated algorithm list");

  CLI::App* dump_cmd = app.add_subcommand("dump-scenario", "print the generated scenario");
  add_common(dump_cmd);

  CLI::App* gains_cmd = app.add_subcommand("dump-gains", "write the gain matrix CSV");
  add_common(gains_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfigError;
  }

  try {
    sasnet::ParsedConfig cfg = sasnet::load_config_file(config_path);
    if (epsilon > 0) cfg.solver.epsilon = epsilon;
    if (upsilon > 0) cfg.solver.upsilon = upsilon;
    if (rho > 0) cfg.solver.rho = rho;
    if (max_benders > 0) cfg.solver.max_benders_iters = max_benders;
    cfg.solver.trace = trace_flag == "on";

    if (run_cmd->parsed()) {
      const sasnet::AlgorithmTag alg = sasnet::parse_algorithm(algorithm);
      const sasnet::RunArtifacts a = sasnet::run_algorithm(cfg, alg, seed);
      const sasnet::Scenario s = sasnet::generate_scenario(cfg.scenario, seed);
      sasnet::write_run_outputs(a, s, out_dir, cfg.solver.trace);
      std::cout << sasnet::results_csv_header() << sasnet::results_csv_row(a.record);
      if (a.record.violation_count != 0) {
        std::cerr << "warning: emitted solution has " << a.record.violation_count
                  << " constraint violations (see violations.csv)\n";
      }
      return a.record.converged ? kExitOk : kExitNotConverged;
    }
    if (sweep_cmd->parsed()) {
      std::vector<sasnet::AlgorithmTag> algs;
      std::stringstream ss(sweep_algorithms);
      std::string tok;
      while (std::getline(ss, tok, ',')) algs.push_back(sasnet::parse_algorithm(tok));
      const auto rows =
          sasnet::sweep(cfg, sweep_var, parse_ints(sweep_values), parse_seeds(sweep_seeds), algs);
      std::filesystem::create_directories(out_dir);
      std::ofstream out(std::filesystem::path(out_dir) / "sweep.csv", std::ios::binary);
      out << sasnet::sweep_csv(rows);
      std::cout << sasnet::sweep_csv(rows);
      return kExitOk;
    }
    if (dump_cmd->parsed()) {
      const sasnet::Scenario s = sasnet::generate_scenario(cfg.scenario, seed);
      const sasnet::ValidationReport rep = sasnet::validate_scenario(s);
      std::cout << sasnet::dump_scenario(s);
      for (const auto& issue : rep.issues) std::cerr << "invalid: " << issue << "\n";
      return rep.ok() ? kExitOk : kExitConfigError;
    }
    if (gains_cmd->parsed()) {
      const sasnet::Scenario s = sasnet::generate_scenario(cfg.scenario, seed);
      const sasnet::ChannelModel ch(s);
      std::filesystem::create_directories(out_dir);
      std::ofstream out(std::filesystem::path(out_dir) / "gains.csv", std::ios::binary);
      out << sasnet::dump_gain_table(ch);
      return kExitOk;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternalError;
  }
  return kExitOk;
}
