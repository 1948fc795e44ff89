#include "sasnet/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>
#include <stdexcept>

namespace sasnet {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << content;
}

}  // namespace

RunArtifacts run_algorithm(const ParsedConfig& cfg, AlgorithmTag alg, std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  const Scenario s = generate_scenario(cfg.scenario, seed);
  const ValidationReport rep = validate_scenario(s);
  if (!rep.ok()) {
    std::string msg = "generated scenario failed validation:";
    for (const auto& i : rep.issues) msg += "\n  " + i;
    throw std::invalid_argument(msg);
  }
  const ChannelModel ch(s);

  RunArtifacts a;
  a.record.algorithm = alg;
  a.record.seed = seed;
  a.record.scenario_hash = scenario_hash(s);
  a.record.config_snapshot = cfg.raw_text;

  switch (alg) {
    case AlgorithmTag::Proposed: {
      ProposedResult pr = solve_proposed(s, ch, cfg.solver);
      a.assoc = pr.assoc;
      a.alloc = pr.alloc;
      a.report = pr.report;
      a.record.converged = pr.abs.converged && pr.sat.converged && pr.cbs.converged;
      a.record.iters = std::max({pr.abs.iterations, pr.sat.iterations, pr.cbs.iterations});
      a.proposed = std::move(pr);
      break;
    }
    case AlgorithmTag::Centralized: {
      BaselineResult r = centralized_solve(s, ch, cfg.solver);
      a.assoc = std::move(r.assoc);
      a.alloc = std::move(r.alloc);
      a.report = r.report;
      break;
    }
    case AlgorithmTag::Greedy: {
      BaselineResult r = greedy_solve(s, ch, cfg.solver);
      a.assoc = std::move(r.assoc);
      a.alloc = std::move(r.alloc);
      a.report = r.report;
      break;
    }
    case AlgorithmTag::Random: {
      BaselineResult r = random_solve(s, ch, cfg.solver, seed);
      a.assoc = std::move(r.assoc);
      a.alloc = std::move(r.alloc);
      a.report = r.report;
      break;
    }
    case AlgorithmTag::Dynamic: {
      BaselineResult r = dynamic_solve(s, ch, cfg.solver);
      a.assoc = std::move(r.assoc);
      a.alloc = std::move(r.alloc);
      a.report = r.report;
      break;
    }
    case AlgorithmTag::BruteForce:
      throw std::invalid_argument("brute_force is an oracle, not a run algorithm");
  }

  a.violations = full_violations(ch, a.assoc, a.alloc);
  a.record.violation_count = static_cast<int>(a.violations.size());
  a.record.eta_abs = a.report.eta_abs;
  a.record.eta_sat = a.report.eta_sat;
  a.record.eta_cbs = a.report.eta_cbs;
  a.record.eta_total = a.report.eta_total;
  a.record.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return a;
}

std::string results_csv_header() {
  return "scenario_hash,algorithm,seed,eta_abs,eta_sat,eta_cbs,eta_total,iters,wall_ms,converged\n";
}

std::string results_csv_row(const RunRecord& r) {
  std::ostringstream out;
  out << r.scenario_hash << "," << algorithm_name(r.algorithm) << "," << r.seed << ","
      << fmt(r.eta_abs) << "," << fmt(r.eta_sat) << "," << fmt(r.eta_cbs) << ","
      << fmt(r.eta_total) << "," << r.iters << "," << fmt(r.wall_ms) << ","
      << (r.converged ? 1 : 0) << "\n";
  return out.str();
}

std::string deployment_csv(const Scenario& s, const Association& as, const Allocation& al) {
  std::ostringstream out;
  out << "slot,abs_id,x,y,h,served_lue_ids\n";
  for (int n = 0; n < al.N; ++n)
    for (int u = 0; u < al.U; ++u) {
      out << n << "," << u << "," << fmt(al.pos(u, n).x) << "," << fmt(al.pos(u, n).y) << ","
          << fmt(al.pos(u, n).z) << ",";
      const std::vector<int> lues = as.served_lues(u);
      for (size_t i = 0; i < lues.size(); ++i) {
        if (i) out << ";";
        out << lues[i];
      }
      out << "\n";
    }
  (void)s;
  return out.str();
}

void write_run_outputs(const RunArtifacts& a, const Scenario& s, const std::string& out_dir,
                       bool trace) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);

  // results.csv is appended so sweeps can share a directory.
  {
    const fs::path p = dir / "results.csv";
    const bool fresh = !fs::exists(p);
    std::ofstream out(p, std::ios::binary | std::ios::app);
    if (fresh) out << results_csv_header();
    out << results_csv_row(a.record);
  }
  write_file(dir / "config.txt", a.record.config_snapshot);
  write_file(dir / "scenario.txt", dump_scenario(s));
  write_file(dir / "deployment.csv", deployment_csv(s, a.assoc, a.alloc));
  if (!a.violations.empty()) write_file(dir / "violations.csv", violations_csv(a.violations));

  if (trace && a.proposed) {
    std::ostringstream tr, dk, rs;
    tr << "segment,iteration,eta_ub,eta_lb,gap,wall_ms\n";
    dk << "segment,j,eta,f_value\n";
    rs << "segment,t,primal_res,dual_res\n";
    const BendersResult* segs[3] = {&a.proposed->abs, &a.proposed->sat, &a.proposed->cbs};
    for (const BendersResult* b : segs) {
      const char* name = segment_name(b->segment);
      for (const auto& row : b->trace)
        tr << name << "," << row.iteration << "," << fmt(row.eta_ub) << "," << fmt(row.eta_lb)
           << "," << fmt(row.gap) << "," << fmt(row.wall_ms) << "\n";
      for (const auto& row : b->dinkelbach_trace)
        dk << name << "," << row.j << "," << fmt(row.eta) << "," << fmt(row.f_value) << "\n";
      for (const auto& row : b->admm_trace)
        rs << name << "," << row.t << "," << fmt(row.primal) << "," << fmt(row.dual) << "\n";
    }
    write_file(dir / "trace.csv", tr.str());
    write_file(dir / "dinkelbach.csv", dk.str());
    write_file(dir / "residuals.csv", rs.str());
  }
}

std::vector<SweepRow> sweep(const ParsedConfig& base, const std::string& variable,
                            const std::vector<int>& values, const std::vector<std::uint64_t>& seeds,
                            const std::vector<AlgorithmTag>& algorithms) {
  if (variable != "lue_count" && variable != "hue_count" && variable != "abs_count")
    throw std::invalid_argument("sweep variable must be lue_count, hue_count or abs_count");

  struct Cell {
    double total = 0.0, total_sq = 0.0, abs = 0.0, sat = 0.0, cbs = 0.0;
    int runs = 0;
  };

  std::vector<SweepRow> rows;
  for (const int value : values) {
    ParsedConfig cfg = base;
    if (variable == "lue_count") cfg.scenario.lue_count = value;
    if (variable == "hue_count") cfg.scenario.hue_count = value;
    if (variable == "abs_count") cfg.scenario.abs_count = value;

    for (const AlgorithmTag alg : algorithms) {
      // (value, seed) runs are independent; fan out per seed.
      std::vector<std::future<RunRecord>> futs;
      futs.reserve(seeds.size());
      for (const std::uint64_t seed : seeds)
        futs.push_back(std::async(std::launch::async, [&cfg, alg, seed]() {
          return run_algorithm(cfg, alg, seed).record;
        }));
      Cell cell;
      for (auto& f : futs) {
        const RunRecord r = f.get();
        cell.total += r.eta_total;
        cell.total_sq += r.eta_total * r.eta_total;
        cell.abs += r.eta_abs;
        cell.sat += r.eta_sat;
        cell.cbs += r.eta_cbs;
        ++cell.runs;
      }
      SweepRow row;
      row.variable = variable;
      row.value = value;
      row.algorithm = alg;
      row.runs = cell.runs;
      if (cell.runs > 0) {
        row.mean_eta_total = cell.total / cell.runs;
        const double var = std::max(0.0, cell.total_sq / cell.runs -
                                             row.mean_eta_total * row.mean_eta_total);
        row.std_eta_total = std::sqrt(var);
        row.mean_eta_abs = cell.abs / cell.runs;
        row.mean_eta_sat = cell.sat / cell.runs;
        row.mean_eta_cbs = cell.cbs / cell.runs;
      }
      rows.push_back(row);
    }
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "variable,value,algorithm,runs,mean_eta_total,std_eta_total,mean_eta_abs,mean_eta_sat,"
         "mean_eta_cbs\n";
  for (const auto& r : rows)
    out << r.variable << "," << r.value << "," << algorithm_name(r.algorithm) << "," << r.runs
        << "," << fmt(r.mean_eta_total) << "," << fmt(r.std_eta_total) << ","
        << fmt(r.mean_eta_abs) << "," << fmt(r.mean_eta_sat) << "," << fmt(r.mean_eta_cbs) << "\n";
  return out.str();
}

}  // namespace sasnet
