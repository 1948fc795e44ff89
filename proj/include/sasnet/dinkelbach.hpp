#pragma once

#include <functional>
#include <vector>

namespace sasnet {

/// Numerator/denominator achieved by the inner maximizer of F(.; eta).
/// The inner solver keeps its own state (warm starts, best allocation).
struct DinkelbachStep {
  double rate = 0.0;   // R at the maximizer, normalized units
  double power = 0.0;  // P at the maximizer, watts
};

struct DinkelbachTraceRow {
  int j = 0;
  double eta = 0.0;
  double f_value = 0.0;
};

struct DinkelbachResult {
  double eta_star = 0.0;
  double f_final = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<DinkelbachTraceRow> trace;
};

/// Iterates eta <- R/P at the maximizer of R - eta*P until |F| <= upsilon,
/// starting from eta = 0 (the first inner solve is a pure rate maximization).
/// The inner solver must never return a point worse than its warm start, which
/// keeps the eta sequence non-decreasing even with approximate maximizers.
DinkelbachResult run_dinkelbach(const std::function<DinkelbachStep(double eta)>& solve_inner,
                                double upsilon, int max_iters);

}  // namespace sasnet
