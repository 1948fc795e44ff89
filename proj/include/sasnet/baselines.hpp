#pragma once

#include <cstdint>
#include <string>

#include "sasnet/segments.hpp"

namespace sasnet {

enum class AlgorithmTag { Proposed, Centralized, Greedy, Random, Dynamic, BruteForce };

const char* algorithm_name(AlgorithmTag t);
AlgorithmTag parse_algorithm(const std::string& name);

struct BaselineResult {
  Association assoc;
  Allocation alloc;
  EEReport report;  // self-consistent achieved evaluation
};

/// Discretization of the centralized/oracle searches. Power grids nest under
/// levels -> 2*levels-1, so refining never loses grid points.
struct SearchGrids {
  int power_levels = 16;
  int deploy_grid = 9;  // points per ABS (square grid over the LUE area)
};

/// Full-information joint solve on discretized powers and deployment:
/// exhaustive over associations when the space is small, hill-climbing with
/// restarts otherwise. Serves as the near-optimal reference curve.
BaselineResult centralized_solve(const Scenario& s, const ChannelModel& ch,
                                 const SolverOptions& opts, const SearchGrids& grids = {});

/// Highest-gain-first assignment with per-link EE-optimal powers.
BaselineResult greedy_solve(const Scenario& s, const ChannelModel& ch, const SolverOptions& opts);

/// Uniform feasible association and uniform powers, rejection-sampled to
/// feasibility (throws after 10^4 failed attempts).
BaselineResult random_solve(const Scenario& s, const ChannelModel& ch, const SolverOptions& opts,
                            std::uint64_t seed);

/// Stage-wise matching: per-slot optimal user/RB assignment on per-link EE
/// scores (Hungarian), powers by 1-D search, deployment on the fixed route.
BaselineResult dynamic_solve(const Scenario& s, const ChannelModel& ch, const SolverOptions& opts);

/// Exhaustive maximum of the total EE over association x power x deployment
/// grids; exact on its grid. Throws when the enumeration exceeds 10^7.
double brute_force_oracle(const Scenario& s, const ChannelModel& ch, const SolverOptions& opts,
                          const SearchGrids& grids = {});

/// Segment EE of an allocation under the cold (p_max) interference tables;
/// the common scoring metric for oracle comparisons.
EEReport score_cold(const ChannelModel& ch, const Association& as, const Allocation& al);

}  // namespace sasnet
