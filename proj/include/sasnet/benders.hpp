#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sasnet/admm.hpp"
#include "sasnet/allocation.hpp"
#include "sasnet/config.hpp"
#include "sasnet/dinkelbach.hpp"
#include "sasnet/problems.hpp"

namespace sasnet {

/// Kinds of binary decisions exposed to the master problems. Service bits are
/// receiver-level; resource-block indices are materialized canonically.
enum class BitKind {
  AbsServesLue,    // (u, ml)
  AbsBackhaulSat,  // (u)
  AbsBackhaulCbs,  // (c, u)
  SatServesHue,    // (mh)
  SatServesAbs,    // (u)
  CbsServesHue,    // (c, mh)
  CbsServesAbs,    // (c, u)
};

struct MasterBit {
  BitKind kind;
  int a = 0;
  int b = 0;
};

/// Linear cardinality cap over a subset of bits. `family` selects which
/// relaxation the bound uses (0: per-transmitter groups, 1: per-receiver).
struct CapGroup {
  std::vector<int> bits;
  int cap = 1;
  int family = 0;
};

/// Optimality cut chi <= eta_ub + duals . (a - anchor); cuts are only ever
/// appended, never removed.
struct BendersCut {
  double eta_ub = 0.0;
  std::vector<double> duals;
  std::vector<std::uint8_t> anchor;

  double value_at(const std::vector<std::uint8_t>& a) const;
};

/// When any bit of `if_any` is set, at least one bit of `then_any` must be.
struct Implication {
  std::vector<int> if_any;
  std::vector<int> then_any;
};

struct MasterProblem {
  std::vector<MasterBit> bits;
  std::vector<CapGroup> groups;
  std::vector<Implication> implications;
  std::vector<std::pair<int, std::uint8_t>> pinned;
  std::vector<BendersCut> cuts;
  std::vector<std::vector<std::uint8_t>> nogoods;
  double chi_down = -1e6;
  double chi_up = 1e6;
};

struct MasterSolution {
  std::vector<std::uint8_t> assignment;
  double chi = 0.0;
  bool exact = true;
  std::uint64_t nodes_visited = 0;
  bool used_enumeration = false;
};

bool assignment_feasible(const MasterProblem& mp, const std::vector<std::uint8_t>& a);

/// Maximizes chi over every cut and the uniqueness/cap system. Exhaustive
/// enumeration when the feasible space has at most 2^16 points, otherwise
/// best-first branch and bound with a per-cut relaxation bound. Ties resolve
/// to the lexicographically smallest assignment.
MasterSolution solve_master(const MasterProblem& mp);

/// Outcome of one continuous subproblem solve at a fixed association.
struct SubproblemResult {
  bool feasible = true;
  double eta = 0.0;   // achieved segment EE, normalized units
  double rate = 0.0;  // normalized numerator
  double power = 0.0;
  Association assoc;
  Allocation alloc;
  DinkelbachResult dinkelbach;
  bool admm_converged = false;
  double admm_primal = 0.0;
  double admm_dual = 0.0;
  std::vector<AdmmResidualRow> admm_trace;
};

/// Bridges one segment's master bits to its continuous subproblem.
class SegmentOracle {
 public:
  virtual ~SegmentOracle() = default;
  virtual Segment segment() const = 0;
  virtual MasterProblem master_skeleton() const = 0;
  virtual std::vector<std::uint8_t> initial_assignment() const = 0;
  /// Solve the Dinkelbach+ADMM subproblem at the fixed bits; `reduced` selects
  /// the cheaper effort profile used for finite-difference duals.
  virtual SubproblemResult solve(const std::vector<std::uint8_t>& bits, bool reduced) = 0;
  /// Refreeze the interference environment from a previous allocation; returns
  /// true when the tables changed materially (cache epoch advances).
  virtual bool refreeze(const Allocation& previous) = 0;
  /// Single-bit flip used for the finite-difference duals. Oracles may repair
  /// side constraints (e.g. pair a first served link with a backhaul choice)
  /// so the flip stays meaningful.
  virtual std::vector<std::uint8_t> flip_assignment(const std::vector<std::uint8_t>& bits,
                                                    int b) const {
    std::vector<std::uint8_t> out = bits;
    out[b] ^= 1;
    return out;
  }
};

struct BendersTraceRow {
  int iteration = 0;
  double eta_ub = 0.0;
  double eta_lb = 0.0;
  double gap = 0.0;
  double wall_ms = 0.0;
};

struct BendersState {
  int iteration = 1;
  std::vector<BendersCut> cuts;
  double eta_ub = 0.0;
  double eta_lb = 0.0;
  double chi = 0.0;
  double epsilon = 1e-3;
  double chi_down = -1e6;
};

/// Appends exactly one cut; earlier cuts are preserved.
void add_cut(BendersState& state, double eta_ub, const std::vector<double>& duals,
             const std::vector<std::uint8_t>& anchor);

struct BendersResult {
  Segment segment = Segment::Abs;
  bool converged = false;
  int iterations = 0;
  double eta_ub = 0.0;  // best achieved subproblem ratio (normalized)
  double eta_lb = 0.0;  // chi of the stopping iteration
  std::optional<SubproblemResult> incumbent;
  std::vector<BendersTraceRow> trace;
  std::vector<DinkelbachTraceRow> dinkelbach_trace;  // of the incumbent solve
  std::vector<AdmmResidualRow> admm_trace;           // of the incumbent solve
};

/// Outer-loop Benders decomposition: subproblem, bounds, master with
/// accumulated cuts, until eta_ub - eta_lb <= epsilon or the iteration cap.
BendersResult run_benders(SegmentOracle& oracle, const SolverOptions& opts);

}  // namespace sasnet
