#pragma once

#include <functional>
#include <vector>

namespace sasnet {

/// Per-node variable blocks: powers plus optional deployment coordinates.
/// Deployment blocks are empty for the power-only (satellite/CBS) instances.
struct NodeVars {
  std::vector<double> p;
  std::vector<double> x;
  std::vector<double> y;

  void assign_like(const NodeVars& other, double value);
  int size() const { return int(p.size() + x.size() + y.size()); }
};

struct AdmmOptions {
  double rho = 1.0;
  bool adaptive_rho = true;
  double tol = 1e-4;
  int max_iters = 2000;
};

struct AdmmResidualRow {
  int t = 0;
  double primal = 0.0;
  double dual = 0.0;
};

struct AdmmResult {
  std::vector<NodeVars> globals;
  std::vector<NodeVars> locals;
  std::vector<NodeVars> duals;
  bool converged = false;
  int iterations = 0;
  double primal_res = 0.0;
  double dual_res = 0.0;
  double rho_final = 0.0;
  std::vector<AdmmResidualRow> trace;
};

/// Consensus problem: local maximizers per node, one projection of the
/// stacked global copies onto the shared constraint set.
class ConsensusModel {
 public:
  virtual ~ConsensusModel() = default;
  virtual int node_count() const = 0;
  virtual NodeVars initial(int node) const = 0;
  /// Maximize the node's augmented objective
  ///   F_node(v) - dual.(v - global) - rho/2 |v - global|^2
  /// over the node's own constraint set, warm-started at `warm`.
  virtual NodeVars local_update(int node, const NodeVars& global, const NodeVars& dual, double rho,
                                const NodeVars& warm) const = 0;
  /// Project the stacked global copies onto the shared constraints.
  virtual void project_globals(std::vector<NodeVars>& globals) const = 0;
};

/// Alternates parallel local updates, the global projection step and dual
/// ascent until both residuals fall below the tolerance. Local results are
/// tagged with the iteration index and the barrier verifies the tags.
AdmmResult run_admm(const ConsensusModel& model, const AdmmOptions& opts,
                    const std::vector<NodeVars>* warm_locals = nullptr);

}  // namespace sasnet
