#include "sasnet/admm.hpp"

#include <cmath>
#include <future>
#include <stdexcept>

namespace sasnet {

namespace {

struct TaggedLocal {
  int node = 0;
  int t = 0;
  NodeVars vars;
};

double block_gap_rms(const std::vector<NodeVars>& a, const std::vector<NodeVars>& b) {
  double sum = 0.0;
  int n = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    auto acc = [&](const std::vector<double>& u, const std::vector<double>& v) {
      for (size_t j = 0; j < u.size(); ++j) {
        const double d = u[j] - v[j];
        sum += d * d;
        ++n;
      }
    };
    acc(a[i].p, b[i].p);
    acc(a[i].x, b[i].x);
    acc(a[i].y, b[i].y);
  }
  return n == 0 ? 0.0 : std::sqrt(sum / n);
}

// duals += rho * (locals - globals), blockwise
void dual_ascent(NodeVars& dual, const NodeVars& local, const NodeVars& global, double rho) {
  for (size_t j = 0; j < dual.p.size(); ++j) dual.p[j] += rho * (local.p[j] - global.p[j]);
  for (size_t j = 0; j < dual.x.size(); ++j) dual.x[j] += rho * (local.x[j] - global.x[j]);
  for (size_t j = 0; j < dual.y.size(); ++j) dual.y[j] += rho * (local.y[j] - global.y[j]);
}

}  // namespace

void NodeVars::assign_like(const NodeVars& other, double value) {
  p.assign(other.p.size(), value);
  x.assign(other.x.size(), value);
  y.assign(other.y.size(), value);
}

AdmmResult run_admm(const ConsensusModel& model, const AdmmOptions& opts,
                    const std::vector<NodeVars>* warm_locals) {
  const int nodes = model.node_count();
  AdmmResult res;
  res.locals.resize(nodes);
  res.globals.resize(nodes);
  res.duals.resize(nodes);
  for (int i = 0; i < nodes; ++i) {
    res.locals[i] = warm_locals ? (*warm_locals)[i] : model.initial(i);
    res.globals[i] = res.locals[i];
    res.duals[i].assign_like(res.locals[i], 0.0);
  }
  model.project_globals(res.globals);

  double rho = opts.rho;
  std::vector<NodeVars> prev_globals;

  for (int t = 0; t < opts.max_iters; ++t) {
    // Local updates run concurrently; every message carries its iteration tag
    // and the barrier only admits tags of the current round.
    if (nodes > 1) {
      std::vector<std::future<TaggedLocal>> futs;
      futs.reserve(nodes);
      for (int i = 0; i < nodes; ++i) {
        futs.push_back(std::async(std::launch::async, [&model, &res, rho, i, t]() {
          return TaggedLocal{
              i, t, model.local_update(i, res.globals[i], res.duals[i], rho, res.locals[i])};
        }));
      }
      std::vector<NodeVars> fresh(nodes);
      for (auto& f : futs) {
        TaggedLocal msg = f.get();
        if (msg.t != t) throw std::logic_error("admm barrier received a stale local update");
        fresh[msg.node] = std::move(msg.vars);
      }
      res.locals = std::move(fresh);
    } else if (nodes == 1) {
      TaggedLocal msg{0, t,
                      model.local_update(0, res.globals[0], res.duals[0], rho, res.locals[0])};
      if (msg.t != t) throw std::logic_error("admm barrier received a stale local update");
      res.locals[0] = std::move(msg.vars);
    }

    // Global copies: per-entry quadratic minimizer local + dual/rho, then the
    // shared-constraint projection (power boxes, safe-distance half-spaces).
    prev_globals = res.globals;
    for (int i = 0; i < nodes; ++i) {
      NodeVars& g = res.globals[i];
      const NodeVars& l = res.locals[i];
      const NodeVars& d = res.duals[i];
      for (size_t j = 0; j < g.p.size(); ++j) g.p[j] = l.p[j] + d.p[j] / rho;
      for (size_t j = 0; j < g.x.size(); ++j) g.x[j] = l.x[j] + d.x[j] / rho;
      for (size_t j = 0; j < g.y.size(); ++j) g.y[j] = l.y[j] + d.y[j] / rho;
    }
    model.project_globals(res.globals);

    for (int i = 0; i < nodes; ++i) dual_ascent(res.duals[i], res.locals[i], res.globals[i], rho);

    res.primal_res = block_gap_rms(res.locals, res.globals);
    res.dual_res = rho * block_gap_rms(res.globals, prev_globals);
    res.iterations = t + 1;
    res.trace.push_back({t, res.primal_res, res.dual_res});

    if (res.primal_res <= opts.tol && res.dual_res <= opts.tol) {
      res.converged = true;
      break;
    }
    if (opts.adaptive_rho) {
      if (res.primal_res > 10.0 * res.dual_res && rho < 1e6)
        rho *= 2.0;
      else if (res.dual_res > 10.0 * res.primal_res && rho > 1e-6)
        rho /= 2.0;
    }
  }
  res.rho_final = rho;
  return res;
}

}  // namespace sasnet
