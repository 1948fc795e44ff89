#include "sasnet/benders.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <queue>
#include <set>
#include <stdexcept>

namespace sasnet {

namespace {

constexpr double kTieTol = 1e-12;
constexpr std::uint64_t kEnumLimit = 1ull << 16;
constexpr std::uint64_t kBnbNodeCap = 500000;

struct GroupIndex {
  std::vector<std::vector<int>> groups_of_bit;  // group ids per bit
  std::vector<int> caps;

  explicit GroupIndex(const MasterProblem& mp) {
    groups_of_bit.resize(mp.bits.size());
    caps.reserve(mp.groups.size());
    for (size_t g = 0; g < mp.groups.size(); ++g) {
      caps.push_back(mp.groups[g].cap);
      for (const int b : mp.groups[g].bits) groups_of_bit[b].push_back(static_cast<int>(g));
    }
  }
};

std::vector<int> pin_table(const MasterProblem& mp) {
  std::vector<int> pin(mp.bits.size(), -1);
  for (const auto& [b, v] : mp.pinned) pin[b] = v;
  return pin;
}

bool implications_hold(const MasterProblem& mp, const std::vector<std::uint8_t>& a) {
  for (const auto& imp : mp.implications) {
    bool triggered = false;
    for (const int b : imp.if_any)
      if (a[b]) {
        triggered = true;
        break;
      }
    if (!triggered) continue;
    bool satisfied = false;
    for (const int b : imp.then_any)
      if (a[b]) {
        satisfied = true;
        break;
      }
    if (!satisfied) return false;
  }
  return true;
}

// Counts feasible assignments, bailing out once the limit is exceeded.
std::uint64_t count_feasible(const MasterProblem& mp, std::uint64_t limit) {
  const GroupIndex gi(mp);
  const std::vector<int> pin = pin_table(mp);
  std::vector<int> usage(mp.groups.size(), 0);
  std::uint64_t count = 0;
  const int nbits = static_cast<int>(mp.bits.size());

  struct Frame {
    int bit;
    int next_value;
  };
  std::vector<Frame> stack;
  stack.push_back({0, 0});
  std::vector<std::uint8_t> cur(nbits, 0);
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.bit == nbits) {
      if (++count > limit) return count;
      stack.pop_back();
      continue;
    }
    if (f.next_value > 1) {
      if (cur[f.bit] == 1) {
        for (const int g : gi.groups_of_bit[f.bit]) --usage[g];
        cur[f.bit] = 0;
      }
      stack.pop_back();
      continue;
    }
    const int v = f.next_value++;
    if (pin[f.bit] >= 0 && pin[f.bit] != v) continue;
    if (cur[f.bit] == 1) {
      for (const int g : gi.groups_of_bit[f.bit]) --usage[g];
      cur[f.bit] = 0;
    }
    if (v == 1) {
      bool ok = true;
      for (const int g : gi.groups_of_bit[f.bit])
        if (usage[g] + 1 > gi.caps[g]) {
          ok = false;
          break;
        }
      if (!ok) continue;
      for (const int g : gi.groups_of_bit[f.bit]) ++usage[g];
      cur[f.bit] = 1;
    }
    stack.push_back({f.bit + 1, 0});
  }
  return count;
}

double chi_of(const MasterProblem& mp, const std::vector<double>& cut_values) {
  double chi = mp.chi_up;
  for (const double v : cut_values) chi = std::min(chi, v);
  return chi;
}

MasterSolution enumerate_master(const MasterProblem& mp) {
  const GroupIndex gi(mp);
  const std::vector<int> pin = pin_table(mp);
  const int nbits = static_cast<int>(mp.bits.size());
  const std::set<std::vector<std::uint8_t>> nogood(mp.nogoods.begin(), mp.nogoods.end());

  // Running cut values for the currently assigned prefix with zeros behind it.
  std::vector<double> run(mp.cuts.size());
  for (size_t k = 0; k < mp.cuts.size(); ++k) {
    double base = mp.cuts[k].eta_ub;
    for (int b = 0; b < nbits; ++b) base -= mp.cuts[k].duals[b] * mp.cuts[k].anchor[b];
    run[k] = base;
  }

  std::vector<int> usage(mp.groups.size(), 0);
  std::vector<std::uint8_t> cur(nbits, 0);
  MasterSolution best;
  bool found = false;

  struct Frame {
    int bit;
    int next_value;
  };
  std::vector<Frame> stack;
  stack.push_back({0, 0});
  auto clear_bit = [&](int b) {
    if (cur[b] == 1) {
      for (const int g : gi.groups_of_bit[b]) --usage[g];
      for (size_t k = 0; k < mp.cuts.size(); ++k) run[k] -= mp.cuts[k].duals[b];
      cur[b] = 0;
    }
  };
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.bit == nbits) {
      best.nodes_visited++;
      if (!nogood.count(cur) && implications_hold(mp, cur)) {
        const double chi = chi_of(mp, run);
        if (chi >= mp.chi_down && (!found || chi > best.chi + kTieTol)) {
          best.chi = chi;
          best.assignment = cur;
          found = true;
        }
      }
      stack.pop_back();
      continue;
    }
    if (f.next_value > 1) {
      clear_bit(f.bit);
      stack.pop_back();
      continue;
    }
    const int v = f.next_value++;
    if (pin[f.bit] >= 0 && pin[f.bit] != v) continue;
    clear_bit(f.bit);
    if (v == 1) {
      bool ok = true;
      for (const int g : gi.groups_of_bit[f.bit])
        if (usage[g] + 1 > gi.caps[g]) {
          ok = false;
          break;
        }
      if (!ok) continue;
      for (const int g : gi.groups_of_bit[f.bit]) ++usage[g];
      for (size_t k = 0; k < mp.cuts.size(); ++k) run[k] += mp.cuts[k].duals[f.bit];
      cur[f.bit] = 1;
    }
    stack.push_back({f.bit + 1, 0});
  }
  if (!found) throw std::runtime_error("master problem: no feasible association");
  best.used_enumeration = true;
  return best;
}

struct BnbNode {
  std::vector<std::uint8_t> prefix;
  std::vector<int> usage;
  double bound = 0.0;
  std::uint64_t id = 0;
};

struct BnbCompare {
  bool operator()(const BnbNode& a, const BnbNode& b) const {
    if (a.bound != b.bound) return a.bound < b.bound;  // max-heap on bound
    return a.id > b.id;
  }
};

// Upper bound: for each cut, the prefix value plus the relaxed best completion
// under one group family at a time (min over the two relaxations is valid).
double node_bound(const MasterProblem& mp, const GroupIndex& gi, const std::vector<int>& pin,
                  const BnbNode& node) {
  const int nbits = static_cast<int>(mp.bits.size());
  const int depth = static_cast<int>(node.prefix.size());
  double bound = mp.chi_up;
  for (size_t k = 0; k < mp.cuts.size(); ++k) {
    const BendersCut& cut = mp.cuts[k];
    double zeros = cut.eta_ub;
    for (int b = 0; b < nbits; ++b) zeros -= cut.duals[b] * cut.anchor[b];
    for (int b = 0; b < depth; ++b)
      if (node.prefix[b]) zeros += cut.duals[b];
    double best_family = std::numeric_limits<double>::infinity();
    for (int fam = 0; fam < 2; ++fam) {
      // Per-group residual caps, positive coefficients only.
      double extra = 0.0;
      std::vector<std::vector<double>> per_group(mp.groups.size());
      for (int b = depth; b < nbits; ++b) {
        if (pin[b] == 0) continue;
        double gain = cut.duals[b];
        if (pin[b] == 1) {  // forced one (group feasibility is checked on expansion)
          extra += gain;
          continue;
        }
        if (gain <= 0.0) continue;
        int fam_group = -1;
        for (const int g : gi.groups_of_bit[b])
          if (mp.groups[g].family == fam) fam_group = g;
        if (fam_group < 0)
          extra += gain;
        else
          per_group[fam_group].push_back(gain);
      }
      for (size_t g = 0; g < per_group.size(); ++g) {
        auto& v = per_group[g];
        std::sort(v.begin(), v.end(), std::greater<double>());
        const int room = std::max(0, mp.groups[g].cap - node.usage[g]);
        for (int i = 0; i < std::min<int>(room, static_cast<int>(v.size())); ++i) extra += v[i];
      }
      best_family = std::min(best_family, extra);
    }
    bound = std::min(bound, zeros + best_family);
  }
  return bound;
}

// Completes a prefix with zeros (plus forced pins) and evaluates it.
bool zero_completion(const MasterProblem& mp, const GroupIndex& gi, const std::vector<int>& pin,
                     const BnbNode& node, std::vector<std::uint8_t>& out, double& chi) {
  const int nbits = static_cast<int>(mp.bits.size());
  out = node.prefix;
  out.resize(nbits, 0);
  std::vector<int> usage = node.usage;
  for (int b = static_cast<int>(node.prefix.size()); b < nbits; ++b) {
    if (pin[b] == 1) {
      for (const int g : gi.groups_of_bit[b])
        if (++usage[g] > gi.caps[g]) return false;
      out[b] = 1;
    }
  }
  for (const auto& ng : mp.nogoods)
    if (ng == out) return false;
  if (!implications_hold(mp, out)) return false;
  std::vector<double> vals(mp.cuts.size());
  for (size_t k = 0; k < mp.cuts.size(); ++k) vals[k] = mp.cuts[k].value_at(out);
  chi = chi_of(mp, vals);
  return chi >= mp.chi_down;
}

MasterSolution branch_and_bound(const MasterProblem& mp) {
  const GroupIndex gi(mp);
  const std::vector<int> pin = pin_table(mp);
  const int nbits = static_cast<int>(mp.bits.size());

  MasterSolution best;
  bool found = false;
  std::uint64_t next_id = 0;

  std::priority_queue<BnbNode, std::vector<BnbNode>, BnbCompare> pq;
  BnbNode root;
  root.usage.assign(mp.groups.size(), 0);
  root.bound = node_bound(mp, gi, pin, root);
  root.id = next_id++;
  pq.push(root);

  std::uint64_t visited = 0;
  bool capped = false;
  auto consider = [&](const std::vector<std::uint8_t>& a, double chi) {
    if (!found || chi > best.chi + kTieTol ||
        (std::fabs(chi - best.chi) <= kTieTol && a < best.assignment)) {
      best.chi = chi;
      best.assignment = a;
      found = true;
    }
  };

  while (!pq.empty()) {
    BnbNode node = pq.top();
    pq.pop();
    if (++visited > kBnbNodeCap) {
      capped = true;
      break;
    }
    if (found && node.bound <= best.chi + kTieTol) continue;

    std::vector<std::uint8_t> candidate;
    double chi;
    if (zero_completion(mp, gi, pin, node, candidate, chi)) consider(candidate, chi);

    const int depth = static_cast<int>(node.prefix.size());
    if (depth == nbits) continue;
    for (int v = 0; v <= 1; ++v) {
      if (pin[depth] >= 0 && pin[depth] != v) continue;
      BnbNode child = node;
      child.id = next_id++;
      child.prefix.push_back(static_cast<std::uint8_t>(v));
      if (v == 1) {
        bool ok = true;
        for (const int g : gi.groups_of_bit[depth])
          if (++child.usage[g] > gi.caps[g]) {
            ok = false;
            break;
          }
        if (!ok) continue;
      }
      child.bound = node_bound(mp, gi, pin, child);
      if (found && child.bound <= best.chi + kTieTol) continue;
      pq.push(child);
    }
  }
  if (!found) throw std::runtime_error("master problem: no feasible association");
  best.exact = !capped;
  best.nodes_visited = visited;
  return best;
}

double wall_ms_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

double BendersCut::value_at(const std::vector<std::uint8_t>& a) const {
  double v = eta_ub;
  for (size_t b = 0; b < duals.size(); ++b) v += duals[b] * (double(a[b]) - double(anchor[b]));
  return v;
}

bool assignment_feasible(const MasterProblem& mp, const std::vector<std::uint8_t>& a) {
  if (a.size() != mp.bits.size()) return false;
  for (const auto& [b, v] : mp.pinned)
    if (a[b] != v) return false;
  for (const auto& g : mp.groups) {
    int used = 0;
    for (const int b : g.bits) used += a[b];
    if (used > g.cap) return false;
  }
  for (const auto& ng : mp.nogoods)
    if (ng == a) return false;
  return implications_hold(mp, a);
}

MasterSolution solve_master(const MasterProblem& mp) {
  for (const auto& cut : mp.cuts)
    if (cut.duals.size() != mp.bits.size() || cut.anchor.size() != mp.bits.size())
      throw std::invalid_argument("solve_master: cut dimension mismatch");
  const std::uint64_t n = count_feasible(mp, kEnumLimit);
  if (n <= kEnumLimit) return enumerate_master(mp);
  return branch_and_bound(mp);
}

void add_cut(BendersState& state, double eta_ub, const std::vector<double>& duals,
             const std::vector<std::uint8_t>& anchor) {
  for (const double d : duals)
    if (!std::isfinite(d)) throw std::invalid_argument("add_cut: non-finite dual");
  state.cuts.push_back(BendersCut{eta_ub, duals, anchor});
}

BendersResult run_benders(SegmentOracle& oracle, const SolverOptions& opts) {
  MasterProblem mp = oracle.master_skeleton();
  mp.chi_down = opts.chi_down;
  mp.chi_up = opts.chi_up;

  BendersResult res;
  res.segment = oracle.segment();

  std::vector<std::uint8_t> bits = oracle.initial_assignment();
  double chi = opts.chi_down;  // eta_lb before the first master solve
  std::optional<SubproblemResult> last;
  std::set<std::vector<std::uint8_t>> anchored;
  std::map<std::vector<std::uint8_t>, SubproblemResult> cache;
  std::map<std::vector<std::uint8_t>, SubproblemResult> reduced_cache;
  const auto t0 = std::chrono::steady_clock::now();

  auto solve_full = [&](const std::vector<std::uint8_t>& a) -> const SubproblemResult& {
    auto it = cache.find(a);
    if (it == cache.end()) it = cache.emplace(a, oracle.solve(a, false)).first;
    return it->second;
  };
  auto solve_reduced = [&](const std::vector<std::uint8_t>& a) -> const SubproblemResult& {
    if (auto it = cache.find(a); it != cache.end()) return it->second;
    auto it = reduced_cache.find(a);
    if (it == reduced_cache.end()) it = reduced_cache.emplace(a, oracle.solve(a, true)).first;
    return it->second;
  };

  for (int iter = 1; iter <= opts.max_benders_iters; ++iter) {
    res.iterations = iter;
    // Interference environment follows the previous outer iteration; an epoch
    // change invalidates cached subproblem values (cuts are kept).
    if (last && last->feasible && oracle.refreeze(last->alloc)) {
      cache.clear();
      reduced_cache.clear();
    }

    const SubproblemResult sub = solve_full(bits);
    last = sub;

    if (sub.feasible) {
      if (!res.incumbent || sub.eta > res.incumbent->eta) {
        res.incumbent = sub;
        res.dinkelbach_trace = sub.dinkelbach.trace;
        res.admm_trace = sub.admm_trace;
      }
      const double eta_ub_i = sub.eta;
      const double eta_lb_i = chi;
      const double gap = eta_ub_i - eta_lb_i;
      res.trace.push_back({iter, eta_ub_i, eta_lb_i, gap, wall_ms_since(t0)});
      if (std::fabs(gap) <= opts.epsilon && eta_ub_i >= res.incumbent->eta - opts.epsilon) {
        res.converged = true;
        res.eta_lb = eta_lb_i;
        break;
      }
      if (!anchored.count(bits)) {
        // One-sided finite differences of the subproblem optimum, sampled over
        // at most fd_bit_budget bits (every bit for small instances).
        std::vector<double> duals(mp.bits.size(), 0.0);
        const int nbits = static_cast<int>(mp.bits.size());
        std::vector<int> sample;
        for (int b = 0; b < nbits; ++b)
          if (bits[b]) sample.push_back(b);
        const int start = (iter - 1) * 7;
        for (int off = 0; off < nbits && static_cast<int>(sample.size()) < opts.fd_bit_budget;
             ++off) {
          const int b = (start + off) % nbits;
          if (!bits[b] && std::find(sample.begin(), sample.end(), b) == sample.end())
            sample.push_back(b);
        }
        for (const int b : sample) {
          const std::vector<std::uint8_t> flipped = oracle.flip_assignment(bits, b);
          if (flipped == bits || !assignment_feasible(mp, flipped)) continue;
          const SubproblemResult& fsub = solve_reduced(flipped);
          const double feta = fsub.feasible ? fsub.eta : 0.0;
          duals[b] = bits[b] ? (sub.eta - feta) : (feta - sub.eta);
        }
        mp.cuts.push_back(BendersCut{sub.eta, std::move(duals), bits});
        anchored.insert(bits);
      } else {
        // Re-proposal that did not close the gap: exclude it and explore on.
        mp.nogoods.push_back(bits);
      }
    } else {
      // Infeasible fixed association: no-good feasibility cut.
      mp.nogoods.push_back(bits);
      const double eta_ub_i = res.incumbent ? res.incumbent->eta : 0.0;
      res.trace.push_back({iter, eta_ub_i, chi, eta_ub_i - chi, wall_ms_since(t0)});
    }

    // Master step. Where the subproblem value is already known the cut model
    // is replaced by the exact value: the master proposes the best evaluated
    // association unless the cut estimate of some unexplored one beats it.
    double best_known = -std::numeric_limits<double>::infinity();
    const std::vector<std::uint8_t>* best_known_bits = nullptr;
    for (const auto& [a, r] : cache) {
      if (!r.feasible) continue;
      bool excluded = false;
      for (const auto& ng : mp.nogoods)
        if (ng == a) {
          excluded = true;
          break;
        }
      if (!excluded && r.eta > best_known) {
        best_known = r.eta;
        best_known_bits = &a;
      }
    }
    MasterProblem explore = mp;
    for (const auto& [a, r] : cache) explore.nogoods.push_back(a);
    MasterSolution master;
    bool have_unknown = true;
    try {
      master = solve_master(explore);
    } catch (const std::runtime_error&) {
      have_unknown = false;
    }
    if (best_known_bits && (!have_unknown || best_known >= master.chi - 1e-15)) {
      bits = *best_known_bits;
      chi = best_known;
    } else if (have_unknown) {
      bits = master.assignment;
      chi = master.chi;
    } else {
      break;  // every association excluded; keep the incumbent
    }
    res.eta_lb = chi;
  }

  res.eta_ub = res.incumbent ? res.incumbent->eta : 0.0;
  return res;
}

}  // namespace sasnet
