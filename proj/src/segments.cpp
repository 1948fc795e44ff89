#include "sasnet/segments.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <stdexcept>

#include "sasnet/approx.hpp"

namespace sasnet {

namespace {

constexpr double kLn2 = 0.69314718055994530942;
constexpr double kFloorSlack = 1.0 + 1e-9;

double demand_rate_per_slot(const Scenario& s) {
  return s.radio().rate_threshold_bps / s.slot_count();
}

// Power needed to push rate r_bps through a link with power gain g.
double power_floor(double r_bps, double bandwidth, double noise_plus_omega, double gain) {
  if (r_bps <= 0.0) return 0.0;
  if (gain <= 0.0) return std::numeric_limits<double>::infinity();
  return (std::exp2(r_bps / bandwidth) - 1.0) * noise_plus_omega / gain;
}

// Projected gradient ascent with an adaptive step and a monotone accept rule.
// `project` must leave its argument feasible.
void pgd_maximize(std::vector<double>& z, const std::function<double(const std::vector<double>&)>& value,
                  const std::function<std::vector<double>(const std::vector<double>&)>& grad,
                  const std::function<void(std::vector<double>&)>& project, int max_steps) {
  project(z);
  double fz = value(z);
  double step = 1.0;
  for (int it = 0; it < max_steps; ++it) {
    const std::vector<double> g = grad(z);
    double gnorm = 0.0;
    for (const double v : g) gnorm += v * v;
    if (gnorm < 1e-20) break;
    bool accepted = false;
    for (int bt = 0; bt < 20; ++bt) {
      std::vector<double> cand = z;
      for (size_t i = 0; i < z.size(); ++i) cand[i] += step * g[i];
      project(cand);
      const double fc = value(cand);
      if (fc > fz + 1e-15) {
        z = std::move(cand);
        fz = fc;
        step *= 1.6;
        accepted = true;
        break;
      }
      step *= 0.4;
      if (step < 1e-14) break;
    }
    if (!accepted) break;
  }
}

double rel_change(const InterferenceTable& a, const InterferenceTable& b) {
  double worst = 0.0;
  auto scan = [&](const std::vector<double>& u, const std::vector<double>& v) {
    for (size_t i = 0; i < u.size(); ++i) {
      const double denom = std::max(1e-30, std::fabs(v[i]));
      worst = std::max(worst, std::fabs(u[i] - v[i]) / denom);
    }
  };
  scan(a.abs_lue, b.abs_lue);
  scan(a.sat_abs, b.sat_abs);
  scan(a.cbs_abs, b.cbs_abs);
  scan(a.sat_hue, b.sat_hue);
  scan(a.cbs_hue, b.cbs_hue);
  return worst;
}

// ---------------------------------------------------------------------------
// UAV segment consensus model: nodes are the serving ABSs; each node owns its
// access powers and the free slot positions (km). The last slot position is
// tied to the first (return-to-start), so slots 0..N-2 are free and slot N-1
// aliases slot 0.
// ---------------------------------------------------------------------------

struct AbsNode {
  int u = 0;
  std::vector<int> lues;  // served, ascending
};

class AbsConsensusModel : public ConsensusModel {
 public:
  AbsConsensusModel(const Scenario& s, const ChannelModel& ch, const InterferenceTable& frozen,
                    const InterferenceTable& worst, const std::vector<Position3D>& d_local,
                    std::vector<AbsNode> nodes, const Allocation& warm, double eta, double ee_unit,
                    int pgd_steps)
      : scn_(&s), ch_(&ch), frozen_(&frozen), worst_(&worst), d_local_(&d_local),
        nodes_(std::move(nodes)), eta_(eta), unit_(ee_unit), pgd_steps_(pgd_steps) {
    N_ = s.slot_count();
    free_ = N_ - 1;
    g0_ = ch.abs_lue_reference_gain();
    sigma_ = ch.noise_w(LinkClass::AbsToLue);
    bw_ = ch.bandwidth(LinkClass::AbsToLue);
    demand_ = demand_rate_per_slot(s);
    serving_.assign(s.abs_count(), 0);
    for (const auto& nd : nodes_) serving_[nd.u] = 1;
    warm_.resize(nodes_.size());
    for (size_t i = 0; i < nodes_.size(); ++i) {
      const AbsNode& nd = nodes_[i];
      NodeVars v;
      v.p.resize(nd.lues.size() * N_);
      for (size_t l = 0; l < nd.lues.size(); ++l)
        for (int n = 0; n < N_; ++n) v.p[l * N_ + n] = warm.pw_abs_lue(nd.u, nd.lues[l], n);
      v.x.resize(free_);
      v.y.resize(free_);
      for (int j = 0; j < free_; ++j) {
        v.x[j] = warm.pos(nd.u, j).x / 1000.0;
        v.y[j] = warm.pos(nd.u, j).y / 1000.0;
      }
      warm_[i] = std::move(v);
    }
  }

  int node_count() const override { return static_cast<int>(nodes_.size()); }
  NodeVars initial(int node) const override { return warm_[node]; }
  const std::vector<AbsNode>& nodes() const { return nodes_; }

  Position3D pos_at(int node, const NodeVars& v, int slot) const {
    const int j = slot == N_ - 1 ? 0 : slot;
    return {v.x[j] * 1000.0, v.y[j] * 1000.0, scn_->abs_initial[nodes_[node].u].z};
  }

  double node_objective(int node, const NodeVars& v) const {
    const AbsNode& nd = nodes_[node];
    double f = 0.0;
    for (size_t l = 0; l < nd.lues.size(); ++l) {
      const int ml = nd.lues[l];
      for (int n = 0; n < N_; ++n) {
        const double om = frozen_->at_abs_lue(nd.u, ml, n);
        f += rate_lower_bound(v.p[l * N_ + n], pos_at(node, v, n), scn_->lue_pos(ml, n),
                              (*d_local_)[nd.u * N_ + n], om, sigma_, bw_, g0_) /
             unit_;
        f -= eta_ * v.p[l * N_ + n];
      }
    }
    return f;
  }

  NodeVars local_update(int node, const NodeVars& global, const NodeVars& dual, double rho,
                        const NodeVars& warm) const override {
    const AbsNode& nd = nodes_[node];
    const int L = static_cast<int>(nd.lues.size());
    const int np = L * N_;
    // Flatten [p | x | y] for the generic PGD core.
    auto pack = [&](const NodeVars& nv) {
      std::vector<double> z(np + 2 * free_);
      std::copy(nv.p.begin(), nv.p.end(), z.begin());
      std::copy(nv.x.begin(), nv.x.end(), z.begin() + np);
      std::copy(nv.y.begin(), nv.y.end(), z.begin() + np + free_);
      return z;
    };
    auto unpack = [&](const std::vector<double>& z) {
      NodeVars nv;
      nv.p.assign(z.begin(), z.begin() + np);
      nv.x.assign(z.begin() + np, z.begin() + np + free_);
      nv.y.assign(z.begin() + np + free_, z.end());
      return nv;
    };

    auto value = [&](const std::vector<double>& z) {
      const NodeVars nv = unpack(z);
      double f = node_objective(node, nv);
      for (int i = 0; i < np; ++i) {
        const double gap = nv.p[i] - global.p[i];
        f -= dual.p[i] * gap + 0.5 * rho * gap * gap;
      }
      for (int j = 0; j < free_; ++j) {
        const double gx = nv.x[j] - global.x[j];
        const double gy = nv.y[j] - global.y[j];
        f -= dual.x[j] * gx + 0.5 * rho * gx * gx;
        f -= dual.y[j] * gy + 0.5 * rho * gy * gy;
      }
      return f;
    };

    auto grad = [&](const std::vector<double>& z) {
      const NodeVars nv = unpack(z);
      std::vector<double> g(z.size(), 0.0);
      for (int l = 0; l < L; ++l) {
        const int ml = nd.lues[l];
        for (int n = 0; n < N_; ++n) {
          const int ip = l * N_ + n;
          const double om = frozen_->at_abs_lue(nd.u, ml, n);
          const Position3D du = pos_at(node, nv, n);
          const Position3D dml = scn_->lue_pos(ml, n);
          const Position3D dloc = (*d_local_)[nd.u * N_ + n];
          g[ip] += rate_lower_bound_dp(nv.p[ip], du, dml, dloc, om, sigma_, bw_, g0_) / unit_;
          g[ip] -= eta_;
          g[ip] -= dual.p[ip] + rho * (nv.p[ip] - global.p[ip]);
          // d(rate)/d(position): slope wrt squared distance, chain to km.
          const double slope =
              rate_lower_bound_slope(nv.p[ip], dml, dloc, om, sigma_, bw_, g0_) / unit_;
          const int j = n == N_ - 1 ? 0 : n;
          g[np + j] += slope * 2.0 * (du.x - dml.x) * 1000.0;
          g[np + free_ + j] += slope * 2.0 * (du.y - dml.y) * 1000.0;
        }
      }
      for (int j = 0; j < free_; ++j) {
        g[np + j] -= dual.x[j] + rho * (nv.x[j] - global.x[j]);
        g[np + free_ + j] -= dual.y[j] + rho * (nv.y[j] - global.y[j]);
      }
      return g;
    };

    auto project = [&](std::vector<double>& z) {
      project_node(nd, z, np);
    };

    std::vector<double> z = pack(warm);
    pgd_maximize(z, value, grad, project, pgd_steps_);
    return unpack(z);
  }

  // Region box, leg-length caps (cyclic chain) and demand power floors.
  void project_node(const AbsNode& nd, std::vector<double>& z, int np) const {
    const double region_km = scn_->config.region_size_m / 1000.0;
    for (int j = 0; j < free_; ++j) {
      z[np + j] = std::clamp(z[np + j], 0.0, region_km);
      z[np + free_ + j] = std::clamp(z[np + free_ + j], 0.0, region_km);
    }
    const double cap_km = scn_->energy().v_max_mps * scn_->time().slot_len_s / 1000.0;
    auto leg_fix = [&](int a, int b) {
      const double dx = z[np + b] - z[np + a];
      const double dy = z[np + free_ + b] - z[np + free_ + a];
      const double len = std::hypot(dx, dy);
      if (len <= cap_km || len == 0.0) return;
      const double pull = 0.5 * (len - cap_km) / len;
      z[np + a] += pull * dx;
      z[np + free_ + a] += pull * dy;
      z[np + b] -= pull * dx;
      z[np + free_ + b] -= pull * dy;
    };
    for (int pass = 0; pass < 8; ++pass) {
      bool any = false;
      for (int j = 0; j < free_; ++j) {
        const int a = j, b = (j + 1) % free_;
        if (free_ == 1) break;
        const double dx = z[np + b] - z[np + a];
        const double dy = z[np + free_ + b] - z[np + free_ + a];
        if (std::hypot(dx, dy) > cap_km) {
          any = true;
          leg_fix(a, b);
        }
      }
      if (!any) break;
    }
    // Last resort: contract the whole loop toward its centroid.
    if (free_ > 1) {
      double worst = 0.0;
      for (int j = 0; j < free_; ++j) {
        const int b = (j + 1) % free_;
        const double len = std::hypot(z[np + b] - z[np + j], z[np + free_ + b] - z[np + free_ + j]);
        worst = std::max(worst, len);
      }
      if (worst > cap_km) {
        double cx = 0.0, cy = 0.0;
        for (int j = 0; j < free_; ++j) {
          cx += z[np + j];
          cy += z[np + free_ + j];
        }
        cx /= free_;
        cy /= free_;
        const double shrink = cap_km / worst;
        for (int j = 0; j < free_; ++j) {
          z[np + j] = cx + (z[np + j] - cx) * shrink;
          z[np + free_ + j] = cy + (z[np + free_ + j] - cy) * shrink;
        }
      }
    }
    // Demand floors at the projected positions, under the frozen interference.
    const double pmax = scn_->radio().p_max_w;
    for (size_t l = 0; l < nd.lues.size(); ++l) {
      const int ml = nd.lues[l];
      for (int n = 0; n < N_; ++n) {
        const int j = n == N_ - 1 ? 0 : n;
        const Position3D du{z[np + j] * 1000.0, z[np + free_ + j] * 1000.0,
                            scn_->abs_initial[nd.u].z};
        const double dist_sq = distance_sq(du, scn_->lue_pos(ml, n));
        const double floor =
            power_floor(demand_, bw_, frozen_->at_abs_lue(nd.u, ml, n) + sigma_, g0_ / dist_sq);
        z[l * N_ + n] = std::max(z[l * N_ + n], std::min(floor, pmax));
      }
    }
  }

  // Shared constraints on the global copies: power boxes, region box and the
  // linearized pairwise safe distance (projected per slot).
  void project_globals(std::vector<NodeVars>& globals) const override {
    const double pmax = scn_->radio().p_max_w;
    const double region_km = scn_->config.region_size_m / 1000.0;
    for (auto& g : globals) {
      for (double& p : g.p) p = std::clamp(p, 0.0, pmax);
      for (double& x : g.x) x = std::clamp(x, 0.0, region_km);
      for (double& y : g.y) y = std::clamp(y, 0.0, region_km);
    }
    const double d_th = scn_->radio().d_th;
    for (int pass = 0; pass < 6; ++pass) {
      bool any = false;
      for (int j = 0; j < free_; ++j) {
        // Moving pairs (both consensus copies).
        for (size_t i = 0; i < nodes_.size(); ++i)
          for (size_t k = i + 1; k < nodes_.size(); ++k)
            any |= project_pair(globals[i], globals[k], nodes_[i].u, nodes_[k].u, j, d_th);
        // Serving node against the fixed positions of idle ABSs.
        for (size_t i = 0; i < nodes_.size(); ++i)
          for (int u = 0; u < scn_->abs_count(); ++u)
            if (!serving_[u]) any |= project_fixed(globals[i], nodes_[i].u, u, j, d_th);
      }
      if (!any) break;
    }
  }

 private:
  // Half-space projection of the linearized constraint f_lb >= d_th for one
  // moving pair at free-slot j. Expansion points fix the normal.
  bool project_pair(NodeVars& gi, NodeVars& gk, int ui, int uk, int j, double d_th) const {
    const int slot = j;
    const Position3D li = (*d_local_)[ui * N_ + slot];
    const Position3D lk = (*d_local_)[uk * N_ + slot];
    const double ax = li.x - lk.x, ay = li.y - lk.y, az = li.z - lk.z;
    const double norm0_sq = ax * ax + ay * ay + az * az;
    const double dz = scn_->abs_initial[ui].z - scn_->abs_initial[uk].z;
    // f_lb in meters^2, positions in km.
    const double dxm = (gi.x[j] - gk.x[j]) * 1000.0;
    const double dym = (gi.y[j] - gk.y[j]) * 1000.0;
    const double f_lb = -norm0_sq + 2.0 * (ax * dxm + ay * dym + az * dz);
    if (f_lb >= d_th) return false;
    const double nsq = ax * ax + ay * ay;
    if (nsq < 1e-12) return false;  // degenerate normal; nothing to project on
    // Exact projection onto the half-space over the four free meter coords.
    const double shift_m = (d_th - f_lb) / (4.0 * nsq);
    gi.x[j] += shift_m * ax / 1000.0;
    gi.y[j] += shift_m * ay / 1000.0;
    gk.x[j] -= shift_m * ax / 1000.0;
    gk.y[j] -= shift_m * ay / 1000.0;
    return true;
  }

  bool project_fixed(NodeVars& gi, int ui, int u_fixed, int j, double d_th) const {
    const int slot = j;
    const Position3D li = (*d_local_)[ui * N_ + slot];
    const Position3D lk = scn_->abs_initial[u_fixed];
    const double ax = li.x - lk.x, ay = li.y - lk.y, az = li.z - lk.z;
    const double norm0_sq = ax * ax + ay * ay + az * az;
    const double dz = scn_->abs_initial[ui].z - lk.z;
    const double dxm = gi.x[j] * 1000.0 - lk.x;
    const double dym = gi.y[j] * 1000.0 - lk.y;
    const double f_lb = -norm0_sq + 2.0 * (ax * dxm + ay * dym + az * dz);
    if (f_lb >= d_th) return false;
    const double nsq = ax * ax + ay * ay;
    if (nsq < 1e-12) return false;
    const double shift_m = (d_th - f_lb) / (2.0 * nsq);
    gi.x[j] += shift_m * ax / 1000.0;
    gi.y[j] += shift_m * ay / 1000.0;
    return true;
  }

  const Scenario* scn_;
  const ChannelModel* ch_;
  const InterferenceTable* frozen_;
  const InterferenceTable* worst_;
  const std::vector<Position3D>* d_local_;
  std::vector<AbsNode> nodes_;
  std::vector<char> serving_;
  std::vector<NodeVars> warm_;
  double eta_;
  double unit_;
  int pgd_steps_;
  int N_ = 0;
  int free_ = 0;
  double g0_ = 0.0, sigma_ = 0.0, bw_ = 0.0, demand_ = 0.0;
};

// ---------------------------------------------------------------------------
// Power-only consensus model (satellite: one node; CBS: one node per serving
// station). Same code path as the UAV instance with empty deployment blocks.
// ---------------------------------------------------------------------------

struct PowerLink {
  double gain = 0.0;
  double bandwidth = 0.0;
  double omega = 0.0;
  double sigma = 0.0;
  double floor_w = 0.0;
};

struct PowerNode {
  int id = 0;                    // satellite: 0; CBS: c
  std::vector<PowerLink> links;  // link-major, slots inline: links[l*N+n]
  int n_links = 0;
};

class PowerConsensusModel : public ConsensusModel {
 public:
  PowerConsensusModel(const Scenario& s, std::vector<PowerNode> nodes, const std::vector<NodeVars>& warm,
                      double eta, double ee_unit, int pgd_steps)
      : scn_(&s), nodes_(std::move(nodes)), warm_(warm), eta_(eta), unit_(ee_unit),
        pgd_steps_(pgd_steps) {}

  int node_count() const override { return static_cast<int>(nodes_.size()); }
  NodeVars initial(int node) const override { return warm_[node]; }

  double node_objective(int node, const NodeVars& v) const {
    const PowerNode& nd = nodes_[node];
    double f = 0.0;
    for (size_t i = 0; i < nd.links.size(); ++i) {
      const PowerLink& l = nd.links[i];
      f += shannon_rate(l.bandwidth, sinr(v.p[i], l.gain, l.omega, l.sigma)) / unit_;
      f -= eta_ * v.p[i];
    }
    return f;
  }

  NodeVars local_update(int node, const NodeVars& global, const NodeVars& dual, double rho,
                        const NodeVars& warm) const override {
    const PowerNode& nd = nodes_[node];
    auto value = [&](const std::vector<double>& z) {
      double f = 0.0;
      for (size_t i = 0; i < nd.links.size(); ++i) {
        const PowerLink& l = nd.links[i];
        f += shannon_rate(l.bandwidth, sinr(z[i], l.gain, l.omega, l.sigma)) / unit_;
        f -= eta_ * z[i];
        const double gap = z[i] - global.p[i];
        f -= dual.p[i] * gap + 0.5 * rho * gap * gap;
      }
      return f;
    };
    auto grad = [&](const std::vector<double>& z) {
      std::vector<double> g(z.size());
      for (size_t i = 0; i < nd.links.size(); ++i) {
        const PowerLink& l = nd.links[i];
        g[i] = l.bandwidth * l.gain / (kLn2 * (l.omega + l.sigma + z[i] * l.gain)) / unit_ - eta_ -
               dual.p[i] - rho * (z[i] - global.p[i]);
      }
      return g;
    };
    const double pmax = scn_->radio().p_max_w;
    auto project = [&](std::vector<double>& z) {
      for (size_t i = 0; i < nd.links.size(); ++i)
        z[i] = std::max(z[i], std::min(nd.links[i].floor_w, pmax));
    };
    std::vector<double> z = warm.p;
    pgd_maximize(z, value, grad, project, pgd_steps_);
    NodeVars out;
    out.p = std::move(z);
    return out;
  }

  void project_globals(std::vector<NodeVars>& globals) const override {
    const double pmax = scn_->radio().p_max_w;
    for (auto& g : globals)
      for (double& p : g.p) p = std::clamp(p, 0.0, pmax);
  }

 private:
  const Scenario* scn_;
  std::vector<PowerNode> nodes_;
  std::vector<NodeVars> warm_;
  double eta_;
  double unit_;
  int pgd_steps_;
};

AdmmOptions admm_options(const SolverOptions& opts, bool reduced) {
  AdmmOptions a;
  a.rho = opts.rho;
  a.adaptive_rho = opts.adaptive_rho;
  a.tol = reduced ? opts.admm_tol * 10.0 : opts.admm_tol;
  a.max_iters = reduced ? std::max(50, opts.admm_max_iters / 8) : opts.admm_max_iters;
  return a;
}

}  // namespace

// ---------------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------------

std::vector<int> cbs_backhaul_candidates(const Scenario& s, int u) {
  std::vector<int> out;
  for (int c = 0; c < s.cbs_count(); ++c) {
    if (distance(s.abs_initial[u], s.cbs[c]) <= s.config.cbs_radius_m) out.push_back(c);
  }
  return out;
}

std::vector<int> cbs_hue_candidates(const Scenario& s, int c) {
  std::vector<int> out;
  for (int mh = 0; mh < s.hue_count(); ++mh) {
    bool inside = true;
    for (int n = 0; n < s.slot_count() && inside; ++n)
      inside = distance(s.cbs[c], s.hue_pos(mh, n)) <= s.config.cbs_radius_m;
    if (inside) out.push_back(mh);
  }
  return out;
}

std::vector<int> sat_hue_candidates(const Scenario& s) {
  std::vector<char> covered(s.hue_count(), 0);
  for (int c = 0; c < s.cbs_count(); ++c)
    for (const int mh : cbs_hue_candidates(s, c)) covered[mh] = 1;
  std::vector<int> out;
  for (int mh = 0; mh < s.hue_count(); ++mh)
    if (!covered[mh]) out.push_back(mh);
  return out;
}

Allocation reference_allocation(const Scenario& s) {
  Allocation al = Allocation::initial(s);
  const double p = s.radio().p_max_w;
  for (int n = 0; n < al.N; ++n) {
    for (int u = 0; u < al.U; ++u)
      if (al.Ml > 0) al.pw_abs_lue(u, 0, n) = p;
    if (al.U > 0)
      al.pw_sat_abs(0, n) = p;
    else if (al.Mh > 0)
      al.pw_sat_hue(0, n) = p;
    for (int c = 0; c < al.C; ++c) {
      if (al.U > 0)
        al.pw_cbs_abs(c, 0, n) = p;
      else if (al.Mh > 0)
        al.pw_cbs_hue(c, 0, n) = p;
    }
  }
  return al;
}

BackhaulFloors backhaul_floors(const ChannelModel& ch, const Association& as, const Allocation& al) {
  const Scenario& s = ch.scenario();
  BackhaulFloors f;
  f.sat_abs.assign(size_t(al.U) * al.N, 0.0);
  f.cbs_abs.assign(size_t(al.C) * al.U * al.N, 0.0);
  const double sigma = ch.noise_w(LinkClass::AbsToLue);
  const double bw = ch.bandwidth(LinkClass::AbsToLue);
  const double g0 = ch.abs_lue_reference_gain();
  for (int u = 0; u < al.U; ++u) {
    const Backhaul b = as.backhaul(u);
    if (b.kind == BackhaulKind::None) continue;
    for (int n = 0; n < al.N; ++n) {
      double traffic = 0.0;
      for (const int ml : as.served_lues(u)) {
        // Zero-interference bound on what the access link can ever carry.
        traffic += rate_exact(al.pw_abs_lue(u, ml, n), al.pos(u, n), s.lue_pos(ml, n), 0.0, sigma,
                              bw, g0);
      }
      if (b.kind == BackhaulKind::Sat)
        f.sat_abs[u * al.N + n] = traffic;
      else
        f.cbs_abs[(b.cbs * al.U + u) * al.N + n] = traffic;
    }
  }
  return f;
}

PowerOptResult optimize_link_powers(const std::vector<PowerOptLink>& links, double fixed_power_w,
                                    double p_max_w, double ee_unit, double upsilon, int max_iters) {
  PowerOptResult res;
  res.p.assign(links.size(), 0.0);
  for (const auto& l : links) {
    if (l.floor_w > p_max_w * kFloorSlack) {
      res.feasible = false;
      return res;
    }
  }
  auto inner = [&](double eta) {
    double rate = 0.0, power = fixed_power_w;
    for (size_t i = 0; i < links.size(); ++i) {
      const PowerOptLink& l = links[i];
      double p;
      if (l.gain <= 0.0) {
        p = std::min(l.floor_w, p_max_w);
      } else if (eta <= 0.0) {
        p = p_max_w;
      } else {
        p = l.bandwidth / (ee_unit * kLn2 * eta) - l.noise_plus_interference / l.gain;
        p = std::clamp(p, std::min(l.floor_w, p_max_w), p_max_w);
      }
      p = std::max(p, std::min(l.floor_w, p_max_w));
      res.p[i] = p;
      if (l.gain > 0.0)
        rate += shannon_rate(l.bandwidth, sinr(p, l.gain, l.noise_plus_interference, 0.0)) / ee_unit;
      power += p;
    }
    return DinkelbachStep{rate, power};
  };
  if (fixed_power_w <= 0.0 && links.empty()) {
    res.eta = 0.0;
    return res;
  }
  DinkelbachStep last{};
  const DinkelbachResult dr = run_dinkelbach(
      [&](double eta) {
        last = inner(eta);
        return last;
      },
      upsilon, max_iters);
  res.eta = dr.eta_star;
  res.rate = last.rate;
  res.power = last.power;
  return res;
}

// ---------------------------------------------------------------------------
// UAV segment oracle
// ---------------------------------------------------------------------------

AbsSegmentOracle::AbsSegmentOracle(const Scenario& s, const ChannelModel& ch,
                                   const SolverOptions& opts)
    : scn_(&s), ch_(&ch), opts_(opts), base_(reference_allocation(s)) {
  frozen_ = refreeze_interference(ch, base_);
  worst_ = worst_case_interference(ch);
  d_local_.resize(size_t(s.abs_count()) * s.slot_count());
  for (int u = 0; u < s.abs_count(); ++u)
    for (int n = 0; n < s.slot_count(); ++n) d_local_[u * s.slot_count() + n] = s.abs_initial[u];
  for (int u = 0; u < s.abs_count(); ++u)
    for (int ml = 0; ml < s.lue_count(); ++ml) bits_.push_back({BitKind::AbsServesLue, u, ml});
  for (int u = 0; u < s.abs_count(); ++u) bits_.push_back({BitKind::AbsBackhaulSat, u, 0});
  for (int c = 0; c < s.cbs_count(); ++c)
    for (int u = 0; u < s.abs_count(); ++u) {
      const auto cands = cbs_backhaul_candidates(s, u);
      if (std::find(cands.begin(), cands.end(), c) != cands.end())
        bits_.push_back({BitKind::AbsBackhaulCbs, c, u});
    }
}

MasterProblem AbsSegmentOracle::master_skeleton() const {
  MasterProblem mp;
  mp.bits = bits_;
  const int U = scn_->abs_count();
  const int Ml = scn_->lue_count();
  // Per-ABS RB capacity (family 0) and per-LUE uniqueness (family 1).
  for (int u = 0; u < U; ++u) {
    CapGroup g;
    g.cap = scn_->radio().k_rb;
    g.family = 0;
    for (size_t b = 0; b < bits_.size(); ++b)
      if (bits_[b].kind == BitKind::AbsServesLue && bits_[b].a == u) g.bits.push_back(int(b));
    mp.groups.push_back(std::move(g));
  }
  for (int ml = 0; ml < Ml; ++ml) {
    CapGroup g;
    g.cap = 1;
    g.family = 1;
    for (size_t b = 0; b < bits_.size(); ++b)
      if (bits_[b].kind == BitKind::AbsServesLue && bits_[b].b == ml) g.bits.push_back(int(b));
    mp.groups.push_back(std::move(g));
  }
  for (int u = 0; u < U; ++u) {
    CapGroup g;
    g.cap = 1;
    g.family = 0;
    Implication serve_needs_backhaul, backhaul_needs_serve;
    for (size_t b = 0; b < bits_.size(); ++b) {
      const MasterBit& mb = bits_[b];
      const bool is_backhaul = (mb.kind == BitKind::AbsBackhaulSat && mb.a == u) ||
                               (mb.kind == BitKind::AbsBackhaulCbs && mb.b == u);
      const bool is_serve = mb.kind == BitKind::AbsServesLue && mb.a == u;
      if (is_backhaul) {
        g.bits.push_back(int(b));
        serve_needs_backhaul.then_any.push_back(int(b));
        backhaul_needs_serve.if_any.push_back(int(b));
      }
      if (is_serve) {
        serve_needs_backhaul.if_any.push_back(int(b));
        backhaul_needs_serve.then_any.push_back(int(b));
      }
    }
    mp.groups.push_back(std::move(g));
    if (!serve_needs_backhaul.if_any.empty() && !serve_needs_backhaul.then_any.empty()) {
      mp.implications.push_back(std::move(serve_needs_backhaul));
      mp.implications.push_back(std::move(backhaul_needs_serve));
    }
  }
  return mp;
}

int AbsSegmentOracle::find_bit(BitKind kind, int a, int b) const {
  for (size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i].kind == kind && bits_[i].a == a && bits_[i].b == b) return static_cast<int>(i);
  return -1;
}

// Backhaul bit (nearest covering CBS, else satellite) for ABS u.
int AbsSegmentOracle::default_backhaul_bit(int u) const {
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (int c = 0; c < scn_->cbs_count(); ++c) {
    const double d = distance(scn_->abs_initial[u], scn_->cbs[c]);
    if (d <= scn_->config.cbs_radius_m && d < best_d) {
      best = c;
      best_d = d;
    }
  }
  if (best >= 0) return find_bit(BitKind::AbsBackhaulCbs, best, u);
  return find_bit(BitKind::AbsBackhaulSat, u, 0);
}

// Highest-gain-first seed association so the first Benders anchor carries
// informative finite-difference duals.
std::vector<std::uint8_t> AbsSegmentOracle::initial_assignment() const {
  const Scenario& s = *scn_;
  std::vector<std::uint8_t> bits(bits_.size(), 0);
  struct Cand {
    double gain;
    int u, ml;
  };
  std::vector<Cand> cands;
  for (int u = 0; u < s.abs_count(); ++u)
    for (int ml = 0; ml < s.lue_count(); ++ml)
      cands.push_back({ch_->gain_abs_at(s.abs_initial[u], s.lue_pos(ml, 0)), u, ml});
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    if (a.gain != b.gain) return a.gain > b.gain;
    if (a.u != b.u) return a.u < b.u;
    return a.ml < b.ml;
  });
  const double bw = ch_->bandwidth(LinkClass::AbsToLue);
  const double sigma = ch_->noise_w(LinkClass::AbsToLue);
  const double g0 = ch_->abs_lue_reference_gain();
  std::vector<int> load(s.abs_count(), 0);
  std::vector<char> taken(s.lue_count(), 0);
  for (const auto& c : cands) {
    if (taken[c.ml] || load[c.u] >= s.radio().k_rb) continue;
    bool ok = true;
    for (int n = 0; n < s.slot_count() && ok; ++n) {
      const double dist_sq = distance_sq(s.abs_initial[c.u], s.lue_pos(c.ml, n));
      ok = power_floor(demand_rate_per_slot(s), bw, frozen_.at_abs_lue(c.u, c.ml, n) + sigma,
                       g0 / dist_sq) <= s.radio().p_max_w * kFloorSlack;
    }
    if (!ok) continue;
    const int b = find_bit(BitKind::AbsServesLue, c.u, c.ml);
    if (b < 0) continue;
    bits[b] = 1;
    ++load[c.u];
    taken[c.ml] = 1;
  }
  for (int u = 0; u < s.abs_count(); ++u) {
    if (load[u] == 0) continue;
    const int b = default_backhaul_bit(u);
    if (b >= 0) bits[b] = 1;
  }
  return bits;
}

std::vector<std::uint8_t> AbsSegmentOracle::flip_assignment(const std::vector<std::uint8_t>& bits,
                                                            int b) const {
  std::vector<std::uint8_t> out = bits;
  out[b] ^= 1;
  const MasterBit& mb = bits_[b];
  auto serve_count = [&](int u) {
    int cnt = 0;
    for (size_t i = 0; i < bits_.size(); ++i)
      if (bits_[i].kind == BitKind::AbsServesLue && bits_[i].a == u && out[i]) ++cnt;
    return cnt;
  };
  auto clear_backhaul = [&](int u) {
    for (size_t i = 0; i < bits_.size(); ++i) {
      const bool is_bh = (bits_[i].kind == BitKind::AbsBackhaulSat && bits_[i].a == u) ||
                         (bits_[i].kind == BitKind::AbsBackhaulCbs && bits_[i].b == u);
      if (is_bh) out[i] = 0;
    }
  };
  if (mb.kind == BitKind::AbsServesLue) {
    const int u = mb.a;
    if (out[b] && serve_count(u) == 1) {
      // first served link: pair with the default backhaul choice
      const int bh = default_backhaul_bit(u);
      bool has = false;
      for (size_t i = 0; i < bits_.size(); ++i) {
        const bool is_bh = (bits_[i].kind == BitKind::AbsBackhaulSat && bits_[i].a == u) ||
                           (bits_[i].kind == BitKind::AbsBackhaulCbs && bits_[i].b == u);
        has |= is_bh && out[i];
      }
      if (!has && bh >= 0) out[bh] = 1;
    } else if (!out[b] && serve_count(u) == 0) {
      clear_backhaul(u);
    }
  } else {
    // backhaul flip: switching on clears the other choice; switching the only
    // backhaul off while the ABS still serves would break the implication, so
    // move the choice instead of dropping it.
    const int u = mb.kind == BitKind::AbsBackhaulSat ? mb.a : mb.b;
    if (out[b]) {
      for (size_t i = 0; i < bits_.size(); ++i) {
        if (static_cast<int>(i) == b) continue;
        const bool is_bh = (bits_[i].kind == BitKind::AbsBackhaulSat && bits_[i].a == u) ||
                           (bits_[i].kind == BitKind::AbsBackhaulCbs && bits_[i].b == u);
        if (is_bh) out[i] = 0;
      }
    } else if (serve_count(u) > 0) {
      int alt = -1;
      for (size_t i = 0; i < bits_.size(); ++i) {
        if (static_cast<int>(i) == b) continue;
        const bool is_bh = (bits_[i].kind == BitKind::AbsBackhaulSat && bits_[i].a == u) ||
                           (bits_[i].kind == BitKind::AbsBackhaulCbs && bits_[i].b == u);
        if (is_bh) {
          alt = static_cast<int>(i);
          break;
        }
      }
      if (alt >= 0) out[alt] = 1;
    }
  }
  return out;
}

Association AbsSegmentOracle::bits_to_association(const std::vector<std::uint8_t>& bits) const {
  Association as = Association::empty(*scn_);
  std::vector<std::vector<int>> served(scn_->abs_count());
  std::vector<int> sat_abs;
  std::vector<std::vector<int>> cbs_abs(scn_->cbs_count());
  for (size_t b = 0; b < bits_.size(); ++b) {
    if (!bits[b]) continue;
    const MasterBit& mb = bits_[b];
    if (mb.kind == BitKind::AbsServesLue) served[mb.a].push_back(mb.b);
    if (mb.kind == BitKind::AbsBackhaulSat) sat_abs.push_back(mb.a);
    if (mb.kind == BitKind::AbsBackhaulCbs) cbs_abs[mb.a].push_back(mb.b);
  }
  for (int u = 0; u < scn_->abs_count(); ++u) as.set_abs_service(u, served[u]);
  as.set_sat_service(sat_abs, {});
  for (int c = 0; c < scn_->cbs_count(); ++c) as.set_cbs_service(c, cbs_abs[c], {});
  return as;
}

bool AbsSegmentOracle::refreeze(const Allocation& previous) {
  static constexpr double kStableTol = 0.02;
  if (refreeze_epochs_ >= 4) return false;
  const InterferenceTable next = refreeze_interference(*ch_, previous);
  const double change = rel_change(next, frozen_);
  if (change <= kStableTol) return false;
  frozen_ = next;
  for (int u = 0; u < scn_->abs_count(); ++u)
    for (int n = 0; n < scn_->slot_count(); ++n)
      d_local_[u * scn_->slot_count() + n] = previous.pos(u, n);
  ++refreeze_epochs_;
  return true;
}

SubproblemResult AbsSegmentOracle::solve(const std::vector<std::uint8_t>& bits, bool reduced) {
  const Scenario& s = *scn_;
  const int N = s.slot_count();
  SubproblemResult res;
  res.assoc = bits_to_association(bits);
  res.alloc = base_;
  for (int u = 0; u < res.alloc.U; ++u)
    for (int ml = 0; ml < res.alloc.Ml; ++ml)
      for (int n = 0; n < N; ++n) res.alloc.pw_abs_lue(u, ml, n) = 0.0;
  for (int u = 0; u < res.alloc.U; ++u)
    for (int n = 0; n < N; ++n) res.alloc.pos(u, n) = s.abs_initial[u];
  res.alloc.derive_speeds(s);

  std::vector<AbsNode> nodes;
  for (int u = 0; u < s.abs_count(); ++u) {
    const std::vector<int> lues = res.assoc.served_lues(u);
    if (!lues.empty()) nodes.push_back({u, lues});
  }

  const double unit = opts_.ee_unit;
  const double bw = ch_->bandwidth(LinkClass::AbsToLue);
  const double sigma = ch_->noise_w(LinkClass::AbsToLue);
  const double g0 = ch_->abs_lue_reference_gain();
  const double demand = demand_rate_per_slot(s);
  const double pmax = s.radio().p_max_w;

  auto total_flight = [&](const Allocation& al) {
    double p = 0.0;
    for (int u = 0; u < al.U; ++u)
      for (int n = 0; n < N; ++n) p += flight_power_at(s, al, u, n);
    return p;
  };

  // Demand feasibility against worst-case interference at the closest
  // reachable geometry (the ABS directly above the LUE); the post-solve check
  // below decides whether the deployment actually reached far enough.
  for (const auto& nd : nodes) {
    for (const int ml : nd.lues) {
      for (int n = 0; n < N; ++n) {
        const double h = s.abs_initial[nd.u].z;
        const double fl = power_floor(demand, bw, frozen_.at_abs_lue(nd.u, ml, n) + sigma,
                                      g0 / (h * h));
        if (fl > pmax * kFloorSlack) {
          res.feasible = false;
          return res;
        }
      }
    }
  }

  if (nodes.empty()) {
    res.rate = 0.0;
    res.power = total_flight(res.alloc);
    res.eta = 0.0;
    res.dinkelbach = run_dinkelbach([&](double) { return DinkelbachStep{0.0, res.power}; },
                                    opts_.upsilon, 2);
    res.admm_converged = true;
    return res;
  }

  const int dink_cap = reduced ? std::max(3, opts_.max_dinkelbach_iters / 4)
                               : opts_.max_dinkelbach_iters;
  const int pgd_steps = reduced ? std::max(8, opts_.pgd_max_steps / 2) : opts_.pgd_max_steps;

  std::optional<std::vector<NodeVars>> warm_locals;
  Allocation best_alloc = res.alloc;
  AdmmResult last_admm;
  double warm_f = -std::numeric_limits<double>::infinity();

  auto extract = [&](const std::vector<NodeVars>& globals, Allocation& out) {
    for (size_t i = 0; i < nodes.size(); ++i) {
      const AbsNode& nd = nodes[i];
      for (int j = 0; j < N - 1; ++j) {
        out.pos(nd.u, j) = {globals[i].x[j] * 1000.0, globals[i].y[j] * 1000.0,
                            s.abs_initial[nd.u].z};
      }
      out.pos(nd.u, N - 1) = out.pos(nd.u, 0);
      for (size_t l = 0; l < nd.lues.size(); ++l) {
        const int ml = nd.lues[l];
        for (int n = 0; n < N; ++n) {
          const double dist_sq = distance_sq(out.pos(nd.u, n), s.lue_pos(ml, n));
          const double fl = power_floor(demand, bw, frozen_.at_abs_lue(nd.u, ml, n) + sigma,
                                        g0 / dist_sq);
          out.pw_abs_lue(nd.u, ml, n) =
              std::clamp(globals[i].p[l * N + n], std::min(fl, pmax), pmax);
        }
      }
    }
    out.derive_speeds(s);
  };

  auto lb_rate_of = [&](const Allocation& al) {
    double r = 0.0;
    for (const auto& nd : nodes)
      for (const int ml : nd.lues)
        for (int n = 0; n < N; ++n)
          r += rate_lower_bound(al.pw_abs_lue(nd.u, ml, n), al.pos(nd.u, n), s.lue_pos(ml, n),
                                d_local_[nd.u * N + n], frozen_.at_abs_lue(nd.u, ml, n), sigma, bw,
                                g0);
    return r / unit;
  };
  auto access_power_of = [&](const Allocation& al) {
    double p = 0.0;
    for (const auto& nd : nodes)
      for (const int ml : nd.lues)
        for (int n = 0; n < N; ++n) p += al.pw_abs_lue(nd.u, ml, n);
    return p;
  };

  // The inner maximizer never returns a point worse than its warm start,
  // which keeps the outer eta sequence non-decreasing.
  auto inner = [&](double eta) {
    const double warm_f =
        warm_locals ? (lb_rate_of(best_alloc) -
                       eta * (access_power_of(best_alloc) + total_flight(best_alloc)))
                    : -std::numeric_limits<double>::infinity();
    AbsConsensusModel model(s, *ch_, frozen_, worst_, d_local_, nodes, best_alloc, eta, unit,
                            pgd_steps);
    const AdmmOptions aopts = admm_options(opts_, reduced);
    last_admm = run_admm(model, aopts, warm_locals ? &*warm_locals : nullptr);
    Allocation cand = best_alloc;
    extract(last_admm.globals, cand);
    const double cand_f = lb_rate_of(cand) - eta * (access_power_of(cand) + total_flight(cand));
    if (cand_f >= warm_f) {
      best_alloc = cand;
      warm_locals = last_admm.locals;
    }
    const double rate = lb_rate_of(best_alloc);
    const double power = access_power_of(best_alloc) + total_flight(best_alloc);
    return DinkelbachStep{rate, power};
  };

  res.dinkelbach = run_dinkelbach(inner, opts_.upsilon, dink_cap);

  res.alloc = best_alloc;
  res.admm_converged = last_admm.converged;
  res.admm_primal = last_admm.primal_res;
  res.admm_dual = last_admm.dual_res;
  res.admm_trace = last_admm.trace;

  // Horizon demand verification under the solution's own interference. The
  // per-slot floors only guide the solver; the constraint itself sums slots.
  for (const auto& nd : nodes)
    for (const int ml : nd.lues) {
      double sum = 0.0;
      for (int n = 0; n < N; ++n) {
        const double om = interference_abs_lue(*ch_, res.alloc, nd.u, ml, n);
        sum += rate_exact(res.alloc.pw_abs_lue(nd.u, ml, n), res.alloc.pos(nd.u, n),
                          s.lue_pos(ml, n), om, sigma, bw, g0);
      }
      if (sum < s.radio().rate_threshold_bps * (1.0 - 1e-9)) {
        res.feasible = false;
        return res;
      }
    }

  // Backhaul capacity guard: optimistic access traffic against pessimistic
  // backhaul capacity at p_max; powers scale down toward the floors when the
  // pipes are too thin (rarely binding with the default bandwidth split).
  const double sig_bh = ch_->noise_w(LinkClass::SatToAbs);
  const double sig_cb = ch_->noise_w(LinkClass::CbsToAbs);
  for (int n = 0; n < N; ++n) {
    double opt_traffic_sat = 0.0, cap_sat = 0.0, opt_traffic_cbs = 0.0, cap_cbs = 0.0;
    for (const auto& nd : nodes) {
      double traffic = 0.0;
      for (const int ml : nd.lues)
        traffic += rate_exact(res.alloc.pw_abs_lue(nd.u, ml, n), res.alloc.pos(nd.u, n),
                              s.lue_pos(ml, n), 0.0, sigma, bw, g0);
      const Backhaul b = res.assoc.backhaul(nd.u);
      if (b.kind == BackhaulKind::Cbs) {
        opt_traffic_cbs += traffic;
        cap_cbs += shannon_rate(ch_->bandwidth(LinkClass::CbsToAbs),
                                sinr(pmax, ch_->gain_cbs_abs(b.cbs, nd.u, n),
                                     worst_.at_cbs_abs(b.cbs, nd.u, n), sig_cb));
      } else {
        opt_traffic_sat += traffic;
        if (b.kind == BackhaulKind::Sat)
          cap_sat += shannon_rate(ch_->bandwidth(LinkClass::SatToAbs),
                                  sinr(pmax, ch_->gain_sat_abs(nd.u, n),
                                       worst_.at_sat_abs(nd.u, n), sig_bh));
      }
    }
    if (opt_traffic_sat > cap_sat || opt_traffic_cbs > cap_cbs) {
      res.feasible = false;
      return res;
    }
  }

  // Achieved ratio with exact rates under the frozen interference.
  double rate_exact_sum = 0.0;
  for (const auto& nd : nodes)
    for (const int ml : nd.lues)
      for (int n = 0; n < N; ++n)
        rate_exact_sum += rate_exact(res.alloc.pw_abs_lue(nd.u, ml, n), res.alloc.pos(nd.u, n),
                                     s.lue_pos(ml, n), frozen_.at_abs_lue(nd.u, ml, n), sigma, bw,
                                     g0);
  res.rate = rate_exact_sum / unit;
  res.power = access_power_of(res.alloc) + total_flight(res.alloc);
  res.eta = res.rate / res.power;
  return res;
}

// ---------------------------------------------------------------------------
// Power-only segment oracle (satellite / CBS)
// ---------------------------------------------------------------------------

PowerSegmentOracle::PowerSegmentOracle(Segment seg, const Scenario& s, const ChannelModel& ch,
                                       const SolverOptions& opts, std::vector<int> required_abs,
                                       const BackhaulFloors& floors, std::vector<int> hue_candidates,
                                       const Allocation* interference_base)
    : seg_(seg), scn_(&s), ch_(&ch), opts_(opts),
      base_(interference_base ? *interference_base : reference_allocation(s)),
      required_abs_(std::move(required_abs)), floors_(floors),
      hue_candidates_(std::move(hue_candidates)) {
  if (seg_ == Segment::Abs) throw std::invalid_argument("power oracle: use AbsSegmentOracle");
  frozen_ = refreeze_interference(ch, base_);
  worst_ = worst_case_interference(ch);
  if (seg_ == Segment::Sat) {
    for (const int u : required_abs_) bits_.push_back({BitKind::SatServesAbs, u, 0});
    for (const int mh : hue_candidates_) bits_.push_back({BitKind::SatServesHue, mh, 0});
  } else {
    for (const int cu : required_abs_) bits_.push_back({BitKind::CbsServesAbs, cu / s.abs_count(),
                                                        cu % s.abs_count()});
    for (int c = 0; c < s.cbs_count(); ++c)
      for (const int mh : cbs_hue_candidates(s, c))
        if (std::find(hue_candidates_.begin(), hue_candidates_.end(), mh) != hue_candidates_.end())
          bits_.push_back({BitKind::CbsServesHue, c, mh});
  }
}

std::vector<int> PowerSegmentOracle::required_from(Segment seg, const Association& as,
                                                   int /*cbs_index*/) {
  std::vector<int> out;
  for (int u = 0; u < as.U; ++u) {
    const Backhaul b = as.backhaul(u);
    if (seg == Segment::Sat && b.kind == BackhaulKind::Sat) out.push_back(u);
    if (seg == Segment::Cbs && b.kind == BackhaulKind::Cbs) out.push_back(b.cbs * as.U + u);
  }
  return out;
}

MasterProblem PowerSegmentOracle::master_skeleton() const {
  MasterProblem mp;
  mp.bits = bits_;
  if (seg_ == Segment::Sat) {
    CapGroup g;
    g.cap = scn_->radio().z_rb;
    g.family = 0;
    for (size_t b = 0; b < bits_.size(); ++b) g.bits.push_back(int(b));
    mp.groups.push_back(std::move(g));
    if (static_cast<int>(required_abs_.size()) > scn_->radio().z_rb)
      throw std::invalid_argument("satellite: more required backhaul links than RBs");
  } else {
    for (int c = 0; c < scn_->cbs_count(); ++c) {
      CapGroup g;
      g.cap = scn_->radio().y_rb;
      g.family = 0;
      for (size_t b = 0; b < bits_.size(); ++b)
        if (bits_[b].a == c) g.bits.push_back(int(b));
      mp.groups.push_back(std::move(g));
    }
    for (int mh = 0; mh < scn_->hue_count(); ++mh) {
      CapGroup g;
      g.cap = 1;
      g.family = 1;
      for (size_t b = 0; b < bits_.size(); ++b)
        if (bits_[b].kind == BitKind::CbsServesHue && bits_[b].b == mh) g.bits.push_back(int(b));
      if (!g.bits.empty()) mp.groups.push_back(std::move(g));
    }
  }
  for (size_t b = 0; b < bits_.size(); ++b)
    if (bits_[b].kind == BitKind::SatServesAbs || bits_[b].kind == BitKind::CbsServesAbs)
      mp.pinned.push_back({int(b), 1});
  return mp;
}

std::vector<std::uint8_t> PowerSegmentOracle::initial_assignment() const {
  std::vector<std::uint8_t> a(bits_.size(), 0);
  for (size_t b = 0; b < bits_.size(); ++b)
    if (bits_[b].kind == BitKind::SatServesAbs || bits_[b].kind == BitKind::CbsServesAbs) a[b] = 1;
  return a;
}

Association PowerSegmentOracle::bits_to_association(const std::vector<std::uint8_t>& bits) const {
  Association as = Association::empty(*scn_);
  if (seg_ == Segment::Sat) {
    std::vector<int> abss, hues;
    for (size_t b = 0; b < bits_.size(); ++b) {
      if (!bits[b]) continue;
      if (bits_[b].kind == BitKind::SatServesAbs) abss.push_back(bits_[b].a);
      if (bits_[b].kind == BitKind::SatServesHue) hues.push_back(bits_[b].a);
    }
    as.set_sat_service(abss, hues);
  } else {
    for (int c = 0; c < scn_->cbs_count(); ++c) {
      std::vector<int> abss, hues;
      for (size_t b = 0; b < bits_.size(); ++b) {
        if (!bits[b] || bits_[b].a != c) continue;
        if (bits_[b].kind == BitKind::CbsServesAbs) abss.push_back(bits_[b].b);
        if (bits_[b].kind == BitKind::CbsServesHue) hues.push_back(bits_[b].b);
      }
      as.set_cbs_service(c, abss, hues);
    }
  }
  return as;
}

bool PowerSegmentOracle::refreeze(const Allocation& previous) {
  static constexpr double kStableTol = 0.02;
  if (refreeze_epochs_ >= 4) return false;
  const InterferenceTable next = refreeze_interference(*ch_, previous);
  const double change = rel_change(next, frozen_);
  if (change <= kStableTol) return false;
  frozen_ = next;
  ++refreeze_epochs_;
  return true;
}

SubproblemResult PowerSegmentOracle::solve(const std::vector<std::uint8_t>& bits, bool reduced) {
  const Scenario& s = *scn_;
  const int N = s.slot_count();
  SubproblemResult res;
  res.assoc = bits_to_association(bits);
  res.alloc = base_;
  // Zero this segment's own slice; the other segments keep reference powers.
  if (seg_ == Segment::Sat) {
    std::fill(res.alloc.p_sat_abs.begin(), res.alloc.p_sat_abs.end(), 0.0);
    std::fill(res.alloc.p_sat_hue.begin(), res.alloc.p_sat_hue.end(), 0.0);
  } else {
    std::fill(res.alloc.p_cbs_abs.begin(), res.alloc.p_cbs_abs.end(), 0.0);
    std::fill(res.alloc.p_cbs_hue.begin(), res.alloc.p_cbs_hue.end(), 0.0);
  }

  const double unit = opts_.ee_unit;
  const double pmax = s.radio().p_max_w;
  const double demand = demand_rate_per_slot(s);

  // Build nodes with per-(link, slot) gains/floors.
  struct LinkRef {
    bool to_abs;
    int node;  // satellite: 0; CBS index otherwise
    int rx;    // ABS u or HUE mh
  };
  std::vector<PowerNode> nodes;
  std::vector<std::vector<LinkRef>> node_links;
  auto add_node = [&](int id) {
    nodes.push_back(PowerNode{id, {}, 0});
    node_links.emplace_back();
    return static_cast<int>(nodes.size()) - 1;
  };

  if (seg_ == Segment::Sat) {
    const double bw = ch_->bandwidth(LinkClass::SatToAbs);
    const double sg = ch_->noise_w(LinkClass::SatToAbs);
    const double bwh = ch_->bandwidth(LinkClass::SatToHue);
    const double sgh = ch_->noise_w(LinkClass::SatToHue);
    int ni = -1;
    bool any = false;
    for (int u = 0; u < s.abs_count() && !any; ++u) any = res.assoc.sat_serves_abs(u);
    for (int mh = 0; mh < s.hue_count() && !any; ++mh) any = res.assoc.sat_serves_hue(mh);
    if (any) ni = add_node(0);
    for (int u = 0; u < s.abs_count(); ++u) {
      if (!res.assoc.sat_serves_abs(u)) continue;
      for (int n = 0; n < N; ++n) {
        PowerLink l;
        l.gain = ch_->gain_sat_abs(u, n);
        l.bandwidth = bw;
        l.omega = frozen_.at_sat_abs(u, n);
        l.sigma = sg;
        l.floor_w = power_floor(floors_.sat_abs.empty() ? 0.0 : floors_.sat_abs[u * N + n], bw,
                                frozen_.at_sat_abs(u, n) + sg, l.gain);
        nodes[ni].links.push_back(l);
      }
      node_links[ni].push_back({true, 0, u});
      nodes[ni].n_links++;
    }
    for (int mh = 0; mh < s.hue_count(); ++mh) {
      if (!res.assoc.sat_serves_hue(mh)) continue;
      for (int n = 0; n < N; ++n) {
        PowerLink l;
        l.gain = ch_->gain_sat_hue(mh, n);
        l.bandwidth = bwh;
        l.omega = frozen_.at_sat_hue(mh, n);
        l.sigma = sgh;
        l.floor_w = power_floor(demand, bwh, frozen_.at_sat_hue(mh, n) + sgh, l.gain);
        nodes[ni].links.push_back(l);
      }
      node_links[ni].push_back({false, 0, mh});
      nodes[ni].n_links++;
    }
  } else {
    const double bw = ch_->bandwidth(LinkClass::CbsToAbs);
    const double sg = ch_->noise_w(LinkClass::CbsToAbs);
    const double bwh = ch_->bandwidth(LinkClass::CbsToHue);
    const double sgh = ch_->noise_w(LinkClass::CbsToHue);
    for (int c = 0; c < s.cbs_count(); ++c) {
      int ni = -1;
      for (int u = 0; u < s.abs_count(); ++u) {
        if (res.assoc.cbs_serving_abs(u) != c) continue;
        if (ni < 0) ni = add_node(c);
        for (int n = 0; n < N; ++n) {
          PowerLink l;
          l.gain = ch_->gain_cbs_abs(c, u, n);
          l.bandwidth = bw;
          l.omega = frozen_.at_cbs_abs(c, u, n);
          l.sigma = sg;
          l.floor_w =
              power_floor(floors_.cbs_abs.empty() ? 0.0 : floors_.cbs_abs[(c * s.abs_count() + u) * N + n],
                          bw, frozen_.at_cbs_abs(c, u, n) + sg, l.gain);
          nodes[ni].links.push_back(l);
        }
        node_links[ni].push_back({true, c, u});
        nodes[ni].n_links++;
      }
      for (int mh = 0; mh < s.hue_count(); ++mh) {
        if (res.assoc.cbs_serving_hue(mh) != c) continue;
        if (ni < 0) ni = add_node(c);
        for (int n = 0; n < N; ++n) {
          PowerLink l;
          l.gain = ch_->gain_cbs_hue(c, mh, n);
          l.bandwidth = bwh;
          l.omega = frozen_.at_cbs_hue(c, mh, n);
          l.sigma = sgh;
          l.floor_w = power_floor(demand, bwh, frozen_.at_cbs_hue(c, mh, n) + sgh, l.gain);
          nodes[ni].links.push_back(l);
        }
        node_links[ni].push_back({false, c, mh});
        nodes[ni].n_links++;
      }
    }
  }

  const double fixed = seg_ == Segment::Sat ? s.radio().circuit_sat_w * N
                                            : s.radio().circuit_cbs_w * s.cbs_count() * N;

  for (const auto& nd : nodes)
    for (const auto& l : nd.links)
      if (l.floor_w > pmax * kFloorSlack) {
        res.feasible = false;
        return res;
      }

  auto write_alloc = [&](const std::vector<NodeVars>& vars, Allocation& out) {
    for (size_t i = 0; i < nodes.size(); ++i) {
      int offset = 0;
      for (const auto& lr : node_links[i]) {
        for (int n = 0; n < N; ++n) {
          const double fl = std::min(nodes[i].links[offset * N + n].floor_w, pmax);
          const double p = std::clamp(vars[i].p[offset * N + n], fl, pmax);
          if (seg_ == Segment::Sat) {
            if (lr.to_abs)
              out.pw_sat_abs(lr.rx, n) = p;
            else
              out.pw_sat_hue(lr.rx, n) = p;
          } else {
            if (lr.to_abs)
              out.pw_cbs_abs(lr.node, lr.rx, n) = p;
            else
              out.pw_cbs_hue(lr.node, lr.rx, n) = p;
          }
        }
        ++offset;
      }
    }
  };

  auto rate_power_of = [&](const Allocation& al) {
    double rate = 0.0, power = fixed;
    for (size_t i = 0; i < nodes.size(); ++i) {
      int offset = 0;
      for (const auto& lr : node_links[i]) {
        for (int n = 0; n < N; ++n) {
          const PowerLink& l = nodes[i].links[offset * N + n];
          double p;
          if (seg_ == Segment::Sat)
            p = lr.to_abs ? al.pw_sat_abs(lr.rx, n) : al.pw_sat_hue(lr.rx, n);
          else
            p = lr.to_abs ? al.pw_cbs_abs(lr.node, lr.rx, n) : al.pw_cbs_hue(lr.node, lr.rx, n);
          rate += shannon_rate(l.bandwidth, sinr(p, l.gain, l.omega, l.sigma)) / unit;
          power += p;
        }
        ++offset;
      }
    }
    return std::pair<double, double>{rate, power};
  };

  if (nodes.empty()) {
    res.rate = 0.0;
    res.power = fixed;
    res.eta = 0.0;
    res.dinkelbach =
        run_dinkelbach([&](double) { return DinkelbachStep{0.0, fixed}; }, opts_.upsilon, 2);
    res.admm_converged = true;
    return res;
  }

  const int dink_cap = reduced ? std::max(3, opts_.max_dinkelbach_iters / 4)
                               : opts_.max_dinkelbach_iters;
  const int pgd_steps = reduced ? std::max(8, opts_.pgd_max_steps / 2) : opts_.pgd_max_steps;

  std::vector<NodeVars> warm(nodes.size());
  for (size_t i = 0; i < nodes.size(); ++i) {
    warm[i].p.resize(nodes[i].links.size());
    for (size_t k = 0; k < nodes[i].links.size(); ++k)
      warm[i].p[k] = std::clamp(pmax * 0.5, std::min(nodes[i].links[k].floor_w, pmax), pmax);
  }
  std::optional<std::vector<NodeVars>> warm_locals;
  Allocation best_alloc = res.alloc;
  write_alloc(warm, best_alloc);
  AdmmResult last_admm;

  res.dinkelbach = run_dinkelbach(
      [&](double eta) {
        const auto [warm_rate, warm_power] = rate_power_of(best_alloc);
        const double warm_f = warm_rate - eta * warm_power;
        PowerConsensusModel model(s, nodes, warm_locals ? *warm_locals : warm, eta, unit, pgd_steps);
        const AdmmOptions aopts = admm_options(opts_, reduced);
        last_admm = run_admm(model, aopts, warm_locals ? &*warm_locals : nullptr);
        Allocation cand = best_alloc;
        write_alloc(last_admm.globals, cand);
        const auto [cand_rate, cand_power] = rate_power_of(cand);
        if (cand_rate - eta * cand_power >= warm_f || !warm_locals) {
          best_alloc = cand;
          warm_locals = last_admm.locals;
        }
        const auto [rate, power] = rate_power_of(best_alloc);
        return DinkelbachStep{rate, power};
      },
      opts_.upsilon, dink_cap);

  res.alloc = best_alloc;
  res.admm_converged = last_admm.converged;
  res.admm_primal = last_admm.primal_res;
  res.admm_dual = last_admm.dual_res;
  res.admm_trace = last_admm.trace;
  const auto [rate, power] = rate_power_of(best_alloc);
  res.rate = rate;
  res.power = power;
  res.eta = rate / power;
  return res;
}

// ---------------------------------------------------------------------------
// Pipeline
// ---------------------------------------------------------------------------

ProposedResult solve_proposed(const Scenario& s, const ChannelModel& ch, const SolverOptions& opts) {
  ProposedResult out;
  AbsSegmentOracle abs_oracle(s, ch, opts);
  out.abs = run_benders(abs_oracle, opts);

  Association abs_assoc = out.abs.incumbent ? out.abs.incumbent->assoc : Association::empty(s);
  Allocation abs_alloc = out.abs.incumbent ? out.abs.incumbent->alloc : Allocation::initial(s);
  const BackhaulFloors floors = backhaul_floors(ch, abs_assoc, abs_alloc);

  // Clean network state: only this stage's slice, no reference powers.
  Allocation merged = Allocation::initial(s);
  for (int u = 0; u < merged.U; ++u) {
    for (int n = 0; n < merged.N; ++n) {
      merged.pos(u, n) = abs_alloc.pos(u, n);
      for (int ml = 0; ml < merged.Ml; ++ml)
        merged.pw_abs_lue(u, ml, n) = abs_alloc.pw_abs_lue(u, ml, n);
    }
  }
  merged.derive_speeds(s);

  // The power-segment interference environment carries the actual access
  // deployment/powers plus reference levels for the not-yet-solved providers.
  Allocation power_base = reference_allocation(s);
  for (int u = 0; u < merged.U; ++u)
    for (int n = 0; n < merged.N; ++n) {
      power_base.pos(u, n) = merged.pos(u, n);
      for (int ml = 0; ml < merged.Ml; ++ml)
        power_base.pw_abs_lue(u, ml, n) = merged.pw_abs_lue(u, ml, n);
    }
  power_base.derive_speeds(s);

  PowerSegmentOracle sat_oracle(Segment::Sat, s, ch, opts,
                                PowerSegmentOracle::required_from(Segment::Sat, abs_assoc), floors,
                                sat_hue_candidates(s), &power_base);
  PowerSegmentOracle cbs_oracle(Segment::Cbs, s, ch, opts,
                                PowerSegmentOracle::required_from(Segment::Cbs, abs_assoc), floors,
                                [&] {
                                  std::vector<int> hues;
                                  std::vector<char> covered(s.hue_count(), 0);
                                  for (int c = 0; c < s.cbs_count(); ++c)
                                    for (const int mh : cbs_hue_candidates(s, c)) covered[mh] = 1;
                                  for (int mh = 0; mh < s.hue_count(); ++mh)
                                    if (covered[mh]) hues.push_back(mh);
                                  return hues;
                                }(),
                                &power_base);

  // The two power segments are independent given the ABS stage; run them
  // concurrently.
  auto sat_fut = std::async(std::launch::async,
                            [&]() { return run_benders(sat_oracle, opts); });
  out.cbs = run_benders(cbs_oracle, opts);
  out.sat = sat_fut.get();

  out.assoc = abs_assoc;
  if (out.sat.incumbent) {
    const Association& sa = out.sat.incumbent->assoc;
    out.assoc.sat_hue = sa.sat_hue;
    out.assoc.sat_abs = sa.sat_abs;
    for (int mh = 0; mh < merged.Mh; ++mh)
      for (int n = 0; n < merged.N; ++n)
        merged.pw_sat_hue(mh, n) = out.sat.incumbent->alloc.pw_sat_hue(mh, n);
    for (int u = 0; u < merged.U; ++u)
      for (int n = 0; n < merged.N; ++n)
        merged.pw_sat_abs(u, n) = out.sat.incumbent->alloc.pw_sat_abs(u, n);
  }
  if (out.cbs.incumbent) {
    const Association& ca = out.cbs.incumbent->assoc;
    out.assoc.cbs_hue = ca.cbs_hue;
    out.assoc.cbs_abs = ca.cbs_abs;
    for (int c = 0; c < merged.C; ++c)
      for (int n = 0; n < merged.N; ++n) {
        for (int mh = 0; mh < merged.Mh; ++mh)
          merged.pw_cbs_hue(c, mh, n) = out.cbs.incumbent->alloc.pw_cbs_hue(c, mh, n);
        for (int u = 0; u < merged.U; ++u)
          merged.pw_cbs_abs(c, u, n) = out.cbs.incumbent->alloc.pw_cbs_abs(c, u, n);
      }
  }
  // Powers only flow on associated links in the final state.
  for (int u = 0; u < merged.U; ++u) {
    if (!out.assoc.sat_serves_abs(u))
      for (int n = 0; n < merged.N; ++n) merged.pw_sat_abs(u, n) = 0.0;
    for (int c = 0; c < merged.C; ++c)
      if (out.assoc.cbs_serving_abs(u) != c)
        for (int n = 0; n < merged.N; ++n) merged.pw_cbs_abs(c, u, n) = 0.0;
  }
  for (int mh = 0; mh < merged.Mh; ++mh) {
    if (!out.assoc.sat_serves_hue(mh))
      for (int n = 0; n < merged.N; ++n) merged.pw_sat_hue(mh, n) = 0.0;
    for (int c = 0; c < merged.C; ++c)
      if (out.assoc.cbs_serving_hue(mh) != c)
        for (int n = 0; n < merged.N; ++n) merged.pw_cbs_hue(c, mh, n) = 0.0;
  }

  out.alloc = merged;
  out.report = evaluate_ee(ch, out.assoc, out.alloc);
  return out;
}

}  // namespace sasnet
