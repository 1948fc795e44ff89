#include "sasnet/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sasnet/approx.hpp"
#include "sasnet/hungarian.hpp"
#include "sasnet/rng.hpp"

namespace sasnet {

namespace {

constexpr double kFloorSlack = 1.0 + 1e-9;

double demand_rate_per_slot(const Scenario& s) {
  return s.radio().rate_threshold_bps / s.slot_count();
}

double power_floor(double r_bps, double bandwidth, double noise_plus_omega, double gain) {
  if (r_bps <= 0.0) return 0.0;
  if (gain <= 0.0) return std::numeric_limits<double>::infinity();
  return (std::exp2(r_bps / bandwidth) - 1.0) * noise_plus_omega / gain;
}

double total_flight_power(const Scenario& s, const Allocation& al) {
  double p = 0.0;
  for (int u = 0; u < al.U; ++u)
    for (int n = 0; n < al.N; ++n) p += flight_power_at(s, al, u, n);
  return p;
}

// Backhaul rule shared by the reference allocators: nearest covering CBS,
// otherwise the satellite.
Backhaul pick_backhaul(const Scenario& s, int u) {
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (int c = 0; c < s.cbs_count(); ++c) {
    const double d = distance(s.abs_initial[u], s.cbs[c]);
    if (d <= s.config.cbs_radius_m && d < best_d) {
      best = c;
      best_d = d;
    }
  }
  if (best >= 0) return {BackhaulKind::Cbs, best};
  return {BackhaulKind::Sat, -1};
}

void apply_backhaul_choices(const Scenario& s, Association& as) {
  std::vector<int> sat_list;
  std::vector<std::vector<int>> cbs_list(s.cbs_count());
  for (int u = 0; u < s.abs_count(); ++u) {
    if (as.served_lues(u).empty()) continue;
    const Backhaul b = pick_backhaul(s, u);
    if (b.kind == BackhaulKind::Sat)
      sat_list.push_back(u);
    else
      cbs_list[b.cbs].push_back(u);
  }
  as.set_sat_service(sat_list, {});
  for (int c = 0; c < s.cbs_count(); ++c) as.set_cbs_service(c, cbs_list[c], {});
}

double golden_max(const std::function<double(double)>& f, double lo, double hi) {
  if (hi <= lo) return lo;
  const double gr = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 80; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

// One radio link of a baseline segment, with everything needed to rate it.
struct BLink {
  LinkClass cls;
  int u = -1, ml = -1, mh = -1, c = -1;
  double gain = 0.0;       // per-slot gains for dynamic geometry are re-read
  double bandwidth = 0.0;
  double sigma = 0.0;
};

struct ColdTables {
  InterferenceTable cold;
  InterferenceTable worst;
};

double link_gain(const ChannelModel& ch, const Allocation& al, const BLink& l, int n) {
  switch (l.cls) {
    case LinkClass::AbsToLue:
      return ch.gain_abs_at(al.pos(l.u, n), ch.scenario().lue_pos(l.ml, n));
    case LinkClass::SatToAbs: return ch.gain_sat_abs(l.u, n);
    case LinkClass::CbsToAbs: return ch.gain_cbs_abs(l.c, l.u, n);
    case LinkClass::SatToHue: return ch.gain_sat_hue(l.mh, n);
    case LinkClass::CbsToHue: return ch.gain_cbs_hue(l.c, l.mh, n);
  }
  return 0.0;
}

double cold_omega(const ColdTables& t, const BLink& l, int n) {
  switch (l.cls) {
    case LinkClass::AbsToLue: return t.cold.at_abs_lue(l.u, l.ml, n);
    case LinkClass::SatToAbs: return t.cold.at_sat_abs(l.u, n);
    case LinkClass::CbsToAbs: return t.cold.at_cbs_abs(l.c, l.u, n);
    case LinkClass::SatToHue: return t.cold.at_sat_hue(l.mh, n);
    case LinkClass::CbsToHue: return t.cold.at_cbs_hue(l.c, l.mh, n);
  }
  return 0.0;
}

double worst_omega(const ColdTables& t, const BLink& l, int n) {
  switch (l.cls) {
    case LinkClass::AbsToLue: return t.worst.at_abs_lue(l.u, l.ml, n);
    case LinkClass::SatToAbs: return t.worst.at_sat_abs(l.u, n);
    case LinkClass::CbsToAbs: return t.worst.at_cbs_abs(l.c, l.u, n);
    case LinkClass::SatToHue: return t.worst.at_sat_hue(l.mh, n);
    case LinkClass::CbsToHue: return t.worst.at_cbs_hue(l.c, l.mh, n);
  }
  return 0.0;
}

// Demand-carrying links must clear the horizon threshold at p_max under the
// worst-case interference; that guarantees constraint feasibility at any
// actual transmit levels.
bool link_feasible_horizon(const Scenario& s, const ChannelModel& ch, const void* tables_erased,
                           const BLink& l, const Allocation& al);

double demand_of(const Scenario& s, const BLink& l) {
  // Backhaul links carry traffic floors computed separately; access links
  // carry the per-slot demand surrogate.
  if (l.cls == LinkClass::SatToAbs || l.cls == LinkClass::CbsToAbs) return 0.0;
  return demand_rate_per_slot(s);
}

double alloc_power_const(const Allocation& al, const BLink& l, int n) {
  switch (l.cls) {
    case LinkClass::AbsToLue: return al.pw_abs_lue(l.u, l.ml, n);
    case LinkClass::SatToAbs: return al.pw_sat_abs(l.u, n);
    case LinkClass::CbsToAbs: return al.pw_cbs_abs(l.c, l.u, n);
    case LinkClass::SatToHue: return al.pw_sat_hue(l.mh, n);
    case LinkClass::CbsToHue: return al.pw_cbs_hue(l.c, l.mh, n);
  }
  throw std::logic_error("alloc_power_const");
}

bool link_feasible_horizon(const Scenario& s, const ChannelModel& ch, const void* tables_erased,
                           const BLink& l, const Allocation& al) {
  (void)tables_erased;
  if (demand_of(s, l) <= 0.0) return true;
  // Zero-interference necessary condition; the drop-repair pass below removes
  // links whose achieved rates still miss the demand.
  double sum = 0.0;
  for (int n = 0; n < s.slot_count(); ++n)
    sum += shannon_rate(l.bandwidth, sinr(s.radio().p_max_w, link_gain(ch, al, l, n), 0.0, l.sigma));
  return sum >= s.radio().rate_threshold_bps * (1.0 - 1e-9);
}

double& alloc_power(Allocation& al, const BLink& l, int n) {
  switch (l.cls) {
    case LinkClass::AbsToLue: return al.pw_abs_lue(l.u, l.ml, n);
    case LinkClass::SatToAbs: return al.pw_sat_abs(l.u, n);
    case LinkClass::CbsToAbs: return al.pw_cbs_abs(l.c, l.u, n);
    case LinkClass::SatToHue: return al.pw_sat_hue(l.mh, n);
    case LinkClass::CbsToHue: return al.pw_cbs_hue(l.c, l.mh, n);
  }
  throw std::logic_error("alloc_power");
}

// Per-link EE-optimal power level over [floor, p_max] for a fixed-power
// share c_share (1-D search used by the greedy and dynamic allocators).
double per_link_ee_power(const Scenario& s, double gain, double bandwidth, double sigma,
                         double omega, double floor_w, double c_share) {
  const double pmax = s.radio().p_max_w;
  const double lo = std::min(floor_w, pmax);
  auto f = [&](double p) {
    return shannon_rate(bandwidth, sinr(p, gain, omega, sigma)) / (p + c_share);
  };
  return golden_max(f, lo, pmax);
}

// Scale access powers down (toward the demand floors) until the backhaul
// capacity constraints hold under the achieved rates.
void enforce_backhaul_capacity(const ChannelModel& ch, const Association& as, Allocation& al,
                               const ColdTables& tables) {
  const Scenario& s = ch.scenario();
  const double bw = ch.bandwidth(LinkClass::AbsToLue);
  const double sigma = ch.noise_w(LinkClass::AbsToLue);
  const double g0 = ch.abs_lue_reference_gain();
  for (int round = 0; round < 60; ++round) {
    bool violated = false;
    const RateTable rt = achieved_rates(ch, as, al);
    for (int n = 0; n < al.N && !violated; ++n) {
      double t_sat = 0.0, c_sat = 0.0, t_cbs = 0.0, c_cbs = 0.0;
      for (int u = 0; u < al.U; ++u) {
        double traffic = 0.0;
        for (const int ml : as.served_lues(u)) traffic += rt.at_abs_lue(u, ml, n);
        const Backhaul b = as.backhaul(u);
        if (b.kind == BackhaulKind::Cbs) {
          t_cbs += traffic;
          c_cbs += rt.cbs_abs[(b.cbs * al.U + u) * al.N + n];
        } else {
          t_sat += traffic;
          if (b.kind == BackhaulKind::Sat) c_sat += rt.sat_abs[u * al.N + n];
        }
      }
      violated = t_sat > c_sat || t_cbs > c_cbs;
    }
    if (!violated) return;
    for (int u = 0; u < al.U; ++u)
      for (const int ml : as.served_lues(u))
        for (int n = 0; n < al.N; ++n) {
          const double dist_sq = distance_sq(al.pos(u, n), s.lue_pos(ml, n));
          const double fl = power_floor(demand_rate_per_slot(s), bw,
                                        worst_omega(tables, {LinkClass::AbsToLue, u, ml}, n) + sigma,
                                        g0 / dist_sq);
          double& p = al.pw_abs_lue(u, ml, n);
          p = std::max(std::min(fl, s.radio().p_max_w), p * 0.85);
        }
  }
}

BaselineResult finish(const ChannelModel& ch, Association as, Allocation al,
                      const ColdTables& tables) {
  enforce_backhaul_capacity(ch, as, al, tables);
  BaselineResult r;
  r.report = evaluate_ee(ch, as, al);
  r.assoc = std::move(as);
  r.alloc = std::move(al);
  return r;
}

// Drops served links whose achieved horizon rate misses the demand, then
// reassigns powers; dropping only lowers interference, so this terminates.
bool assign_powers(const ChannelModel& ch, const Association& as, Allocation& al,
                   const ColdTables& tables);

void drop_repair(const ChannelModel& ch, Association& as, Allocation& al,
                 const ColdTables& tables) {
  const Scenario& s = ch.scenario();
  const double target = s.radio().rate_threshold_bps * (1.0 - 1e-9);
  const int max_rounds = 4 * (al.U * al.Ml + 2 * al.Mh + 4);
  for (int round = 0; round < max_rounds; ++round) {
    const RateTable rt = achieved_rates(ch, as, al);
    // Worst-deficit demand link this round; dropping one at a time keeps the
    // links that only failed because of a doomed neighbour's interference.
    double worst_deficit = 0.0;
    int kind = -1, a0 = -1, b0 = -1;  // 0: abs-lue, 1: sat-hue, 2: cbs-hue
    for (int u = 0; u < al.U; ++u)
      for (const int ml : as.served_lues(u)) {
        double sum = 0.0;
        for (int n = 0; n < al.N; ++n) sum += rt.at_abs_lue(u, ml, n);
        if (target - sum > worst_deficit) {
          worst_deficit = target - sum;
          kind = 0;
          a0 = u;
          b0 = ml;
        }
      }
    for (int mh = 0; mh < al.Mh; ++mh) {
      if (as.sat_serves_hue(mh)) {
        double sum = 0.0;
        for (int n = 0; n < al.N; ++n) sum += rt.sat_hue[mh * al.N + n];
        if (target - sum > worst_deficit) {
          worst_deficit = target - sum;
          kind = 1;
          a0 = mh;
        }
      }
      const int c = as.cbs_serving_hue(mh);
      if (c >= 0) {
        double sum = 0.0;
        for (int n = 0; n < al.N; ++n) sum += rt.cbs_hue[(c * al.Mh + mh) * al.N + n];
        if (target - sum > worst_deficit) {
          worst_deficit = target - sum;
          kind = 2;
          a0 = c;
          b0 = mh;
        }
      }
    }
    if (kind < 0) return;  // every demand met
    if (kind == 0) {
      std::vector<int> keep;
      for (const int ml : as.served_lues(a0))
        if (ml != b0) keep.push_back(ml);
      as.set_abs_service(a0, keep);
      for (int n = 0; n < al.N; ++n) al.pw_abs_lue(a0, b0, n) = 0.0;
    } else if (kind == 1) {
      std::vector<int> abss, keep;
      for (int u = 0; u < al.U; ++u)
        if (as.sat_serves_abs(u)) abss.push_back(u);
      for (int mh = 0; mh < al.Mh; ++mh)
        if (as.sat_serves_hue(mh) && mh != a0) keep.push_back(mh);
      as.set_sat_service(abss, keep);
      for (int n = 0; n < al.N; ++n) al.pw_sat_hue(a0, n) = 0.0;
    } else {
      std::vector<int> abss, keep;
      for (int u = 0; u < al.U; ++u)
        if (as.cbs_serving_abs(u) == a0) abss.push_back(u);
      for (int mh = 0; mh < al.Mh; ++mh)
        if (as.cbs_serving_hue(mh) == a0 && mh != b0) keep.push_back(mh);
      as.set_cbs_service(a0, abss, keep);
      for (int n = 0; n < al.N; ++n) al.pw_cbs_hue(a0, b0, n) = 0.0;
    }
    apply_backhaul_choices(s, as);
    assign_powers(ch, as, al, tables);
  }
}

ColdTables make_tables(const ChannelModel& ch) {
  return {cold_interference(ch), worst_case_interference(ch)};
}

// Serving links of a fully built association, in deterministic order.
std::vector<BLink> all_links(const ChannelModel& ch, const Association& as) {
  const Scenario& s = ch.scenario();
  std::vector<BLink> out;
  for (int u = 0; u < s.abs_count(); ++u)
    for (const int ml : as.served_lues(u))
      out.push_back({LinkClass::AbsToLue, u, ml, -1, -1,
                     0.0, ch.bandwidth(LinkClass::AbsToLue), ch.noise_w(LinkClass::AbsToLue)});
  for (int u = 0; u < s.abs_count(); ++u)
    if (as.sat_serves_abs(u))
      out.push_back({LinkClass::SatToAbs, u, -1, -1, -1,
                     0.0, ch.bandwidth(LinkClass::SatToAbs), ch.noise_w(LinkClass::SatToAbs)});
  for (int mh = 0; mh < s.hue_count(); ++mh)
    if (as.sat_serves_hue(mh))
      out.push_back({LinkClass::SatToHue, -1, -1, mh, -1,
                     0.0, ch.bandwidth(LinkClass::SatToHue), ch.noise_w(LinkClass::SatToHue)});
  for (int c = 0; c < s.cbs_count(); ++c)
    for (int u = 0; u < s.abs_count(); ++u)
      if (as.cbs_serving_abs(u) == c)
        out.push_back({LinkClass::CbsToAbs, u, -1, -1, c,
                       0.0, ch.bandwidth(LinkClass::CbsToAbs), ch.noise_w(LinkClass::CbsToAbs)});
  for (int c = 0; c < s.cbs_count(); ++c)
    for (int mh = 0; mh < s.hue_count(); ++mh)
      if (as.cbs_serving_hue(mh) == c)
        out.push_back({LinkClass::CbsToHue, -1, -1, mh, c,
                       0.0, ch.bandwidth(LinkClass::CbsToHue), ch.noise_w(LinkClass::CbsToHue)});
  return out;
}

// Fills backhaul-link power floors from the access traffic they must carry.
std::vector<double> backhaul_link_floor(const ChannelModel& ch, const Association& as,
                                        const Allocation& al, const ColdTables& tables,
                                        const BLink& l) {
  const Scenario& s = ch.scenario();
  const BackhaulFloors floors = backhaul_floors(ch, as, al);
  std::vector<double> out(al.N, 0.0);
  for (int n = 0; n < al.N; ++n) {
    double rate = 0.0;
    if (l.cls == LinkClass::SatToAbs) rate = floors.sat_abs[l.u * al.N + n];
    if (l.cls == LinkClass::CbsToAbs) rate = floors.cbs_abs[(l.c * al.U + l.u) * al.N + n];
    out[n] = power_floor(rate, l.bandwidth, worst_omega(tables, l, n) + l.sigma,
                         link_gain(ch, al, l, n));
  }
  return out;
}

// HUE selections per provider under the coverage partition, ranked by a
// scoring callback; used by greedy and dynamic.
void select_hues(const Scenario& s, const ChannelModel& ch, Association& as,
                 const std::function<double(LinkClass, int c, int mh)>& score) {
  std::vector<int> sat_hues;
  {
    std::vector<std::pair<double, int>> ranked;
    for (const int mh : sat_hue_candidates(s)) ranked.push_back({score(LinkClass::SatToHue, -1, mh), mh});
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    int room = s.radio().z_rb;
    for (int u = 0; u < s.abs_count(); ++u) room -= as.sat_serves_abs(u) ? 1 : 0;
    for (const auto& [sc, mh] : ranked) {
      if (room <= 0) break;
      if (sc <= 0.0) continue;
      sat_hues.push_back(mh);
      --room;
    }
    std::vector<int> abss;
    for (int u = 0; u < s.abs_count(); ++u)
      if (as.sat_serves_abs(u)) abss.push_back(u);
    as.set_sat_service(abss, sat_hues);
  }
  std::vector<char> taken(s.hue_count(), 0);
  for (int c = 0; c < s.cbs_count(); ++c) {
    std::vector<std::pair<double, int>> ranked;
    for (const int mh : cbs_hue_candidates(s, c))
      if (!taken[mh]) ranked.push_back({score(LinkClass::CbsToHue, c, mh), mh});
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    std::vector<int> abss;
    for (int u = 0; u < s.abs_count(); ++u)
      if (as.cbs_serving_abs(u) == c) abss.push_back(u);
    int room = s.radio().y_rb - static_cast<int>(abss.size());
    std::vector<int> hues;
    for (const auto& [sc, mh] : ranked) {
      if (room <= 0) break;
      if (sc <= 0.0) continue;
      hues.push_back(mh);
      taken[mh] = 1;
      --room;
    }
    as.set_cbs_service(c, abss, hues);
  }
}

// Assign powers on every serving link: per-link EE 1-D search for access/HUE
// links, capacity floors (plus the same 1-D search above them) for backhaul.
bool assign_powers(const ChannelModel& ch, const Association& as, Allocation& al,
                   const ColdTables& tables) {
  const Scenario& s = ch.scenario();
  const double pmax = s.radio().p_max_w;
  const std::vector<BLink> links = all_links(ch, as);
  if (links.empty()) return true;
  const double flight = total_flight_power(s, al);
  int n_abs = 0, n_sat = 0, n_cbs = 0;
  for (const auto& l : links) {
    n_abs += l.cls == LinkClass::AbsToLue;
    n_sat += l.cls == LinkClass::SatToAbs || l.cls == LinkClass::SatToHue;
    n_cbs += l.cls == LinkClass::CbsToAbs || l.cls == LinkClass::CbsToHue;
  }
  for (const auto& l : links) {
    double share = 0.0;
    if (l.cls == LinkClass::AbsToLue) share = flight / std::max(1, n_abs) / al.N;
    else if (l.cls == LinkClass::SatToAbs || l.cls == LinkClass::SatToHue)
      share = s.radio().circuit_sat_w / std::max(1, n_sat);
    else
      share = s.radio().circuit_cbs_w * s.cbs_count() / std::max(1, n_cbs);
    std::vector<double> bh_floor;
    if (l.cls == LinkClass::SatToAbs || l.cls == LinkClass::CbsToAbs)
      bh_floor = backhaul_link_floor(ch, as, al, tables, l);
    for (int n = 0; n < al.N; ++n) {
      const double g = link_gain(ch, al, l, n);
      const double fl = std::min(bh_floor.empty() ? 0.0 : bh_floor[n], pmax);
      alloc_power(al, l, n) =
          per_link_ee_power(s, g, l.bandwidth, l.sigma, cold_omega(tables, l, n), fl, share);
    }
    // Raise the per-link EE powers uniformly until the horizon demand clears
    // under worst-case interference (p_max meets it by the candidate filter).
    if (demand_of(s, l) > 0.0) {
      auto horizon_rate = [&](double scale) {
        double sum = 0.0;
        for (int n = 0; n < al.N; ++n) {
          const double p = std::min(pmax, std::max(alloc_power(al, l, n) * scale,
                                                   alloc_power(al, l, n)));
          sum += shannon_rate(l.bandwidth,
                              sinr(p, link_gain(ch, al, l, n), cold_omega(tables, l, n), l.sigma));
        }
        return sum;
      };
      const double target = s.radio().rate_threshold_bps;
      if (horizon_rate(1.0) < target) {
        double lo = 1.0, hi = 1.0;
        while (horizon_rate(hi) < target && hi < 1e9) hi *= 2.0;
        if (horizon_rate(hi) >= target) {
          for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            (horizon_rate(mid) < target ? lo : hi) = mid;
          }
        }
        // hi may sit at the p_max ceiling; the drop-repair pass re-checks.
        for (int n = 0; n < al.N; ++n)
          alloc_power(al, l, n) = std::min(pmax, alloc_power(al, l, n) * hi);
      }
    }
  }
  return true;
}

// Per-link EE score used to rank candidate links (gain-based 1-D optimum).
// Links that cannot clear the horizon demand at p_max score negative.
double link_score(const Scenario& s, const ChannelModel& ch, const ColdTables& tables,
                  const BLink& l, const Allocation& al, double share) {
  if (!link_feasible_horizon(s, ch, &tables, l, al)) return -1.0;
  const double g = link_gain(ch, al, l, 0);
  const double p = per_link_ee_power(s, g, l.bandwidth, l.sigma, cold_omega(tables, l, 0), 0.0, share);
  return shannon_rate(l.bandwidth, sinr(p, g, cold_omega(tables, l, 0), l.sigma)) / (p + share);
}

// ---------------------------------------------------------------------------
// Centralized / brute-force machinery: discretized powers and deployment with
// a parametric (Dinkelbach) sweep, exact on its grid.
// ---------------------------------------------------------------------------

struct GridLink {
  double bandwidth = 0.0;
  double sigma = 0.0;
  std::vector<double> gain;   // per slot
  std::vector<double> omega;  // per slot (cold)
  std::vector<double> floor;  // per slot
};

// Best grid power for maximizing r(p) - eta*p*unit_scale at one (link, slot);
// concavity makes the continuous argmax's grid neighbors sufficient.
std::pair<double, double> best_grid_power(const GridLink& l, int n, double eta, double ee_unit,
                                          double pmax, int levels) {
  const double step = pmax / (levels - 1);
  const double fl = l.floor[n];
  const int jmin = std::min(levels - 1, static_cast<int>(std::ceil(fl / step - 1e-12)));
  auto value = [&](double p) {
    return shannon_rate(l.bandwidth, sinr(p, l.gain[n], l.omega[n], l.sigma)) / ee_unit - eta * p;
  };
  double p_cont;
  if (eta <= 0.0 || l.gain[n] <= 0.0) {
    p_cont = pmax;
  } else {
    p_cont = l.bandwidth / (ee_unit * 0.69314718055994530942 * eta) -
             (l.omega[n] + l.sigma) / l.gain[n];
  }
  const int jc = static_cast<int>(std::floor(p_cont / step));
  double best_p = jmin * step;
  double best_v = value(best_p);
  for (const int j : {jc, jc + 1, jmin, levels - 1}) {
    if (j < jmin || j > levels - 1) continue;
    const double p = j * step;
    const double v = value(p);
    if (v > best_v + 1e-18) {
      best_v = v;
      best_p = p;
    }
  }
  return {best_p, best_v};
}

// Exact grid-power EE maximum of a link family with optional selection: when
// `cap` >= 0, at most cap links are served and only links with positive
// parametric value are kept (required links always stay).
struct GridFamilyResult {
  double eta = 0.0;
  std::vector<char> selected;
  std::vector<double> powers;  // [link][slot] for selected links
  bool feasible = true;
};

GridFamilyResult grid_family_opt(const std::vector<GridLink>& links,
                                 const std::vector<char>& required, double fixed_power,
                                 int cap, double pmax, int levels, double ee_unit) {
  GridFamilyResult res;
  const int L = static_cast<int>(links.size());
  const int N = L == 0 ? 0 : static_cast<int>(links[0].gain.size());
  res.selected.assign(L, 0);
  res.powers.assign(size_t(L) * N, 0.0);
  for (int l = 0; l < L; ++l)
    for (int n = 0; n < N; ++n)
      if (links[l].floor[n] > pmax * kFloorSlack) {
        if (required[l]) {
          res.feasible = false;
          return res;
        }
      }

  double eta = 0.0;
  for (int it = 0; it < 60; ++it) {
    // Parametric value of each link at this eta.
    std::vector<double> val(L, 0.0);
    std::vector<std::vector<double>> pw(L, std::vector<double>(N, 0.0));
    std::vector<char> usable(L, 1);
    for (int l = 0; l < L; ++l) {
      for (int n = 0; n < N; ++n) {
        if (links[l].floor[n] > pmax * kFloorSlack) {
          usable[l] = 0;
          break;
        }
        const auto [p, v] = best_grid_power(links[l], n, eta, ee_unit, pmax, levels);
        pw[l][n] = p;
        val[l] += v;
      }
    }
    // Selection: required links always; others by positive value, capped.
    std::vector<char> sel(L, 0);
    int used = 0;
    for (int l = 0; l < L; ++l)
      if (required[l]) {
        sel[l] = 1;
        ++used;
      }
    std::vector<std::pair<double, int>> ranked;
    for (int l = 0; l < L; ++l)
      if (!required[l] && usable[l] && val[l] > 0.0) ranked.push_back({val[l], l});
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    for (const auto& [v, l] : ranked) {
      if (cap >= 0 && used >= cap) break;
      sel[l] = 1;
      ++used;
    }
    // Achieved ratio at this selection.
    double rate = 0.0, power = fixed_power;
    for (int l = 0; l < L; ++l) {
      if (!sel[l]) continue;
      for (int n = 0; n < N; ++n) {
        rate += shannon_rate(links[l].bandwidth,
                             sinr(pw[l][n], links[l].gain[n], links[l].omega[n], links[l].sigma)) /
                ee_unit;
        power += pw[l][n];
      }
    }
    const double f = rate - eta * power;
    res.selected = sel;
    for (int l = 0; l < L; ++l)
      for (int n = 0; n < N; ++n) res.powers[l * N + n] = sel[l] ? pw[l][n] : 0.0;
    if (std::fabs(f) <= 1e-12) break;
    eta = std::max(eta, rate / power);
  }
  res.eta = eta;
  return res;
}

// Candidate positions: the square grid centered on the served-LUE centroid,
// plus the centroid itself and the release point as anchors.
std::vector<Position3D> deploy_candidates(const Scenario& s, int u, const std::vector<int>& served,
                                          int grid) {
  std::vector<Position3D> out;
  out.push_back(s.abs_initial[u]);
  if (served.empty()) return out;
  double cx = 0.0, cy = 0.0;
  int cnt = 0;
  for (const int ml : served)
    for (int n = 0; n < s.slot_count(); ++n) {
      cx += s.lue_pos(ml, n).x;
      cy += s.lue_pos(ml, n).y;
      ++cnt;
    }
  cx /= cnt;
  cy /= cnt;
  out.push_back({cx, cy, s.abs_initial[u].z});
  const int side = std::max(1, static_cast<int>(std::lround(std::sqrt(double(grid)))));
  const double span = s.config.lue_area_m / 2.0;
  for (int i = 0; i < side; ++i)
    for (int j = 0; j < side; ++j) {
      const double x = cx + (side == 1 ? 0.0 : (double(i) / (side - 1) - 0.5) * span);
      const double y = cy + (side == 1 ? 0.0 : (double(j) / (side - 1) - 0.5) * span);
      out.push_back({std::clamp(x, 0.0, s.config.region_size_m),
                     std::clamp(y, 0.0, s.config.region_size_m), s.abs_initial[u].z});
    }
  return out;
}

// All LUE->ABS assignment maps within the RB caps (value U = unserved).
void enumerate_assignments(int Ml, int U, int cap, const std::function<void(const std::vector<int>&)>& emit) {
  std::vector<int> assign(Ml, U);
  std::vector<int> load(U, 0);
  std::function<void(int)> rec = [&](int ml) {
    if (ml == Ml) {
      emit(assign);
      return;
    }
    for (int u = 0; u <= U; ++u) {
      if (u < U && load[u] >= cap) continue;
      assign[ml] = u;
      if (u < U) ++load[u];
      rec(ml + 1);
      if (u < U) --load[u];
      assign[ml] = U;
    }
  };
  rec(0);
}

std::uint64_t count_assignments(int Ml, int U, int cap, std::uint64_t limit) {
  std::uint64_t count = 0;
  std::vector<int> load(U, 0);
  std::function<bool(int)> rec = [&](int ml) -> bool {
    if (ml == Ml) return ++count <= limit;
    for (int u = 0; u <= U; ++u) {
      if (u < U && load[u] >= cap) continue;
      if (u < U) ++load[u];
      const bool go = rec(ml + 1);
      if (u < U) --load[u];
      if (!go) return false;
    }
    return true;
  };
  rec(0);
  return count;
}

// Segment solve of the access network on grids: enumerate associations,
// Dinkelbach over (deployment candidates x grid powers) per association.
struct AbsGridBest {
  double eta = -1.0;
  std::vector<int> assign;           // ml -> u or U
  std::vector<Position3D> position;  // per u
  std::vector<double> powers;        // [u][ml][n] dense
  bool any = false;
};

AbsGridBest abs_grid_search(const Scenario& s, const ChannelModel& ch, const ColdTables& tables,
                            const SearchGrids& grids, double ee_unit,
                            const std::vector<std::vector<int>>* restrict_assign = nullptr) {
  const int U = s.abs_count(), Ml = s.lue_count(), N = s.slot_count();
  const double pmax = s.radio().p_max_w;
  const double bw = ch.bandwidth(LinkClass::AbsToLue);
  const double sigma = ch.noise_w(LinkClass::AbsToLue);
  const double g0 = ch.abs_lue_reference_gain();
  AbsGridBest best;
  best.powers.assign(size_t(U) * Ml * N, 0.0);
  if (U == 0) {
    best.any = true;
    best.eta = 0.0;
    return best;
  }

  const Allocation base = Allocation::initial(s);
  const double flight = total_flight_power(s, base);

  auto eval_assign = [&](const std::vector<int>& assign) {
    std::vector<std::vector<int>> served(U);
    for (int ml = 0; ml < Ml; ++ml)
      if (assign[ml] < U) served[assign[ml]].push_back(ml);
    std::vector<std::vector<Position3D>> cand(U);
    for (int u = 0; u < U; ++u) cand[u] = deploy_candidates(s, u, served[u], grids.deploy_grid);
    std::vector<char> refined(U, 0);
    // Dinkelbach over the per-ABS position choice and grid powers. Positions
    // are chosen greedily by ABS index under the safe-distance filter, then
    // the powers are set at the chosen positions.
    double eta = 0.0;
    std::vector<int> pos_idx(U, 0);
    std::vector<double> powers(size_t(U) * Ml * N, 0.0);
    double final_eta = -1.0;
    for (int it = 0; it < 50; ++it) {
      bool infeasible = false;
      // Candidate values per ABS at the current eta.
      for (int u = 0; u < U && !infeasible; ++u) {
        if (served[u].empty()) {
          pos_idx[u] = 0;
          continue;
        }
        double best_v = -std::numeric_limits<double>::infinity();
        int best_pi = -1;
        for (size_t pi = 0; pi < cand[u].size(); ++pi) {
          bool clear = true;
          for (int w = 0; w < u && clear; ++w)
            if (!served[w].empty())
              clear = distance_sq(cand[u][pi], cand[w][pos_idx[w]]) >= s.radio().d_th;
          if (!clear) continue;
          double v = 0.0;
          bool ok = true;
          for (size_t li = 0; li < served[u].size() && ok; ++li) {
            const int ml = served[u][li];
            GridLink gl;
            gl.bandwidth = bw;
            gl.sigma = sigma;
            gl.gain.resize(N);
            gl.omega.resize(N);
            gl.floor.resize(N);
            for (int n = 0; n < N; ++n) {
              gl.gain[n] = g0 / distance_sq(cand[u][pi], s.lue_pos(ml, n));
              gl.omega[n] = tables.cold.at_abs_lue(u, ml, n);
              gl.floor[n] = power_floor(demand_rate_per_slot(s), bw,
                                        tables.worst.at_abs_lue(u, ml, n) + sigma, gl.gain[n]);
              if (gl.floor[n] > pmax * kFloorSlack) {
                ok = false;
                break;
              }
              v += best_grid_power(gl, n, eta, ee_unit, pmax, grids.power_levels).second;
            }
          }
          if (!ok) continue;
          if (v > best_v + 1e-18) {
            best_v = v;
            best_pi = static_cast<int>(pi);
          }
        }
        if (best_pi < 0) {
          infeasible = true;
          break;
        }
        pos_idx[u] = best_pi;
      }
      if (infeasible) return;  // association cannot meet demand
      // One refinement round: a finer grid around the first winner.
      for (int u = 0; u < U; ++u) {
        if (refined[u] || served[u].empty()) continue;
        refined[u] = 1;
        const Position3D c0 = cand[u][pos_idx[u]];
        const int side = std::max(1, static_cast<int>(std::lround(std::sqrt(double(grids.deploy_grid)))));
        const double span = s.config.lue_area_m / 2.0 / side;
        for (int i = 0; i < side; ++i)
          for (int j = 0; j < side; ++j) {
            const double x = c0.x + (side == 1 ? 0.0 : (double(i) / (side - 1) - 0.5) * span);
            const double y = c0.y + (side == 1 ? 0.0 : (double(j) / (side - 1) - 0.5) * span);
            cand[u].push_back({std::clamp(x, 0.0, s.config.region_size_m),
                               std::clamp(y, 0.0, s.config.region_size_m), c0.z});
          }
      }
      // Powers at the chosen positions; achieved ratio.
      double rate = 0.0, power = flight;
      std::vector<double> pw(size_t(U) * Ml * N, 0.0);
      for (int u = 0; u < U; ++u)
        for (const int ml : served[u]) {
          GridLink gl;
          gl.bandwidth = bw;
          gl.sigma = sigma;
          gl.gain.resize(N);
          gl.omega.resize(N);
          gl.floor.resize(N);
          for (int n = 0; n < N; ++n) {
            gl.gain[n] = g0 / distance_sq(cand[u][pos_idx[u]], s.lue_pos(ml, n));
            gl.omega[n] = tables.cold.at_abs_lue(u, ml, n);
            gl.floor[n] = power_floor(demand_rate_per_slot(s), bw,
                                      tables.worst.at_abs_lue(u, ml, n) + sigma, gl.gain[n]);
            const auto [p, v] = best_grid_power(gl, n, eta, ee_unit, pmax, grids.power_levels);
            pw[(u * Ml + ml) * N + n] = p;
            rate += shannon_rate(bw, sinr(p, gl.gain[n], gl.omega[n], sigma)) / ee_unit;
            power += p;
          }
        }
      powers = pw;
      final_eta = power > 0.0 ? rate / power : 0.0;
      const double f = rate - eta * power;
      if (std::fabs(f) <= 1e-12) break;
      eta = std::max(eta, final_eta);
    }
    if (final_eta > best.eta) {
      best.eta = final_eta;
      best.assign = assign;
      best.position.assign(U, Position3D{});
      for (int u = 0; u < U; ++u) best.position[u] = cand[u][pos_idx[u]];
      best.powers = powers;
      best.any = true;
    }
  };

  if (restrict_assign) {
    for (const auto& a : *restrict_assign) eval_assign(a);
  } else {
    enumerate_assignments(Ml, U, s.radio().k_rb, eval_assign);
  }
  return best;
}

// Satellite or CBS grid family: links = required backhaul + candidate HUEs.
GridFamilyResult provider_grid_opt(const Scenario& s, const ChannelModel& ch,
                                   const ColdTables& tables, const Association& as,
                                   const Allocation& al, Segment seg, int cap, int levels,
                                   double ee_unit, std::vector<BLink>& links_out) {
  const BackhaulFloors floors = backhaul_floors(ch, as, al);
  std::vector<GridLink> links;
  std::vector<char> required;
  links_out.clear();
  const int N = s.slot_count();
  auto push = [&](const BLink& bl, bool req, double demand_bps, const double* rate_floor) {
    GridLink gl;
    gl.bandwidth = bl.bandwidth;
    gl.sigma = bl.sigma;
    gl.gain.resize(N);
    gl.omega.resize(N);
    gl.floor.resize(N);
    for (int n = 0; n < N; ++n) {
      gl.gain[n] = link_gain(ch, al, bl, n);
      gl.omega[n] = cold_omega(tables, bl, n);
      const double need = rate_floor ? rate_floor[n] : demand_bps;
      gl.floor[n] = power_floor(need, gl.bandwidth, worst_omega(tables, bl, n) + gl.sigma, gl.gain[n]);
    }
    links.push_back(std::move(gl));
    required.push_back(req);
    links_out.push_back(bl);
  };
  if (seg == Segment::Sat) {
    for (int u = 0; u < s.abs_count(); ++u)
      if (as.sat_serves_abs(u)) {
        BLink bl{LinkClass::SatToAbs, u, -1, -1, -1, 0.0, ch.bandwidth(LinkClass::SatToAbs),
                 ch.noise_w(LinkClass::SatToAbs)};
        push(bl, true, 0.0, &floors.sat_abs[u * N]);
      }
    for (const int mh : sat_hue_candidates(s)) {
      BLink bl{LinkClass::SatToHue, -1, -1, mh, -1, 0.0, ch.bandwidth(LinkClass::SatToHue),
               ch.noise_w(LinkClass::SatToHue)};
      push(bl, false, demand_rate_per_slot(s), nullptr);
    }
    return grid_family_opt(links, required, s.radio().circuit_sat_w * N, cap,
                           s.radio().p_max_w, levels, ee_unit);
  }
  // CBS family: all stations in one ratio, per-station caps handled by the
  // selection (cap applies per c through repeated passes).
  for (int c = 0; c < s.cbs_count(); ++c)
    for (int u = 0; u < s.abs_count(); ++u)
      if (as.cbs_serving_abs(u) == c) {
        BLink bl{LinkClass::CbsToAbs, u, -1, -1, c, 0.0, ch.bandwidth(LinkClass::CbsToAbs),
                 ch.noise_w(LinkClass::CbsToAbs)};
        push(bl, true, 0.0, &floors.cbs_abs[(c * s.abs_count() + u) * N]);
      }
  for (int c = 0; c < s.cbs_count(); ++c)
    for (const int mh : cbs_hue_candidates(s, c)) {
      BLink bl{LinkClass::CbsToHue, -1, -1, mh, c, 0.0, ch.bandwidth(LinkClass::CbsToHue),
               ch.noise_w(LinkClass::CbsToHue)};
      push(bl, false, demand_rate_per_slot(s), nullptr);
    }
  return grid_family_opt(links, required, s.radio().circuit_cbs_w * s.cbs_count() * N, cap,
                         s.radio().p_max_w, levels, ee_unit);
}

void apply_provider_selection(const Scenario& s, Association& as, const GridFamilyResult& fam,
                              const std::vector<BLink>& links, Allocation& al, Segment seg) {
  const int N = s.slot_count();
  if (seg == Segment::Sat) {
    std::vector<int> abss, hues;
    for (size_t l = 0; l < links.size(); ++l) {
      if (!fam.selected[l]) continue;
      if (links[l].cls == LinkClass::SatToAbs) abss.push_back(links[l].u);
      if (links[l].cls == LinkClass::SatToHue) hues.push_back(links[l].mh);
    }
    as.set_sat_service(abss, hues);
    for (size_t l = 0; l < links.size(); ++l) {
      if (!fam.selected[l]) continue;
      for (int n = 0; n < N; ++n) {
        if (links[l].cls == LinkClass::SatToAbs)
          al.pw_sat_abs(links[l].u, n) = fam.powers[l * N + n];
        else
          al.pw_sat_hue(links[l].mh, n) = fam.powers[l * N + n];
      }
    }
    return;
  }
  for (int c = 0; c < s.cbs_count(); ++c) {
    std::vector<int> abss, hues;
    for (size_t l = 0; l < links.size(); ++l) {
      if (!fam.selected[l] || links[l].c != c) continue;
      if (links[l].cls == LinkClass::CbsToAbs) abss.push_back(links[l].u);
      if (links[l].cls == LinkClass::CbsToHue) hues.push_back(links[l].mh);
    }
    as.set_cbs_service(c, abss, hues);
  }
  for (size_t l = 0; l < links.size(); ++l) {
    if (!fam.selected[l]) continue;
    for (int n = 0; n < N; ++n) {
      if (links[l].cls == LinkClass::CbsToAbs)
        al.pw_cbs_abs(links[l].c, links[l].u, n) = fam.powers[l * N + n];
      else
        al.pw_cbs_hue(links[l].c, links[l].mh, n) = fam.powers[l * N + n];
    }
  }
}

}  // namespace

const char* algorithm_name(AlgorithmTag t) {
  switch (t) {
    case AlgorithmTag::Proposed: return "proposed";
    case AlgorithmTag::Centralized: return "centralized";
    case AlgorithmTag::Greedy: return "greedy";
    case AlgorithmTag::Random: return "random";
    case AlgorithmTag::Dynamic: return "dynamic";
    case AlgorithmTag::BruteForce: return "brute_force";
  }
  return "?";
}

AlgorithmTag parse_algorithm(const std::string& name) {
  if (name == "proposed") return AlgorithmTag::Proposed;
  if (name == "centralized") return AlgorithmTag::Centralized;
  if (name == "greedy") return AlgorithmTag::Greedy;
  if (name == "random") return AlgorithmTag::Random;
  if (name == "dynamic") return AlgorithmTag::Dynamic;
  if (name == "brute_force") return AlgorithmTag::BruteForce;
  throw std::invalid_argument("unknown algorithm: " + name);
}

EEReport score_cold(const ChannelModel& ch, const Association& as, const Allocation& al) {
  const Scenario& s = ch.scenario();
  const ColdTables tables = make_tables(ch);
  EEReport rep;
  const std::vector<BLink> links = all_links(ch, as);
  for (const auto& l : links) {
    for (int n = 0; n < al.N; ++n) {
      const double p = alloc_power_const(al, l, n);
      const double r = shannon_rate(l.bandwidth, sinr(p, link_gain(ch, al, l, n),
                                                      cold_omega(tables, l, n), l.sigma));
      switch (l.cls) {
        case LinkClass::AbsToLue:
          rep.rate_abs += r;
          rep.power_abs += p;
          break;
        case LinkClass::SatToAbs:
        case LinkClass::SatToHue:
          rep.rate_sat += r;
          rep.power_sat += p;
          break;
        default:
          rep.rate_cbs += r;
          rep.power_cbs += p;
      }
    }
  }
  rep.power_abs += total_flight_power(s, al);
  rep.power_sat += s.radio().circuit_sat_w * al.N;
  rep.power_cbs += s.radio().circuit_cbs_w * s.cbs_count() * al.N;
  finalize_ee(rep);
  return rep;
}

BaselineResult greedy_solve(const Scenario& s, const ChannelModel& ch, const SolverOptions& opts) {
  (void)opts;
  const ColdTables tables = make_tables(ch);
  Association as = Association::empty(s);
  Allocation al = Allocation::initial(s);

  // Access links in descending gain; each RB goes to the best unserved LUE.
  struct Cand {
    double gain;
    int u, ml;
  };
  std::vector<Cand> cands;
  for (int u = 0; u < s.abs_count(); ++u)
    for (int ml = 0; ml < s.lue_count(); ++ml)
      cands.push_back({ch.gain_abs_at(s.abs_initial[u], s.lue_pos(ml, 0)), u, ml});
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    if (a.gain != b.gain) return a.gain > b.gain;
    if (a.u != b.u) return a.u < b.u;
    return a.ml < b.ml;
  });
  std::vector<std::vector<int>> served(s.abs_count());
  std::vector<char> taken(s.lue_count(), 0);
  const double bw = ch.bandwidth(LinkClass::AbsToLue);
  const double sigma = ch.noise_w(LinkClass::AbsToLue);
  for (const auto& c : cands) {
    if (taken[c.ml] || static_cast<int>(served[c.u].size()) >= s.radio().k_rb) continue;
    const BLink l{LinkClass::AbsToLue, c.u, c.ml, -1, -1, 0.0, bw, sigma};
    if (!link_feasible_horizon(s, ch, &tables, l, al)) continue;
    served[c.u].push_back(c.ml);
    taken[c.ml] = 1;
  }
  for (int u = 0; u < s.abs_count(); ++u) as.set_abs_service(u, served[u]);
  apply_backhaul_choices(s, as);
  select_hues(s, ch, as, [&](LinkClass cls, int c, int mh) {
    BLink l{cls, -1, -1, mh, c, 0.0, ch.bandwidth(cls), ch.noise_w(cls)};
    const double share = cls == LinkClass::SatToHue ? s.radio().circuit_sat_w
                                                    : s.radio().circuit_cbs_w;
    return link_score(s, ch, tables, l, al, share);
  });
  assign_powers(ch, as, al, tables);
  drop_repair(ch, as, al, tables);
  return finish(ch, std::move(as), std::move(al), tables);
}

BaselineResult dynamic_solve(const Scenario& s, const ChannelModel& ch, const SolverOptions& opts) {
  (void)opts;
  const ColdTables tables = make_tables(ch);
  Association as = Association::empty(s);
  Allocation al = Allocation::initial(s);
  const double bw = ch.bandwidth(LinkClass::AbsToLue);
  const double sigma = ch.noise_w(LinkClass::AbsToLue);
  const double flight = total_flight_power(s, al);

  // Per-slot matching of LUEs onto (ABS, RB) pairs on per-link EE scores. The
  // access geometry is static within the horizon, so the slot-0 matching is
  // the stage decision carried through the horizon.
  const int U = s.abs_count(), K = s.radio().k_rb;
  std::vector<std::vector<double>> score(s.lue_count(), std::vector<double>(U * K, 0.0));
  const double share = flight / std::max(1, s.lue_count()) / s.slot_count();
  for (int ml = 0; ml < s.lue_count(); ++ml)
    for (int u = 0; u < U; ++u) {
      BLink l{LinkClass::AbsToLue, u, ml, -1, -1, 0.0, bw, sigma};
      const double v = link_score(s, ch, tables, l, al, share);
      for (int k = 0; k < K; ++k) score[ml][u * K + k] = v < 0 ? -1e300 : v;
    }
  const std::vector<int> match = hungarian_max(score);
  std::vector<std::vector<int>> served(U);
  for (int ml = 0; ml < s.lue_count(); ++ml)
    if (match[ml] >= 0) served[match[ml] / K].push_back(ml);
  for (int u = 0; u < U; ++u) as.set_abs_service(u, served[u]);
  apply_backhaul_choices(s, as);
  select_hues(s, ch, as, [&](LinkClass cls, int c, int mh) {
    BLink l{cls, -1, -1, mh, c, 0.0, ch.bandwidth(cls), ch.noise_w(cls)};
    const double sh = cls == LinkClass::SatToHue ? s.radio().circuit_sat_w
                                                 : s.radio().circuit_cbs_w;
    return link_score(s, ch, tables, l, al, sh);
  });
  assign_powers(ch, as, al, tables);
  drop_repair(ch, as, al, tables);
  return finish(ch, std::move(as), std::move(al), tables);
}

BaselineResult random_solve(const Scenario& s, const ChannelModel& ch, const SolverOptions& opts,
                            std::uint64_t seed) {
  (void)opts;
  const ColdTables tables = make_tables(ch);
  Rng rng(seed, "random_solve");
  for (int attempt = 0; attempt < 10000; ++attempt) {
    Association as = Association::empty(s);
    Allocation al = Allocation::initial(s);
    std::vector<std::vector<int>> served(s.abs_count());
    for (int ml = 0; ml < s.lue_count(); ++ml) {
      std::vector<int> choices{-1};
      for (int u = 0; u < s.abs_count(); ++u)
        if (static_cast<int>(served[u].size()) < s.radio().k_rb) choices.push_back(u);
      const int pick = choices[rng.uniform_int(0, static_cast<int>(choices.size()) - 1)];
      if (pick >= 0) served[pick].push_back(ml);
    }
    for (int u = 0; u < s.abs_count(); ++u) as.set_abs_service(u, served[u]);
    // Uniform backhaul among the covering nodes.
    std::vector<int> sat_list;
    std::vector<std::vector<int>> cbs_list(s.cbs_count());
    for (int u = 0; u < s.abs_count(); ++u) {
      if (served[u].empty()) continue;
      std::vector<int> options{-1};  // satellite
      for (int c = 0; c < s.cbs_count(); ++c)
        if (distance(s.abs_initial[u], s.cbs[c]) <= s.config.cbs_radius_m) options.push_back(c);
      const int pick = options[rng.uniform_int(0, static_cast<int>(options.size()) - 1)];
      if (pick < 0)
        sat_list.push_back(u);
      else
        cbs_list[pick].push_back(u);
    }
    as.set_sat_service(sat_list, {});
    for (int c = 0; c < s.cbs_count(); ++c) as.set_cbs_service(c, cbs_list[c], {});
    // Uniform HUE subsets within the caps, respecting the coverage partition.
    {
      std::vector<int> hues;
      int room = s.radio().z_rb - static_cast<int>(sat_list.size());
      for (const int mh : sat_hue_candidates(s)) {
        if (room <= 0) break;
        if (rng.uniform() < 0.5) {
          hues.push_back(mh);
          --room;
        }
      }
      as.set_sat_service(sat_list, hues);
    }
    std::vector<char> taken(s.hue_count(), 0);
    for (int c = 0; c < s.cbs_count(); ++c) {
      std::vector<int> hues;
      int room = s.radio().y_rb - static_cast<int>(cbs_list[c].size());
      for (const int mh : cbs_hue_candidates(s, c)) {
        if (taken[mh] || room <= 0) continue;
        if (rng.uniform() < 0.5) {
          hues.push_back(mh);
          taken[mh] = 1;
          --room;
        }
      }
      as.set_cbs_service(c, cbs_list[c], hues);
    }
    // Uniform powers over every serving link.
    for (const auto& l : all_links(ch, as))
      for (int n = 0; n < al.N; ++n) {
        Allocation& mut = al;
        alloc_power(mut, l, n) = rng.uniform(0.0, s.radio().p_max_w);
      }
    if (full_violations(ch, as, al).empty()) {
      BaselineResult r;
      r.report = evaluate_ee(ch, as, al);
      r.assoc = std::move(as);
      r.alloc = std::move(al);
      return r;
    }
  }
  throw std::runtime_error("random_solve: no feasible sample within 10^4 attempts");
}

BaselineResult centralized_solve(const Scenario& s, const ChannelModel& ch,
                                 const SolverOptions& opts, const SearchGrids& grids) {
  std::optional<std::vector<std::vector<int>>> restricted;
  const std::uint64_t space =
      count_assignments(s.lue_count(), s.abs_count(), s.radio().k_rb, 1ull << 16);
  if (space > (1ull << 16)) {
    // Local-search pool: the greedy association, its single-move neighbors
    // and a few seeded perturbations; the grid scorer picks the best.
    const BaselineResult seed = greedy_solve(s, ch, opts);
    std::vector<int> cur(s.lue_count(), s.abs_count());
    for (int u = 0; u < s.abs_count(); ++u)
      for (const int ml : seed.assoc.served_lues(u)) cur[ml] = u;
    std::vector<std::vector<int>> pool{cur};
    for (int ml = 0; ml < s.lue_count(); ++ml)
      for (int u = 0; u <= s.abs_count(); ++u) {
        if (cur[ml] == u) continue;
        std::vector<int> b = cur;
        b[ml] = u;
        std::vector<int> load(s.abs_count(), 0);
        bool ok = true;
        for (const int x : b)
          if (x < s.abs_count() && ++load[x] > s.radio().k_rb) ok = false;
        if (ok) pool.push_back(b);
      }
    Rng rng(1, "centralized_restarts");
    for (int r = 0; r < 3; ++r) {
      std::vector<int> v = cur;
      for (int ml = 0; ml < s.lue_count(); ++ml)
        if (rng.uniform() < 0.3) v[ml] = static_cast<int>(rng.uniform_int(0, s.abs_count()));
      std::vector<int> load(s.abs_count(), 0);
      bool ok = true;
      for (const int x : v)
        if (x < s.abs_count() && ++load[x] > s.radio().k_rb) ok = false;
      if (ok) pool.push_back(v);
    }
    restricted = std::move(pool);
  }

  auto solve_with = [&](const ColdTables& tables) {
    Association as = Association::empty(s);
    Allocation al = Allocation::initial(s);
    const AbsGridBest best =
        abs_grid_search(s, ch, tables, grids, opts.ee_unit, restricted ? &*restricted : nullptr);
    if (best.any && !best.assign.empty()) {
      std::vector<std::vector<int>> served(s.abs_count());
      for (int ml = 0; ml < s.lue_count(); ++ml)
        if (best.assign[ml] < s.abs_count()) served[best.assign[ml]].push_back(ml);
      for (int u = 0; u < s.abs_count(); ++u) {
        as.set_abs_service(u, served[u]);
        if (!served[u].empty())
          for (int n = 0; n < al.N; ++n) al.pos(u, n) = best.position[u];
      }
      al.derive_speeds(s);
      for (int u = 0; u < s.abs_count(); ++u)
        for (const int ml : served[u])
          for (int n = 0; n < al.N; ++n)
            al.pw_abs_lue(u, ml, n) = best.powers[(u * al.Ml + ml) * al.N + n];
    }
    apply_backhaul_choices(s, as);
    std::vector<BLink> sat_links, cbs_links;
    const GridFamilyResult sat_fam = provider_grid_opt(s, ch, tables, as, al, Segment::Sat,
                                                       s.radio().z_rb, grids.power_levels,
                                                       opts.ee_unit, sat_links);
    apply_provider_selection(s, as, sat_fam, sat_links, al, Segment::Sat);
    const GridFamilyResult cbs_fam = provider_grid_opt(s, ch, tables, as, al, Segment::Cbs,
                                                       s.radio().y_rb, grids.power_levels,
                                                       opts.ee_unit, cbs_links);
    apply_provider_selection(s, as, cbs_fam, cbs_links, al, Segment::Cbs);
    return finish(ch, std::move(as), std::move(al), tables);
  };

  // Full-information coordinator: score at the cold tables first, then once
  // more with the interference refrozen at the first pass's transmit levels.
  const ColdTables cold = make_tables(ch);
  BaselineResult pass1 = solve_with(cold);
  ColdTables warm = cold;
  warm.cold = refreeze_interference(ch, pass1.alloc);
  BaselineResult pass2 = solve_with(warm);
  return pass2.report.eta_total >= pass1.report.eta_total ? pass2 : pass1;
}

double brute_force_oracle(const Scenario& s, const ChannelModel& ch, const SolverOptions& opts,
                          const SearchGrids& grids) {
  const ColdTables tables = make_tables(ch);
  const std::uint64_t assoc_count =
      count_assignments(s.lue_count(), s.abs_count(), s.radio().k_rb, 100000000ull);
  std::uint64_t deploy_combos = 1;
  for (int u = 0; u < s.abs_count(); ++u) deploy_combos *= grids.deploy_grid + 1;
  const std::uint64_t links = std::uint64_t(s.abs_count()) * s.radio().k_rb + s.radio().z_rb +
                              std::uint64_t(s.cbs_count()) * s.radio().y_rb;
  const std::uint64_t work =
      assoc_count * deploy_combos * std::max<std::uint64_t>(1, links * s.slot_count() * grids.power_levels);
  if (work > 10000000ull)
    throw std::invalid_argument("brute_force_oracle: enumeration exceeds the 10^7 budget");

  const AbsGridBest best = abs_grid_search(s, ch, tables, grids, opts.ee_unit);
  const double eta_abs = best.any ? std::max(0.0, best.eta) : 0.0;

  // Provider families share no variables with the access segment under the
  // frozen interference; their grid optima add up.
  Association as = Association::empty(s);
  Allocation al = Allocation::initial(s);
  if (best.any && !best.assign.empty()) {
    std::vector<std::vector<int>> served(s.abs_count());
    for (int ml = 0; ml < s.lue_count(); ++ml)
      if (best.assign[ml] < s.abs_count()) served[best.assign[ml]].push_back(ml);
    for (int u = 0; u < s.abs_count(); ++u) {
      as.set_abs_service(u, served[u]);
      if (!served[u].empty())
        for (int n = 0; n < al.N; ++n) al.pos(u, n) = best.position[u];
    }
    for (int u = 0; u < s.abs_count(); ++u)
      for (const int ml : served[u])
        for (int n = 0; n < al.N; ++n)
          al.pw_abs_lue(u, ml, n) = best.powers[(u * al.Ml + ml) * al.N + n];
  }
  apply_backhaul_choices(s, as);
  std::vector<BLink> sat_links, cbs_links;
  const GridFamilyResult sat_fam = provider_grid_opt(s, ch, tables, as, al, Segment::Sat,
                                                     s.radio().z_rb, grids.power_levels,
                                                     opts.ee_unit, sat_links);
  const GridFamilyResult cbs_fam = provider_grid_opt(s, ch, tables, as, al, Segment::Cbs,
                                                     s.radio().y_rb, grids.power_levels,
                                                     opts.ee_unit, cbs_links);
  return eta_abs + std::max(0.0, sat_fam.eta) + std::max(0.0, cbs_fam.eta);
}

}  // namespace sasnet
