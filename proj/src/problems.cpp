#include "sasnet/problems.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace sasnet {

namespace {

constexpr double kAbsTol = 1e-9;

bool ge(double a, double b) { return a >= b - kAbsTol * std::max(1.0, std::fabs(b)); }
bool le(double a, double b) { return a <= b + kAbsTol * std::max(1.0, std::fabs(b)); }

struct Row {
  Violation v;
  Segment seg;
};

void add(std::vector<Row>& out, Segment seg, int id, std::vector<int> idx, double slack,
         std::string detail) {
  out.push_back({Violation{id, std::move(idx), slack, std::move(detail)}, seg});
}

void check_shapes(const Scenario& s, const Association& as, const Allocation& al) {
  if (as.U != s.abs_count() || as.Ml != s.lue_count() || as.Mh != s.hue_count() ||
      as.C != s.cbs_count() || as.K != s.radio().k_rb || as.Z != s.radio().z_rb ||
      as.Y != s.radio().y_rb)
    throw std::invalid_argument("association shape does not match scenario");
  if (al.U != s.abs_count() || al.Ml != s.lue_count() || al.Mh != s.hue_count() ||
      al.C != s.cbs_count() || al.N != s.slot_count())
    throw std::invalid_argument("allocation shape does not match scenario");
}

// Every numbered constraint, tagged with the segment whose problem owns it.
std::vector<Row> evaluate_all(const ChannelModel& ch, const Association& as, const Allocation& al) {
  const Scenario& s = ch.scenario();
  check_shapes(s, as, al);
  std::vector<Row> out;
  const int N = al.N;
  const double L = s.time().slot_len_s;
  const EnergyParams& en = s.energy();
  const RadioParams& ra = s.radio();
  const double e_th = effective_energy_threshold(s);
  const RateTable rt = achieved_rates(ch, as, al);

  // (31) each ABS returns to its initial slot position at the horizon end
  for (int u = 0; u < al.U; ++u) {
    const double gap = distance(al.pos(u, 0), al.pos(u, N - 1));
    if (gap > 1e-6)
      add(out, Segment::Abs, 31, {u}, gap, "first/last slot positions differ");
  }
  // (32) per-slot displacement within v_max * L
  for (int u = 0; u < al.U; ++u)
    for (int n = 0; n + 1 < N; ++n) {
      const double leg = distance(al.pos(u, n), al.pos(u, n + 1));
      if (!le(leg, en.v_max_mps * L))
        add(out, Segment::Abs, 32, {u, n}, leg - en.v_max_mps * L, "slot displacement exceeds v_max*L");
    }
  // (33)/(34) flight energy and power thresholds; (35) speed box
  for (int u = 0; u < al.U; ++u) {
    const std::vector<FlightState> fs = flight_states(s, al, u);
    for (int n = 0; n < N; ++n) {
      const double v = fs[n].speed_mps;
      if (v < en.v_min_mps - kAbsTol || v > en.v_max_mps + kAbsTol) {
        add(out, Segment::Abs, 35, {u, n},
            v < en.v_min_mps ? en.v_min_mps - v : v - en.v_max_mps, "speed outside box");
        if (v <= 0.0) continue;  // energy model undefined; (35) already reported
      }
      const double e = flight_energy(fs[n], en);
      const double p = flight_power(e, L, en.literal_flight_power);
      if (!en.invert_energy_constraints) {
        if (!ge(e, e_th)) add(out, Segment::Abs, 33, {u, n}, e_th - e, "flight energy below threshold");
        if (!ge(p, e / L)) add(out, Segment::Abs, 34, {u, n}, e / L - p, "flight power below E/L");
      } else {
        if (!le(e, e_th)) add(out, Segment::Abs, 33, {u, n}, e - e_th, "flight energy above budget");
        if (!le(p, e / L)) add(out, Segment::Abs, 34, {u, n}, p - e / L, "flight power above E/L");
      }
    }
  }
  // (36) altitude box
  for (int u = 0; u < al.U; ++u)
    for (int n = 0; n < N; ++n) {
      const double h = al.pos(u, n).z;
      if (h < en.h_min_m - kAbsTol)
        add(out, Segment::Abs, 36, {u, n}, en.h_min_m - h, "altitude below h_min");
      else if (h > en.h_max_m + kAbsTol)
        add(out, Segment::Abs, 36, {u, n}, h - en.h_max_m, "altitude above h_max");
    }
  // (37)/(38) backhaul capacity per chosen backhaul node class. An ABS that
  // carries access traffic without any backhaul is charged to the satellite
  // side, where its backhaul rate is zero.
  for (int n = 0; n < N; ++n) {
    double traffic_sat = 0.0, cap_sat = 0.0, traffic_cbs = 0.0, cap_cbs = 0.0;
    for (int u = 0; u < al.U; ++u) {
      double traffic = 0.0;
      for (const int ml : as.served_lues(u)) traffic += rt.at_abs_lue(u, ml, n);
      const Backhaul b = as.backhaul(u);
      if (b.kind == BackhaulKind::Cbs) {
        traffic_cbs += traffic;
        cap_cbs += rt.cbs_abs[(b.cbs * al.U + u) * N + n];
      } else {
        traffic_sat += traffic;
        if (b.kind == BackhaulKind::Sat) cap_sat += rt.sat_abs[u * N + n];
      }
    }
    if (!le(traffic_sat, cap_sat))
      add(out, Segment::Abs, 37, {n}, traffic_sat - cap_sat, "satellite backhaul capacity exceeded");
    if (!le(traffic_cbs, cap_cbs))
      add(out, Segment::Abs, 38, {n}, traffic_cbs - cap_cbs, "CBS backhaul capacity exceeded");
  }
  // (39) per-LUE demand over the horizon, for associated pairs
  for (int u = 0; u < al.U; ++u)
    for (const int ml : as.served_lues(u)) {
      double sum = 0.0;
      for (int n = 0; n < N; ++n) sum += rt.at_abs_lue(u, ml, n);
      if (!ge(sum, ra.rate_threshold_bps))
        add(out, Segment::Abs, 39, {u, ml}, ra.rate_threshold_bps - sum, "LUE demand unmet");
    }
  // (40) access power box on associated links
  for (int u = 0; u < al.U; ++u)
    for (const int ml : as.served_lues(u))
      for (int n = 0; n < N; ++n) {
        const double p = al.pw_abs_lue(u, ml, n);
        if (p < -kAbsTol)
          add(out, Segment::Abs, 40, {u, ml, n}, -p, "negative transmit power");
        else if (!le(p, ra.p_max_w))
          add(out, Segment::Abs, 40, {u, ml, n}, p - ra.p_max_w, "transmit power above p_max");
      }
  // (41) pairwise safe distance (squared distance against d_th, as printed)
  for (int n = 0; n < N; ++n)
    for (int i = 0; i < al.U; ++i)
      for (int j = i + 1; j < al.U; ++j) {
        const double dsq = distance_sq(al.pos(i, n), al.pos(j, n));
        if (!ge(dsq, ra.d_th))
          add(out, Segment::Abs, 41, {i, j, n}, ra.d_th - dsq, "ABS pair below safe distance");
      }
  // (42) access RB uniqueness
  for (int u = 0; u < al.U; ++u)
    for (int k = 0; k < as.K; ++k) {
      int cnt = 0;
      for (int ml = 0; ml < al.Ml; ++ml) cnt += as.a_abs_lue(u, k, ml);
      if (cnt > 1) add(out, Segment::Abs, 42, {u, k}, cnt - 1, "RB assigned to several LUEs");
    }
  for (int ml = 0; ml < al.Ml; ++ml) {
    int cnt = 0;
    for (int u = 0; u < al.U; ++u)
      for (int k = 0; k < as.K; ++k) cnt += as.a_abs_lue(u, k, ml);
    if (cnt > 1) add(out, Segment::Abs, 42, {-1, ml}, cnt - 1, "LUE served on several RBs");
  }
  // (43) at most one backhaul node per ABS
  for (int u = 0; u < al.U; ++u) {
    int cnt = as.sat_serves_abs(u) ? 1 : 0;
    std::vector<char> seen(al.C, 0);
    for (int c = 0; c < al.C; ++c)
      for (int y = 0; y < as.Y; ++y)
        if (as.a_cbs_abs(c, y, u) && !seen[c]) {
          seen[c] = 1;
          ++cnt;
        }
    if (cnt > 1) add(out, Segment::Abs, 43, {u}, cnt - 1, "ABS has several backhaul nodes");
  }
  // (44) satellite RB / HUE association uniqueness
  for (int z = 0; z < as.Z; ++z) {
    int cnt = 0;
    for (int mh = 0; mh < al.Mh; ++mh) cnt += as.a_sat_hue(z, mh);
    if (cnt > 1) add(out, Segment::Sat, 44, {z}, cnt - 1, "satellite RB serves several HUEs");
  }
  for (int mh = 0; mh < al.Mh; ++mh) {
    int cnt = 0;
    for (int z = 0; z < as.Z; ++z) cnt += as.a_sat_hue(z, mh);
    for (int c = 0; c < al.C; ++c)
      for (int y = 0; y < as.Y; ++y) cnt += as.a_cbs_hue(c, y, mh);
    if (cnt > 1) add(out, Segment::Sat, 44, {-1, mh}, cnt - 1, "HUE associated several times");
  }
  // (45) satellite backhaul RB uniqueness; one receiver of either kind per RB
  for (int z = 0; z < as.Z; ++z) {
    int cnt_abs = 0, cnt_hue = 0;
    for (int u = 0; u < al.U; ++u) cnt_abs += as.a_sat_abs(z, u);
    for (int mh = 0; mh < al.Mh; ++mh) cnt_hue += as.a_sat_hue(z, mh);
    if (cnt_abs > 1) add(out, Segment::Sat, 45, {z}, cnt_abs - 1, "satellite RB backhauls several ABSs");
    if (cnt_abs + cnt_hue > 1 && cnt_abs >= 1 && cnt_hue >= 1)
      add(out, Segment::Sat, 45, {z, -1}, cnt_abs + cnt_hue - 1, "satellite RB mixes HUE and ABS");
  }
  for (int u = 0; u < al.U; ++u) {
    int cnt = 0;
    for (int z = 0; z < as.Z; ++z) cnt += as.a_sat_abs(z, u);
    if (cnt > 1) add(out, Segment::Sat, 45, {-1, u}, cnt - 1, "ABS on several satellite RBs");
  }
  // (46) CBS RB uniqueness
  for (int c = 0; c < al.C; ++c)
    for (int y = 0; y < as.Y; ++y) {
      int cnt = 0;
      for (int mh = 0; mh < al.Mh; ++mh) cnt += as.a_cbs_hue(c, y, mh);
      for (int u = 0; u < al.U; ++u) cnt += as.a_cbs_abs(c, y, u);
      if (cnt > 1) add(out, Segment::Cbs, 46, {c, y}, cnt - 1, "CBS RB serves several receivers");
    }
  for (int u = 0; u < al.U; ++u) {
    int cnt = 0;
    for (int c = 0; c < al.C; ++c)
      for (int y = 0; y < as.Y; ++y) cnt += as.a_cbs_abs(c, y, u);
    if (cnt > 1) add(out, Segment::Cbs, 46, {-1, u}, cnt - 1, "ABS on several CBS RBs");
  }
  // (47) HUE demand over the horizon, per serving provider
  for (int mh = 0; mh < al.Mh; ++mh) {
    if (as.sat_serves_hue(mh)) {
      double sum = 0.0;
      for (int n = 0; n < N; ++n) sum += rt.sat_hue[mh * N + n];
      if (!ge(sum, ra.rate_threshold_bps))
        add(out, Segment::Sat, 47, {mh}, ra.rate_threshold_bps - sum, "HUE demand unmet (satellite)");
    }
    const int c = as.cbs_serving_hue(mh);
    if (c >= 0) {
      double sum = 0.0;
      for (int n = 0; n < N; ++n) sum += rt.cbs_hue[(c * al.Mh + mh) * N + n];
      if (!ge(sum, ra.rate_threshold_bps))
        add(out, Segment::Cbs, 47, {c, mh}, ra.rate_threshold_bps - sum, "HUE demand unmet (CBS)");
    }
  }
  // (48) backhaul power boxes
  for (int u = 0; u < al.U; ++u)
    if (as.sat_serves_abs(u))
      for (int n = 0; n < N; ++n) {
        const double p = al.pw_sat_abs(u, n);
        if (p < -kAbsTol)
          add(out, Segment::Sat, 48, {u, n}, -p, "negative satellite backhaul power");
        else if (!le(p, ra.p_max_w))
          add(out, Segment::Sat, 48, {u, n}, p - ra.p_max_w, "satellite backhaul power above p_max");
      }
  for (int u = 0; u < al.U; ++u) {
    const int c = as.cbs_serving_abs(u);
    if (c < 0) continue;
    for (int n = 0; n < N; ++n) {
      const double p = al.pw_cbs_abs(c, u, n);
      if (p < -kAbsTol)
        add(out, Segment::Cbs, 48, {c, u, n}, -p, "negative CBS backhaul power");
      else if (!le(p, ra.p_max_w))
        add(out, Segment::Cbs, 48, {c, u, n}, p - ra.p_max_w, "CBS backhaul power above p_max");
    }
  }
  // (49) HUE access power boxes
  for (int mh = 0; mh < al.Mh; ++mh)
    if (as.sat_serves_hue(mh))
      for (int n = 0; n < N; ++n) {
        const double p = al.pw_sat_hue(mh, n);
        if (p < -kAbsTol)
          add(out, Segment::Sat, 49, {mh, n}, -p, "negative satellite access power");
        else if (!le(p, ra.p_max_w))
          add(out, Segment::Sat, 49, {mh, n}, p - ra.p_max_w, "satellite access power above p_max");
      }
  for (int mh = 0; mh < al.Mh; ++mh) {
    const int c = as.cbs_serving_hue(mh);
    if (c < 0) continue;
    for (int n = 0; n < N; ++n) {
      const double p = al.pw_cbs_hue(c, mh, n);
      if (p < -kAbsTol)
        add(out, Segment::Cbs, 49, {c, mh, n}, -p, "negative CBS access power");
      else if (!le(p, ra.p_max_w))
        add(out, Segment::Cbs, 49, {c, mh, n}, p - ra.p_max_w, "CBS access power above p_max");
    }
  }
  return out;
}

}  // namespace

const char* segment_name(Segment s) {
  switch (s) {
    case Segment::Abs: return "abs";
    case Segment::Sat: return "sat";
    case Segment::Cbs: return "cbs";
  }
  return "?";
}

std::vector<Violation> ProblemSpec::violations(const Association& as, const Allocation& al) const {
  std::vector<Violation> out;
  for (const auto& row : evaluate_all(*channel, as, al)) {
    if (row.seg != segment) continue;
    if (std::find(constraint_ids.begin(), constraint_ids.end(), row.v.constraint_id) ==
        constraint_ids.end())
      continue;
    out.push_back(row.v);
  }
  return out;
}

ProblemSpec build_abs_problem(const Scenario& s, const ChannelModel& ch,
                              const InterferenceTable& frozen) {
  ProblemSpec spec;
  spec.segment = Segment::Abs;
  spec.scenario = &s;
  spec.channel = &ch;
  spec.constraint_ids = {31, 32, 33, 34, 35, 36, 37, 38, 39, 40, 41, 42, 43};
  spec.frozen = frozen;
  spec.worst_case = worst_case_interference(ch);
  return spec;
}

ProblemSpec build_sat_problem(const Scenario& s, const ChannelModel& ch,
                              const InterferenceTable& frozen) {
  ProblemSpec spec;
  spec.segment = Segment::Sat;
  spec.scenario = &s;
  spec.channel = &ch;
  spec.constraint_ids = {44, 45, 47, 48, 49};
  spec.frozen = frozen;
  spec.worst_case = worst_case_interference(ch);
  return spec;
}

ProblemSpec build_cbs_problem(const Scenario& s, const ChannelModel& ch,
                              const InterferenceTable& frozen) {
  ProblemSpec spec;
  spec.segment = Segment::Cbs;
  spec.scenario = &s;
  spec.channel = &ch;
  spec.constraint_ids = {46, 47, 48, 49};
  spec.frozen = frozen;
  spec.worst_case = worst_case_interference(ch);
  return spec;
}

std::vector<Violation> check_feasibility(const ProblemSpec& spec, const Association& as,
                                         const Allocation& al) {
  return spec.violations(as, al);
}

std::vector<Violation> full_violations(const ChannelModel& ch, const Association& as,
                                       const Allocation& al) {
  std::vector<Violation> out;
  for (auto& row : evaluate_all(ch, as, al)) out.push_back(std::move(row.v));
  return out;
}

std::string violations_csv(const std::vector<Violation>& v) {
  std::ostringstream out;
  out << "constraint_id,indices,slack\n";
  char buf[40];
  for (const auto& viol : v) {
    out << viol.constraint_id << ",";
    for (size_t i = 0; i < viol.indices.size(); ++i) {
      if (i) out << ";";
      out << viol.indices[i];
    }
    std::snprintf(buf, sizeof(buf), "%.9e", viol.slack);
    out << "," << buf << "\n";
  }
  return out.str();
}

}  // namespace sasnet
