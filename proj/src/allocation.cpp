#include "sasnet/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sasnet {

Association Association::empty(const Scenario& s) {
  Association a;
  a.U = s.abs_count();
  a.K = s.radio().k_rb;
  a.Ml = s.lue_count();
  a.Z = s.radio().z_rb;
  a.C = s.cbs_count();
  a.Y = s.radio().y_rb;
  a.Mh = s.hue_count();
  a.abs_lue.assign(size_t(a.U) * a.K * a.Ml, 0);
  a.sat_hue.assign(size_t(a.Z) * a.Mh, 0);
  a.sat_abs.assign(size_t(a.Z) * a.U, 0);
  a.cbs_hue.assign(size_t(a.C) * a.Y * a.Mh, 0);
  a.cbs_abs.assign(size_t(a.C) * a.Y * a.U, 0);
  return a;
}

std::vector<int> Association::served_lues(int u) const {
  std::vector<int> out;
  for (int ml = 0; ml < Ml; ++ml)
    for (int k = 0; k < K; ++k)
      if (a_abs_lue(u, k, ml)) {
        out.push_back(ml);
        break;
      }
  return out;
}

int Association::lue_server(int ml) const {
  for (int u = 0; u < U; ++u)
    for (int k = 0; k < K; ++k)
      if (a_abs_lue(u, k, ml)) return u;
  return -1;
}

bool Association::sat_serves_hue(int mh) const {
  for (int z = 0; z < Z; ++z)
    if (a_sat_hue(z, mh)) return true;
  return false;
}

bool Association::sat_serves_abs(int u) const {
  for (int z = 0; z < Z; ++z)
    if (a_sat_abs(z, u)) return true;
  return false;
}

int Association::cbs_serving_hue(int mh) const {
  for (int c = 0; c < C; ++c)
    for (int y = 0; y < Y; ++y)
      if (a_cbs_hue(c, y, mh)) return c;
  return -1;
}

int Association::cbs_serving_abs(int u) const {
  for (int c = 0; c < C; ++c)
    for (int y = 0; y < Y; ++y)
      if (a_cbs_abs(c, y, u)) return c;
  return -1;
}

Backhaul Association::backhaul(int u) const {
  if (sat_serves_abs(u)) return {BackhaulKind::Sat, -1};
  const int c = cbs_serving_abs(u);
  if (c >= 0) return {BackhaulKind::Cbs, c};
  return {BackhaulKind::None, -1};
}

void Association::set_abs_service(int u, const std::vector<int>& lues) {
  if (static_cast<int>(lues.size()) > K)
    throw std::invalid_argument("set_abs_service: more LUEs than resource blocks");
  for (int k = 0; k < K; ++k)
    for (int ml = 0; ml < Ml; ++ml) a_abs_lue(u, k, ml) = 0;
  std::vector<int> sorted = lues;
  std::sort(sorted.begin(), sorted.end());
  for (size_t i = 0; i < sorted.size(); ++i) a_abs_lue(u, static_cast<int>(i), sorted[i]) = 1;
}

void Association::set_sat_service(const std::vector<int>& abss, const std::vector<int>& hues) {
  if (static_cast<int>(abss.size() + hues.size()) > Z)
    throw std::invalid_argument("set_sat_service: more receivers than resource blocks");
  std::fill(sat_hue.begin(), sat_hue.end(), 0);
  std::fill(sat_abs.begin(), sat_abs.end(), 0);
  int z = 0;
  std::vector<int> a = abss, h = hues;
  std::sort(a.begin(), a.end());
  std::sort(h.begin(), h.end());
  for (const int u : a) a_sat_abs(z++, u) = 1;
  for (const int mh : h) a_sat_hue(z++, mh) = 1;
}

void Association::set_cbs_service(int c, const std::vector<int>& abss, const std::vector<int>& hues) {
  if (static_cast<int>(abss.size() + hues.size()) > Y)
    throw std::invalid_argument("set_cbs_service: more receivers than resource blocks");
  for (int y = 0; y < Y; ++y) {
    for (int mh = 0; mh < Mh; ++mh) a_cbs_hue(c, y, mh) = 0;
    for (int u = 0; u < U; ++u) a_cbs_abs(c, y, u) = 0;
  }
  int y = 0;
  std::vector<int> a = abss, h = hues;
  std::sort(a.begin(), a.end());
  std::sort(h.begin(), h.end());
  for (const int u : a) a_cbs_abs(c, y++, u) = 1;
  for (const int mh : h) a_cbs_hue(c, y++, mh) = 1;
}

Allocation Allocation::initial(const Scenario& s) {
  Allocation al;
  al.U = s.abs_count();
  al.Ml = s.lue_count();
  al.Mh = s.hue_count();
  al.C = s.cbs_count();
  al.N = s.slot_count();
  al.p_abs_lue.assign(size_t(al.U) * al.Ml * al.N, 0.0);
  al.p_sat_abs.assign(size_t(al.U) * al.N, 0.0);
  al.p_sat_hue.assign(size_t(al.Mh) * al.N, 0.0);
  al.p_cbs_abs.assign(size_t(al.C) * al.U * al.N, 0.0);
  al.p_cbs_hue.assign(size_t(al.C) * al.Mh * al.N, 0.0);
  al.deploy.resize(size_t(al.U) * al.N);
  for (int u = 0; u < al.U; ++u)
    for (int n = 0; n < al.N; ++n) al.pos(u, n) = s.abs_initial[u];
  al.speed.assign(size_t(al.U) * al.N, optimal_cruise_speed(s.energy()));
  return al;
}

double Allocation::abs_tx_power(int u, int n) const {
  double sum = 0.0;
  for (int ml = 0; ml < Ml; ++ml) sum += pw_abs_lue(u, ml, n);
  return sum;
}

double Allocation::sat_tx_power(int n) const {
  double sum = 0.0;
  for (int u = 0; u < U; ++u) sum += pw_sat_abs(u, n);
  for (int mh = 0; mh < Mh; ++mh) sum += pw_sat_hue(mh, n);
  return sum;
}

double Allocation::cbs_tx_power(int c, int n) const {
  double sum = 0.0;
  for (int u = 0; u < U; ++u) sum += pw_cbs_abs(c, u, n);
  for (int mh = 0; mh < Mh; ++mh) sum += pw_cbs_hue(c, mh, n);
  return sum;
}

void Allocation::derive_speeds(const Scenario& s) {
  const double L = s.time().slot_len_s;
  const EnergyParams& e = s.energy();
  const double cruise = optimal_cruise_speed(e);
  for (int u = 0; u < U; ++u) {
    for (int n = 0; n < N; ++n) {
      double need = 0.0;
      if (n < N - 1) need = distance(pos(u, n), pos(u, n + 1)) / L;
      spd(u, n) = std::clamp(std::max(cruise, need), e.v_min_mps, e.v_max_mps);
    }
  }
}

double interference_abs_lue(const ChannelModel& ch, const Allocation& al, int u, int ml, int n) {
  const Scenario& s = ch.scenario();
  double sum = 0.0;
  for (int v = 0; v < s.abs_count(); ++v) {
    if (v == u) continue;
    sum += al.abs_tx_power(v, n) * ch.gain_abs_at(al.pos(v, n), s.lue_pos(ml, n));
  }
  for (int c = 0; c < s.cbs_count(); ++c) {
    sum += al.cbs_tx_power(c, n) * ch.gain_cbs_lue(c, ml, n);
  }
  return sum;
}

double interference_sat_abs(const ChannelModel& ch, const Allocation& al, int u, int n) {
  const Scenario& s = ch.scenario();
  double sum = 0.0;
  for (int c = 0; c < s.cbs_count(); ++c) sum += al.cbs_tx_power(c, n) * ch.gain_cbs_abs(c, u, n);
  return sum;
}

double interference_cbs_abs(const ChannelModel& ch, const Allocation& al, int c, int u, int n) {
  const Scenario& s = ch.scenario();
  double sum = 0.0;
  for (int cc = 0; cc < s.cbs_count(); ++cc) {
    if (cc == c) continue;
    sum += al.cbs_tx_power(cc, n) * ch.gain_cbs_abs(cc, u, n);
  }
  return sum;
}

double interference_sat_hue(const ChannelModel& ch, const Allocation& al, int mh, int n) {
  const Scenario& s = ch.scenario();
  double sum = 0.0;
  for (int u = 0; u < s.abs_count(); ++u)
    sum += al.abs_tx_power(u, n) * ch.gain_abs_at(al.pos(u, n), s.hue_pos(mh, n));
  for (int c = 0; c < s.cbs_count(); ++c) sum += al.cbs_tx_power(c, n) * ch.gain_cbs_hue(c, mh, n);
  return sum;
}

double interference_cbs_hue(const ChannelModel& ch, const Allocation& al, int c, int mh, int n) {
  const Scenario& s = ch.scenario();
  double sum = 0.0;
  for (int u = 0; u < s.abs_count(); ++u)
    sum += al.abs_tx_power(u, n) * ch.gain_abs_at(al.pos(u, n), s.hue_pos(mh, n));
  for (int cc = 0; cc < s.cbs_count(); ++cc) {
    if (cc == c) continue;
    sum += al.cbs_tx_power(cc, n) * ch.gain_cbs_hue(cc, mh, n);
  }
  return sum;
}

double interference(const ChannelModel& ch, LinkClass cls, int rx, int aux, const Allocation& al,
                    int n) {
  switch (cls) {
    case LinkClass::AbsToLue: return interference_abs_lue(ch, al, aux, rx, n);
    case LinkClass::SatToAbs: return interference_sat_abs(ch, al, rx, n);
    case LinkClass::CbsToAbs: return interference_cbs_abs(ch, al, aux, rx, n);
    case LinkClass::SatToHue: return interference_sat_hue(ch, al, rx, n);
    case LinkClass::CbsToHue: return interference_cbs_hue(ch, al, aux, rx, n);
  }
  return 0.0;
}

namespace {

InterferenceTable make_table(const ChannelModel& ch) {
  const Scenario& s = ch.scenario();
  InterferenceTable t;
  t.U = s.abs_count();
  t.Ml = s.lue_count();
  t.Mh = s.hue_count();
  t.C = s.cbs_count();
  t.N = s.slot_count();
  t.abs_lue.assign(size_t(t.U) * t.Ml * t.N, 0.0);
  t.sat_abs.assign(size_t(t.U) * t.N, 0.0);
  t.cbs_abs.assign(size_t(t.C) * t.U * t.N, 0.0);
  t.sat_hue.assign(size_t(t.Mh) * t.N, 0.0);
  t.cbs_hue.assign(size_t(t.C) * t.Mh * t.N, 0.0);
  return t;
}

// Builds the table from a reference allocation whose powers define the
// interferer totals.
InterferenceTable freeze_from(const ChannelModel& ch, const Allocation& ref) {
  const Scenario& s = ch.scenario();
  InterferenceTable t = make_table(ch);
  for (int n = 0; n < t.N; ++n) {
    for (int u = 0; u < t.U; ++u)
      for (int ml = 0; ml < t.Ml; ++ml)
        t.abs_lue[(u * t.Ml + ml) * t.N + n] = interference_abs_lue(ch, ref, u, ml, n);
    for (int u = 0; u < t.U; ++u) t.sat_abs[u * t.N + n] = interference_sat_abs(ch, ref, u, n);
    for (int c = 0; c < t.C; ++c)
      for (int u = 0; u < t.U; ++u)
        t.cbs_abs[(c * t.U + u) * t.N + n] = interference_cbs_abs(ch, ref, c, u, n);
    for (int mh = 0; mh < t.Mh; ++mh) t.sat_hue[mh * t.N + n] = interference_sat_hue(ch, ref, mh, n);
    for (int c = 0; c < t.C; ++c)
      for (int mh = 0; mh < t.Mh; ++mh)
        t.cbs_hue[(c * t.Mh + mh) * t.N + n] = interference_cbs_hue(ch, ref, c, mh, n);
  }
  (void)s;
  return t;
}

// Reference allocation radiating `abs_w` per ABS, `sat_w` from the satellite
// and `cbs_w` per CBS (split across one entry; totals are what matter).
Allocation uniform_tx(const ChannelModel& ch, double abs_w, double sat_w, double cbs_w) {
  const Scenario& s = ch.scenario();
  Allocation al = Allocation::initial(s);
  for (int n = 0; n < al.N; ++n) {
    for (int u = 0; u < al.U; ++u)
      if (al.Ml > 0) al.pw_abs_lue(u, 0, n) = abs_w;
    if (al.U > 0)
      al.pw_sat_abs(0, n) = sat_w;
    else if (al.Mh > 0)
      al.pw_sat_hue(0, n) = sat_w;
    for (int c = 0; c < al.C; ++c)
      if (al.U > 0)
        al.pw_cbs_abs(c, 0, n) = cbs_w;
      else if (al.Mh > 0)
        al.pw_cbs_hue(c, 0, n) = cbs_w;
  }
  return al;
}

}  // namespace

InterferenceTable cold_interference(const ChannelModel& ch) {
  const double p = ch.scenario().radio().p_max_w;
  return freeze_from(ch, uniform_tx(ch, p, p, p));
}

InterferenceTable worst_case_interference(const ChannelModel& ch) {
  const RadioParams& r = ch.scenario().radio();
  return freeze_from(ch, uniform_tx(ch, r.p_max_w * r.k_rb, r.p_max_w * r.z_rb, r.p_max_w * r.y_rb));
}

InterferenceTable refreeze_interference(const ChannelModel& ch, const Allocation& al) {
  return freeze_from(ch, al);
}

RateTable achieved_rates(const ChannelModel& ch, const Association& as, const Allocation& al) {
  const Scenario& s = ch.scenario();
  RateTable rt;
  rt.U = al.U;
  rt.Ml = al.Ml;
  rt.Mh = al.Mh;
  rt.C = al.C;
  rt.N = al.N;
  rt.abs_lue.assign(al.p_abs_lue.size(), 0.0);
  rt.sat_abs.assign(al.p_sat_abs.size(), 0.0);
  rt.sat_hue.assign(al.p_sat_hue.size(), 0.0);
  rt.cbs_abs.assign(al.p_cbs_abs.size(), 0.0);
  rt.cbs_hue.assign(al.p_cbs_hue.size(), 0.0);

  const double sig_abs = ch.noise_w(LinkClass::AbsToLue);
  const double sig_sat = ch.noise_w(LinkClass::SatToAbs);
  const double sig_cbs = ch.noise_w(LinkClass::CbsToAbs);

  for (int n = 0; n < al.N; ++n) {
    for (int u = 0; u < al.U; ++u) {
      for (const int ml : as.served_lues(u)) {
        const double p = al.pw_abs_lue(u, ml, n);
        const double g = ch.gain_abs_at(al.pos(u, n), s.lue_pos(ml, n));
        const double om = interference_abs_lue(ch, al, u, ml, n);
        rt.abs_lue[(u * al.Ml + ml) * al.N + n] =
            shannon_rate(ch.bandwidth(LinkClass::AbsToLue), sinr(p, g, om, sig_abs));
      }
      if (as.sat_serves_abs(u)) {
        const double p = al.pw_sat_abs(u, n);
        const double om = interference_sat_abs(ch, al, u, n);
        rt.sat_abs[u * al.N + n] =
            shannon_rate(ch.bandwidth(LinkClass::SatToAbs), sinr(p, ch.gain_sat_abs(u, n), om, sig_sat));
      }
      const int c = as.cbs_serving_abs(u);
      if (c >= 0) {
        const double p = al.pw_cbs_abs(c, u, n);
        const double om = interference_cbs_abs(ch, al, c, u, n);
        rt.cbs_abs[(c * al.U + u) * al.N + n] =
            shannon_rate(ch.bandwidth(LinkClass::CbsToAbs), sinr(p, ch.gain_cbs_abs(c, u, n), om, sig_cbs));
      }
    }
    for (int mh = 0; mh < al.Mh; ++mh) {
      if (as.sat_serves_hue(mh)) {
        const double p = al.pw_sat_hue(mh, n);
        const double om = interference_sat_hue(ch, al, mh, n);
        rt.sat_hue[mh * al.N + n] =
            shannon_rate(ch.bandwidth(LinkClass::SatToHue), sinr(p, ch.gain_sat_hue(mh, n), om, sig_sat));
      }
      const int c = as.cbs_serving_hue(mh);
      if (c >= 0) {
        const double p = al.pw_cbs_hue(c, mh, n);
        const double om = interference_cbs_hue(ch, al, c, mh, n);
        rt.cbs_hue[(c * al.Mh + mh) * al.N + n] =
            shannon_rate(ch.bandwidth(LinkClass::CbsToHue), sinr(p, ch.gain_cbs_hue(c, mh, n), om, sig_cbs));
      }
    }
  }
  return rt;
}

std::vector<FlightState> flight_states(const Scenario& s, const Allocation& al, int u) {
  const double L = s.time().slot_len_s;
  const double mass = s.energy().payload_mass_kg;
  std::vector<FlightState> out(al.N);
  for (int n = 0; n < al.N; ++n) {
    FlightState f;
    f.speed_mps = al.spd(u, n);
    if (n < al.N - 1) {
      f.accel_mps2 = (al.spd(u, n + 1) - al.spd(u, n)) / L;
      f.kinetic_delta_j =
          0.5 * mass * (al.spd(u, n + 1) * al.spd(u, n + 1) - al.spd(u, n) * al.spd(u, n));
    }
    out[n] = f;
  }
  return out;
}

double flight_power_at(const Scenario& s, const Allocation& al, int u, int n) {
  const std::vector<FlightState> fs = flight_states(s, al, u);
  const double e = flight_energy(fs[n], s.energy());
  return flight_power(e, s.time().slot_len_s, s.energy().literal_flight_power);
}

EEReport evaluate_ee(const ChannelModel& ch, const Association& as, const Allocation& al) {
  const Scenario& s = ch.scenario();
  const RateTable rt = achieved_rates(ch, as, al);
  EEReport rep;
  for (int n = 0; n < al.N; ++n) {
    for (int u = 0; u < al.U; ++u) {
      for (const int ml : as.served_lues(u)) {
        rep.rate_abs += rt.at_abs_lue(u, ml, n);
        rep.power_abs += al.pw_abs_lue(u, ml, n);
      }
      rep.power_abs += flight_power_at(s, al, u, n);
      if (as.sat_serves_abs(u)) {
        rep.rate_sat += rt.sat_abs[u * al.N + n];
        rep.power_sat += al.pw_sat_abs(u, n);
      }
      const int c = as.cbs_serving_abs(u);
      if (c >= 0) {
        rep.rate_cbs += rt.cbs_abs[(c * al.U + u) * al.N + n];
        rep.power_cbs += al.pw_cbs_abs(c, u, n);
      }
    }
    for (int mh = 0; mh < al.Mh; ++mh) {
      if (as.sat_serves_hue(mh)) {
        rep.rate_sat += rt.sat_hue[mh * al.N + n];
        rep.power_sat += al.pw_sat_hue(mh, n);
      }
      const int c = as.cbs_serving_hue(mh);
      if (c >= 0) {
        rep.rate_cbs += rt.cbs_hue[(c * al.Mh + mh) * al.N + n];
        rep.power_cbs += al.pw_cbs_hue(c, mh, n);
      }
    }
    rep.power_sat += s.radio().circuit_sat_w;
    rep.power_cbs += s.radio().circuit_cbs_w * al.C;
  }
  finalize_ee(rep);
  return rep;
}

}  // namespace sasnet
