#pragma once

#include <cstdint>
#include <vector>

#include "sasnet/channel.hpp"
#include "sasnet/energy.hpp"
#include "sasnet/geometry.hpp"
#include "sasnet/scenario.hpp"

namespace sasnet {

enum class BackhaulKind { None, Sat, Cbs };

struct Backhaul {
  BackhaulKind kind = BackhaulKind::None;
  int cbs = -1;
};

/// Binary assignment tensors. Resource-block indices are materialized
/// canonically (receivers take RBs in ascending index order), so uniqueness
/// over RBs holds by construction when built through the service-set helpers.
struct Association {
  int U = 0, K = 0, Ml = 0, Z = 0, C = 0, Y = 0, Mh = 0;
  std::vector<std::uint8_t> abs_lue;  // [U][K][Ml]
  std::vector<std::uint8_t> sat_hue;  // [Z][Mh]
  std::vector<std::uint8_t> sat_abs;  // [Z][U]
  std::vector<std::uint8_t> cbs_hue;  // [C][Y][Mh]
  std::vector<std::uint8_t> cbs_abs;  // [C][Y][U]

  static Association empty(const Scenario& s);

  std::uint8_t& a_abs_lue(int u, int k, int ml) { return abs_lue[(u * K + k) * Ml + ml]; }
  std::uint8_t a_abs_lue(int u, int k, int ml) const { return abs_lue[(u * K + k) * Ml + ml]; }
  std::uint8_t& a_sat_hue(int z, int mh) { return sat_hue[z * Mh + mh]; }
  std::uint8_t a_sat_hue(int z, int mh) const { return sat_hue[z * Mh + mh]; }
  std::uint8_t& a_sat_abs(int z, int u) { return sat_abs[z * U + u]; }
  std::uint8_t a_sat_abs(int z, int u) const { return sat_abs[z * U + u]; }
  std::uint8_t& a_cbs_hue(int c, int y, int mh) { return cbs_hue[(c * Y + y) * Mh + mh]; }
  std::uint8_t a_cbs_hue(int c, int y, int mh) const { return cbs_hue[(c * Y + y) * Mh + mh]; }
  std::uint8_t& a_cbs_abs(int c, int y, int u) { return cbs_abs[(c * Y + y) * U + u]; }
  std::uint8_t a_cbs_abs(int c, int y, int u) const { return cbs_abs[(c * Y + y) * U + u]; }

  // Service-set views (independent of RB materialization).
  std::vector<int> served_lues(int u) const;      // sorted LUE indices served by ABS u
  int lue_server(int ml) const;                   // serving ABS or -1
  bool sat_serves_hue(int mh) const;
  bool sat_serves_abs(int u) const;
  int cbs_serving_hue(int mh) const;              // serving CBS or -1
  int cbs_serving_abs(int u) const;
  Backhaul backhaul(int u) const;

  // Canonical RB materialization from service sets.
  void set_abs_service(int u, const std::vector<int>& lues);
  void set_sat_service(const std::vector<int>& abss, const std::vector<int>& hues);
  void set_cbs_service(int c, const std::vector<int>& abss, const std::vector<int>& hues);

  bool operator==(const Association&) const = default;
};

/// Continuous decision state: per-link transmit powers, per-slot ABS
/// deployment and path speeds. Powers of unassigned links stay zero.
struct Allocation {
  int U = 0, Ml = 0, Mh = 0, C = 0, N = 0;
  std::vector<double> p_abs_lue;  // [U][Ml][N]
  std::vector<double> p_sat_abs;  // [U][N]
  std::vector<double> p_sat_hue;  // [Mh][N]
  std::vector<double> p_cbs_abs;  // [C][U][N]
  std::vector<double> p_cbs_hue;  // [C][Mh][N]
  std::vector<Position3D> deploy;  // [U][N]
  std::vector<double> speed;       // [U][N] path speed (m/s)

  /// Zero powers, initial deployment, cruise-optimal speeds.
  static Allocation initial(const Scenario& s);

  double& pw_abs_lue(int u, int ml, int n) { return p_abs_lue[(u * Ml + ml) * N + n]; }
  double pw_abs_lue(int u, int ml, int n) const { return p_abs_lue[(u * Ml + ml) * N + n]; }
  double& pw_sat_abs(int u, int n) { return p_sat_abs[u * N + n]; }
  double pw_sat_abs(int u, int n) const { return p_sat_abs[u * N + n]; }
  double& pw_sat_hue(int mh, int n) { return p_sat_hue[mh * N + n]; }
  double pw_sat_hue(int mh, int n) const { return p_sat_hue[mh * N + n]; }
  double& pw_cbs_abs(int c, int u, int n) { return p_cbs_abs[(c * U + u) * N + n]; }
  double pw_cbs_abs(int c, int u, int n) const { return p_cbs_abs[(c * U + u) * N + n]; }
  double& pw_cbs_hue(int c, int mh, int n) { return p_cbs_hue[(c * Mh + mh) * N + n]; }
  double pw_cbs_hue(int c, int mh, int n) const { return p_cbs_hue[(c * Mh + mh) * N + n]; }
  Position3D& pos(int u, int n) { return deploy[u * N + n]; }
  const Position3D& pos(int u, int n) const { return deploy[u * N + n]; }
  double& spd(int u, int n) { return speed[u * N + n]; }
  double spd(int u, int n) const { return speed[u * N + n]; }

  // Total transmit power of one transmitter at one slot.
  double abs_tx_power(int u, int n) const;
  double sat_tx_power(int n) const;
  double cbs_tx_power(int c, int n) const;

  /// Speeds covering the legs of the deployment at the cruise-optimal level.
  void derive_speeds(const Scenario& s);
};

/// Class-specific interference sums at a receiver (transmitter totals).
double interference_abs_lue(const ChannelModel& ch, const Allocation& al, int u, int ml, int n);
double interference_sat_abs(const ChannelModel& ch, const Allocation& al, int u, int n);
double interference_cbs_abs(const ChannelModel& ch, const Allocation& al, int c, int u, int n);
double interference_sat_hue(const ChannelModel& ch, const Allocation& al, int mh, int n);
double interference_cbs_hue(const ChannelModel& ch, const Allocation& al, int c, int mh, int n);

/// Generic entry point keyed by link class; rx/aux identify the receiver
/// (aux = serving node index where the class needs one).
double interference(const ChannelModel& ch, LinkClass cls, int rx, int aux, const Allocation& al, int n);

/// Frozen per-receiver interference tables used inside the optimizers. The
/// cold-start table charges every interferer its full p_max; refresh() uses
/// the transmitter totals of a previous allocation.
struct InterferenceTable {
  int U = 0, Ml = 0, Mh = 0, C = 0, N = 0;
  std::vector<double> abs_lue;  // [U][Ml][N] seen by LUE ml when served by u
  std::vector<double> sat_abs;  // [U][N]
  std::vector<double> cbs_abs;  // [C][U][N]
  std::vector<double> sat_hue;  // [Mh][N]
  std::vector<double> cbs_hue;  // [C][Mh][N]

  double at_abs_lue(int u, int ml, int n) const { return abs_lue[(u * Ml + ml) * N + n]; }
  double at_sat_abs(int u, int n) const { return sat_abs[u * N + n]; }
  double at_cbs_abs(int c, int u, int n) const { return cbs_abs[(c * U + u) * N + n]; }
  double at_sat_hue(int mh, int n) const { return sat_hue[mh * N + n]; }
  double at_cbs_hue(int c, int mh, int n) const { return cbs_hue[(c * Mh + mh) * N + n]; }
};

/// Cold start: every transmitter radiates p_max toward every receiver.
InterferenceTable cold_interference(const ChannelModel& ch);
/// Worst case: every transmitter radiates p_max on each of its RBs.
InterferenceTable worst_case_interference(const ChannelModel& ch);
/// Refreeze at the transmitter totals of `al` (deployment from `al`).
InterferenceTable refreeze_interference(const ChannelModel& ch, const Allocation& al);

/// Achieved per-link rates under the actual interference of `al`.
struct RateTable {
  int U = 0, Ml = 0, Mh = 0, C = 0, N = 0;
  std::vector<double> abs_lue;  // [U][Ml][N], zero when unassigned
  std::vector<double> sat_abs;  // [U][N]
  std::vector<double> sat_hue;  // [Mh][N]
  std::vector<double> cbs_abs;  // [C][U][N]
  std::vector<double> cbs_hue;  // [C][Mh][N]

  double at_abs_lue(int u, int ml, int n) const { return abs_lue[(u * Ml + ml) * N + n]; }
};

RateTable achieved_rates(const ChannelModel& ch, const Association& as, const Allocation& al);

/// Per-slot flight states/energies of one ABS derived from the allocation.
std::vector<FlightState> flight_states(const Scenario& s, const Allocation& al, int u);
double flight_power_at(const Scenario& s, const Allocation& al, int u, int n);

/// Full achieved energy-efficiency accounting of a network state.
EEReport evaluate_ee(const ChannelModel& ch, const Association& as, const Allocation& al);

}  // namespace sasnet
