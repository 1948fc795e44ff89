#pragma once

#include "sasnet/scenario.hpp"

namespace sasnet {

/// Kinematic state of one ABS over one slot (fixed-wing model).
struct FlightState {
  double speed_mps = 0.0;
  double accel_mps2 = 0.0;
  double kinetic_delta_j = 0.0;
};

/// Per-segment energy-efficiency accounting. Rates in bit/s, powers in W,
/// EE in bit/J.
struct EEReport {
  double rate_abs = 0.0, power_abs = 0.0;
  double rate_sat = 0.0, power_sat = 0.0;
  double rate_cbs = 0.0, power_cbs = 0.0;
  double eta_abs = 0.0, eta_sat = 0.0, eta_cbs = 0.0;
  double eta_total = 0.0;
};

/// Propulsion energy over one slot: kappa*v^3 + zeta/v + zeta*mu^2/(q^2 v)
/// plus the kinetic term. Throws std::domain_error for v <= 0 (a fixed wing
/// cannot hover).
double flight_energy(const FlightState& state, const EnergyParams& p);

/// Average flight power of a slot. The literal_flight_power flag switches to
/// the printed product form.
double flight_power(double energy_j, double slot_len_s, bool literal_form = false);

/// Ratio-of-sums segment EE. Throws std::domain_error for P_total <= 0.
double segment_ee(double rate_total_bps, double power_total_w);

double total_ee(const EEReport& report);

/// Fills the eta fields from the rate/power sums already in the report.
void finalize_ee(EEReport& report);

}  // namespace sasnet
