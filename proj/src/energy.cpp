#include "sasnet/energy.hpp"

#include <stdexcept>

namespace sasnet {

double flight_energy(const FlightState& state, const EnergyParams& p) {
  const double v = state.speed_mps;
  if (v <= 0.0) throw std::domain_error("flight_energy: speed must be positive (fixed-wing model)");
  const double mu = state.accel_mps2;
  return p.kappa * v * v * v + p.zeta / v + p.zeta * mu * mu / (p.gravity * p.gravity * v) +
         state.kinetic_delta_j / p.lambda_step_s;
}

double flight_power(double energy_j, double slot_len_s, bool literal_form) {
  if (slot_len_s <= 0.0) throw std::domain_error("flight_power: slot length must be positive");
  return literal_form ? energy_j * slot_len_s : energy_j / slot_len_s;
}

double segment_ee(double rate_total_bps, double power_total_w) {
  if (power_total_w <= 0.0) throw std::domain_error("segment_ee: total power must be positive");
  return rate_total_bps / power_total_w;
}

double total_ee(const EEReport& report) {
  return report.eta_abs + report.eta_sat + report.eta_cbs;
}

void finalize_ee(EEReport& report) {
  report.eta_abs = report.power_abs > 0.0 ? report.rate_abs / report.power_abs : 0.0;
  report.eta_sat = report.power_sat > 0.0 ? report.rate_sat / report.power_sat : 0.0;
  report.eta_cbs = report.power_cbs > 0.0 ? report.rate_cbs / report.power_cbs : 0.0;
  report.eta_total = total_ee(report);
}

}  // namespace sasnet
