#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sasnet/geometry.hpp"

namespace sasnet {

/// Time discretization of the flight horizon. slot_len * slot_count == horizon
/// exactly (the generator derives slot_len by division).
struct TimeGrid {
  double horizon_s = 240.0;
  int slot_count = 4;
  double slot_len_s = 60.0;
};

/// Log-distance path loss parameters of one mmW link class.
struct MmwParams {
  double omega_db = 46.4;   // intercept at the reference distance
  double zeta = 2.0;        // path loss exponent
  double delta_db = 0.1;    // shadowing std-dev
  double rician_k = 10.0;
};

struct RadioParams {
  double carrier_hz = 30e9;
  double bandwidth_sat_hz = 10e6;
  double bandwidth_cbs_hz = 10e6;
  double bandwidth_abs_hz = 10e3;
  double noise_dbm_per_hz = -174.0;
  double p_max_w = 2.0;  // ~33 dBm

  double antenna_gain_tx_dbi = 25.0;
  double antenna_gain_rx_dbi = 25.0;
  bool apply_antenna_gains = false;

  double d0_m = 1.0;
  double xi0 = 1e-6;  // reference channel gain of the UAV access link at 1 m
  // Small-scale mean power applied multiplicatively to the channel power gain.
  double smallscale_scale_abs_lue = 1.53;
  double smallscale_scale_mmw = 1.0;

  MmwParams sat_abs;
  MmwParams cbs_abs;
  MmwParams sat_hue;
  double rician_k_abs_lue = 10.0;
  double rician_k_cbs_hue = 10.0;

  int k_rb = 2;  // resource blocks per ABS
  int z_rb = 4;  // resource blocks of the satellite
  int y_rb = 4;  // resource blocks per CBS

  double circuit_sat_w = 10.0;
  double circuit_cbs_w = 10.0;
  double rate_threshold_bps = 100e3;
  // Compared against the squared pairwise ABS distance, as the safe-distance
  // constraint is printed.
  double d_th = 500.0;

  double cbs_height_m = 20.0;
  double hue_height_m = 5.0;
  double ce2r_floor_gain = 1e-30;
  bool fold_interference_into_noise = false;
};

struct EnergyParams {
  double kappa = 9.26e-4;  // parasite drag coefficient, J s^3/m^3
  double zeta = 2250.0;    // induced drag coefficient, J m/s
  double gravity = 9.8;
  double payload_mass_kg = 5.0;
  double lambda_step_s = 1.0;
  double e_th_j = 0.0;  // <=0: auto, 90% of the cruise-optimal per-slot value
  double v_min_mps = 3.0;
  double v_max_mps = 50.0;
  double h_min_m = 10.0;
  double h_max_m = 300.0;
  // Flight power per the printed product form (energy times slot length)
  // instead of the dimensionally consistent division.
  bool literal_flight_power = false;
  // Flip the >= direction of the flight energy/power constraints into budget
  // (<=) form.
  bool invert_energy_constraints = false;
};

struct ScenarioConfig {
  int abs_count = 2;
  int cbs_count = 1;
  int lue_count = 8;
  int hue_count = 4;

  double region_size_m = 20e3;
  double lue_area_m = 2e3;
  double lue_offset_x_m = 500.0;
  double lue_offset_y_m = 9e3;
  double sat_altitude_m = 200e3;
  double abs_altitude_m = 30.0;
  double cbs_radius_m = 10e3;
  double hue_drift_speed_mps = 8.0;

  TimeGrid time;
  RadioParams radio;
  EnergyParams energy;
};

/// Immutable network snapshot: node positions, counts, time grid, parameters.
/// Safe to share read-only across concurrent workers.
struct Scenario {
  ScenarioConfig config;
  std::uint64_t seed = 0;

  Position3D satellite;
  std::vector<Position3D> cbs;
  std::vector<Position3D> abs_initial;
  std::vector<Position3D> lue;                // static within the horizon
  std::vector<std::vector<Position3D>> hue;   // [hue][slot]

  int abs_count() const { return static_cast<int>(abs_initial.size()); }
  int cbs_count() const { return static_cast<int>(cbs.size()); }
  int lue_count() const { return static_cast<int>(lue.size()); }
  int hue_count() const { return static_cast<int>(hue.size()); }
  int slot_count() const { return config.time.slot_count; }

  const TimeGrid& time() const { return config.time; }
  const RadioParams& radio() const { return config.radio; }
  const EnergyParams& energy() const { return config.energy; }

  Position3D lue_pos(int ml, int /*slot*/) const { return lue[ml]; }
  Position3D hue_pos(int mh, int slot) const { return hue[mh][slot]; }
};

struct ValidationReport {
  std::vector<std::string> issues;
  bool ok() const { return issues.empty(); }
};

/// Deterministic scenario generation; a fixed (config, seed) pair always
/// produces a bitwise-identical scenario. Throws std::invalid_argument naming
/// every offending config key when the config violates a type invariant.
Scenario generate_scenario(const ScenarioConfig& config, std::uint64_t seed);

/// Checks every type invariant and reports each violation with node index.
ValidationReport validate_scenario(const Scenario& s);

/// Noise power in watts over `bandwidth_hz` from the configured density.
double noise_power(const RadioParams& radio, double bandwidth_hz);

/// Line-oriented text round trip for reproducibility.
std::string dump_scenario(const Scenario& s);
Scenario load_scenario(const std::string& text);

/// FNV-1a hash of the scenario dump, as a fixed-width hex string.
std::string scenario_hash(const Scenario& s);

/// Effective E_th: the configured value, or 90% of the cruise-optimal
/// per-slot flight energy when unset.
double effective_energy_threshold(const Scenario& s);

/// Cruise speed minimizing kappa*v^3 + zeta/v, clamped to the speed box.
double optimal_cruise_speed(const EnergyParams& e);

}  // namespace sasnet
