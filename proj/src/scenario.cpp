#include "sasnet/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "sasnet/rng.hpp"

namespace sasnet {

namespace {

void append_issue(std::vector<std::string>& out, const std::string& msg) {
  out.push_back(msg);
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// HUE commerce route: piecewise-linear polyline across the region. Only the
// tangent directions matter for the drift model.
std::vector<Position3D> route_waypoints(double region) {
  return {
      {0.10 * region, 0.10 * region, 0.0}, {0.30 * region, 0.50 * region, 0.0},
      {0.50 * region, 0.30 * region, 0.0}, {0.70 * region, 0.70 * region, 0.0},
      {0.90 * region, 0.90 * region, 0.0},
  };
}

}  // namespace

double optimal_cruise_speed(const EnergyParams& e) {
  const double v = std::pow(e.zeta / (3.0 * e.kappa), 0.25);
  return std::clamp(v, e.v_min_mps, e.v_max_mps);
}

double effective_energy_threshold(const Scenario& s) {
  const EnergyParams& e = s.config.energy;
  if (e.e_th_j > 0.0) return e.e_th_j;
  const double v = optimal_cruise_speed(e);
  return 0.9 * (e.kappa * v * v * v + e.zeta / v);
}

std::vector<std::string> config_errors(const ScenarioConfig& c) {
  std::vector<std::string> bad;
  if (c.abs_count < 0) bad.push_back("abs_count");
  if (c.cbs_count < 0) bad.push_back("cbs_count");
  if (c.lue_count < 0) bad.push_back("lue_count");
  if (c.hue_count < 0) bad.push_back("hue_count");
  if (c.region_size_m <= 0) bad.push_back("region_size_m");
  if (c.lue_area_m <= 0 || c.lue_area_m > c.region_size_m) bad.push_back("lue_area_m");
  if (c.sat_altitude_m <= 0) bad.push_back("sat_altitude_m");
  if (c.abs_altitude_m <= 0) bad.push_back("abs_altitude_m");
  if (c.cbs_radius_m <= 0) bad.push_back("cbs_radius_m");
  if (c.time.slot_count < 2) bad.push_back("slot_count");
  if (c.time.horizon_s <= 0) bad.push_back("horizon_s");
  const RadioParams& r = c.radio;
  if (r.bandwidth_sat_hz <= 0) bad.push_back("bandwidth_sat_hz");
  if (r.bandwidth_cbs_hz <= 0) bad.push_back("bandwidth_cbs_hz");
  if (r.bandwidth_abs_hz <= 0) bad.push_back("bandwidth_abs_hz");
  if (r.p_max_w <= 0) bad.push_back("p_max_w");
  if (r.xi0 <= 0) bad.push_back("xi0");
  if (r.d0_m <= 0) bad.push_back("d0_m");
  if (r.k_rb < 1) bad.push_back("k_rb");
  if (r.z_rb < 1) bad.push_back("z_rb");
  if (r.y_rb < 1) bad.push_back("y_rb");
  if (r.sat_abs.zeta < 1) bad.push_back("zeta_sat_abs");
  if (r.cbs_abs.zeta < 1) bad.push_back("zeta_cbs_abs");
  if (r.sat_hue.zeta < 1) bad.push_back("zeta_sat_hue");
  if (r.circuit_sat_w <= 0) bad.push_back("circuit_sat_w");
  if (r.circuit_cbs_w <= 0) bad.push_back("circuit_cbs_w");
  if (r.rate_threshold_bps <= 0) bad.push_back("r_th_bps");
  if (r.d_th <= 0) bad.push_back("d_th");
  const EnergyParams& e = c.energy;
  if (e.kappa <= 0) bad.push_back("kappa_u");
  if (e.zeta <= 0) bad.push_back("zeta_u");
  if (e.gravity <= 0) bad.push_back("gravity");
  if (e.lambda_step_s <= 0) bad.push_back("lambda_step_s");
  if (!(0 < e.v_min_mps && e.v_min_mps < e.v_max_mps)) bad.push_back("v_min_mps/v_max_mps");
  if (!(0 < e.h_min_m && e.h_min_m < e.h_max_m)) bad.push_back("h_min_m/h_max_m");
  return bad;
}

Scenario generate_scenario(const ScenarioConfig& config, std::uint64_t seed) {
  const std::vector<std::string> bad = config_errors(config);
  if (!bad.empty()) {
    std::string msg = "invalid scenario config, offending keys:";
    for (const auto& k : bad) msg += " " + k;
    throw std::invalid_argument(msg);
  }

  Scenario s;
  s.config = config;
  s.config.time.slot_len_s = config.time.horizon_s / config.time.slot_count;
  s.seed = seed;

  const double region = config.region_size_m;
  s.satellite = {0.5 * region, 0.5 * region, config.sat_altitude_m};

  // CBSs equally spaced along the coastline edge (x = 0).
  for (int c = 0; c < config.cbs_count; ++c) {
    s.cbs.push_back({0.0, (c + 0.5) * region / config.cbs_count, 0.0});
  }

  // ABSs released on a deterministic grid over the LUE square so that initial
  // deployments already satisfy the pairwise safe distance.
  const int g = std::max(1, static_cast<int>(std::ceil(std::sqrt(double(config.abs_count)))));
  for (int u = 0; u < config.abs_count; ++u) {
    const int ix = u % g;
    const int iy = u / g;
    s.abs_initial.push_back({config.lue_offset_x_m + (ix + 0.5) * config.lue_area_m / g,
                             config.lue_offset_y_m + (iy + 0.5) * config.lue_area_m / g,
                             config.abs_altitude_m});
  }

  // Per-population substreams: adding HUEs never perturbs the LUE draws.
  Rng lue_rng(seed, "lue");
  for (int m = 0; m < config.lue_count; ++m) {
    s.lue.push_back({config.lue_offset_x_m + lue_rng.uniform() * config.lue_area_m,
                     config.lue_offset_y_m + lue_rng.uniform() * config.lue_area_m, 0.0});
  }

  Rng hue_rng(seed, "hue");
  const std::vector<Position3D> route = route_waypoints(region);
  const int n_slots = s.config.time.slot_count;
  for (int m = 0; m < config.hue_count; ++m) {
    Position3D pos{hue_rng.uniform() * region, hue_rng.uniform() * region, 0.0};
    std::vector<Position3D> track;
    track.reserve(n_slots);
    for (int n = 0; n < n_slots; ++n) {
      track.push_back(pos);
      // Drift along the route tangent for the current leg of the horizon.
      const size_t leg = std::min<size_t>(route.size() - 2, (size_t)(double(n) / n_slots * (route.size() - 1)));
      const double dx = route[leg + 1].x - route[leg].x;
      const double dy = route[leg + 1].y - route[leg].y;
      const double norm = std::hypot(dx, dy);
      const double step = config.hue_drift_speed_mps * s.config.time.slot_len_s;
      pos.x = std::clamp(pos.x + step * dx / norm, 0.0, region);
      pos.y = std::clamp(pos.y + step * dy / norm, 0.0, region);
    }
    s.hue.push_back(std::move(track));
  }
  return s;
}

ValidationReport validate_scenario(const Scenario& s) {
  ValidationReport rep;
  const ScenarioConfig& c = s.config;
  for (const auto& key : config_errors(c)) {
    append_issue(rep.issues, "config key violates invariant: " + key);
  }

  const double expected_len = c.time.horizon_s / c.time.slot_count;
  if (c.time.slot_len_s * c.time.slot_count != c.time.horizon_s ||
      c.time.slot_len_s != expected_len) {
    append_issue(rep.issues, "time grid: slot_len_s * slot_count != horizon_s (L_u = T/N violated)");
  }

  if (static_cast<int>(s.abs_initial.size()) != c.abs_count)
    append_issue(rep.issues, "abs_count does not match abs_initial length");
  if (static_cast<int>(s.cbs.size()) != c.cbs_count)
    append_issue(rep.issues, "cbs_count does not match cbs list length");
  if (static_cast<int>(s.lue.size()) != c.lue_count)
    append_issue(rep.issues, "lue_count does not match lue list length");
  if (static_cast<int>(s.hue.size()) != c.hue_count)
    append_issue(rep.issues, "hue_count does not match hue list length");

  if (s.satellite.z <= 0) append_issue(rep.issues, "satellite altitude must be positive");

  for (size_t i = 0; i < s.lue.size(); ++i) {
    const Position3D& p = s.lue[i];
    if (p.z != 0.0)
      append_issue(rep.issues, "lue " + std::to_string(i) + ": sea-surface node must have z = 0 (z >= 0 invariant)");
    if (p.x < c.lue_offset_x_m || p.x > c.lue_offset_x_m + c.lue_area_m ||
        p.y < c.lue_offset_y_m || p.y > c.lue_offset_y_m + c.lue_area_m)
      append_issue(rep.issues, "lue " + std::to_string(i) + ": outside the coastal square");
  }
  for (size_t i = 0; i < s.hue.size(); ++i) {
    if (static_cast<int>(s.hue[i].size()) != c.time.slot_count) {
      append_issue(rep.issues, "hue " + std::to_string(i) + ": track length != slot_count");
      continue;
    }
    for (int n = 0; n < c.time.slot_count; ++n) {
      const Position3D& p = s.hue[i][n];
      if (p.z != 0.0)
        append_issue(rep.issues, "hue " + std::to_string(i) + ": sea-surface node must have z = 0");
      if (p.x < 0 || p.x > c.region_size_m || p.y < 0 || p.y > c.region_size_m)
        append_issue(rep.issues, "hue " + std::to_string(i) + " slot " + std::to_string(n) + ": outside region bounds");
    }
  }
  for (size_t i = 0; i < s.cbs.size(); ++i) {
    if (s.cbs[i].z != 0.0)
      append_issue(rep.issues, "cbs " + std::to_string(i) + ": sea-surface node must have z = 0");
  }
  for (size_t i = 0; i < s.abs_initial.size(); ++i) {
    if (s.abs_initial[i].z < 0)
      append_issue(rep.issues, "abs " + std::to_string(i) + ": z >= 0 violated");
  }
  return rep;
}

double noise_power(const RadioParams& radio, double bandwidth_hz) {
  if (bandwidth_hz <= 0) throw std::domain_error("noise_power: bandwidth must be positive");
  const double dbm = radio.noise_dbm_per_hz + 10.0 * std::log10(bandwidth_hz);
  return std::pow(10.0, (dbm - 30.0) / 10.0);
}

std::string dump_scenario(const Scenario& s) {
  std::ostringstream out;
  const ScenarioConfig& c = s.config;
  out << "sasnet-scenario v1\n";
  out << "seed " << s.seed << "\n";
  out << "counts " << c.abs_count << " " << c.cbs_count << " " << c.lue_count << " " << c.hue_count << "\n";
  out << "time " << fmt_double(c.time.horizon_s) << " " << c.time.slot_count << " " << fmt_double(c.time.slot_len_s) << "\n";
  auto kv = [&](const char* k, double v) { out << k << " " << fmt_double(v) << "\n"; };
  kv("region_size_m", c.region_size_m);
  kv("lue_area_m", c.lue_area_m);
  kv("lue_offset_x_m", c.lue_offset_x_m);
  kv("lue_offset_y_m", c.lue_offset_y_m);
  kv("sat_altitude_m", c.sat_altitude_m);
  kv("abs_altitude_m", c.abs_altitude_m);
  kv("cbs_radius_m", c.cbs_radius_m);
  kv("hue_drift_speed_mps", c.hue_drift_speed_mps);
  const RadioParams& r = c.radio;
  kv("carrier_hz", r.carrier_hz);
  kv("bandwidth_sat_hz", r.bandwidth_sat_hz);
  kv("bandwidth_cbs_hz", r.bandwidth_cbs_hz);
  kv("bandwidth_abs_hz", r.bandwidth_abs_hz);
  kv("noise_dbm_per_hz", r.noise_dbm_per_hz);
  kv("p_max_w", r.p_max_w);
  kv("antenna_gain_tx_dbi", r.antenna_gain_tx_dbi);
  kv("antenna_gain_rx_dbi", r.antenna_gain_rx_dbi);
  out << "apply_antenna_gains " << (r.apply_antenna_gains ? 1 : 0) << "\n";
  kv("d0_m", r.d0_m);
  kv("xi0", r.xi0);
  kv("smallscale_scale_abs_lue", r.smallscale_scale_abs_lue);
  kv("smallscale_scale_mmw", r.smallscale_scale_mmw);
  kv("omega_sat_abs_db", r.sat_abs.omega_db);
  kv("zeta_sat_abs", r.sat_abs.zeta);
  kv("delta_sat_abs_db", r.sat_abs.delta_db);
  kv("k_sat_abs", r.sat_abs.rician_k);
  kv("omega_cbs_abs_db", r.cbs_abs.omega_db);
  kv("zeta_cbs_abs", r.cbs_abs.zeta);
  kv("delta_cbs_abs_db", r.cbs_abs.delta_db);
  kv("k_cbs_abs", r.cbs_abs.rician_k);
  kv("omega_sat_hue_db", r.sat_hue.omega_db);
  kv("zeta_sat_hue", r.sat_hue.zeta);
  kv("delta_sat_hue_db", r.sat_hue.delta_db);
  kv("k_sat_hue", r.sat_hue.rician_k);
  kv("k_abs_lue", r.rician_k_abs_lue);
  kv("k_cbs_hue", r.rician_k_cbs_hue);
  out << "k_rb " << r.k_rb << "\nz_rb " << r.z_rb << "\ny_rb " << r.y_rb << "\n";
  kv("circuit_sat_w", r.circuit_sat_w);
  kv("circuit_cbs_w", r.circuit_cbs_w);
  kv("r_th_bps", r.rate_threshold_bps);
  kv("d_th", r.d_th);
  kv("cbs_height_m", r.cbs_height_m);
  kv("hue_height_m", r.hue_height_m);
  kv("ce2r_floor_gain", r.ce2r_floor_gain);
  out << "fold_interference_into_noise " << (r.fold_interference_into_noise ? 1 : 0) << "\n";
  const EnergyParams& e = c.energy;
  kv("kappa_u", e.kappa);
  kv("zeta_u", e.zeta);
  kv("gravity", e.gravity);
  kv("payload_mass_kg", e.payload_mass_kg);
  kv("lambda_step_s", e.lambda_step_s);
  kv("e_th_j", e.e_th_j);
  kv("v_min_mps", e.v_min_mps);
  kv("v_max_mps", e.v_max_mps);
  kv("h_min_m", e.h_min_m);
  kv("h_max_m", e.h_max_m);
  out << "literal_flight_power " << (e.literal_flight_power ? 1 : 0) << "\n";
  out << "invert_energy_constraints " << (e.invert_energy_constraints ? 1 : 0) << "\n";

  auto pos = [&](const char* tag, size_t i, const Position3D& p) {
    out << tag << " " << i << " " << fmt_double(p.x) << " " << fmt_double(p.y) << " " << fmt_double(p.z) << "\n";
  };
  out << "sat " << fmt_double(s.satellite.x) << " " << fmt_double(s.satellite.y) << " " << fmt_double(s.satellite.z) << "\n";
  for (size_t i = 0; i < s.cbs.size(); ++i) pos("cbs", i, s.cbs[i]);
  for (size_t i = 0; i < s.abs_initial.size(); ++i) pos("abs", i, s.abs_initial[i]);
  for (size_t i = 0; i < s.lue.size(); ++i) pos("lue", i, s.lue[i]);
  for (size_t i = 0; i < s.hue.size(); ++i)
    for (size_t n = 0; n < s.hue[i].size(); ++n)
      out << "hue " << i << " " << n << " " << fmt_double(s.hue[i][n].x) << " "
          << fmt_double(s.hue[i][n].y) << " " << fmt_double(s.hue[i][n].z) << "\n";
  return out.str();
}

Scenario load_scenario(const std::string& text) {
  std::istringstream in(text);
  std::string header;
  std::getline(in, header);
  if (header != "sasnet-scenario v1") throw std::runtime_error("scenario load: bad header");

  Scenario s;
  ScenarioConfig& c = s.config;
  std::string key;
  while (in >> key) {
    if (key == "seed") in >> s.seed;
    else if (key == "counts") in >> c.abs_count >> c.cbs_count >> c.lue_count >> c.hue_count;
    else if (key == "time") in >> c.time.horizon_s >> c.time.slot_count >> c.time.slot_len_s;
    else if (key == "region_size_m") in >> c.region_size_m;
    else if (key == "lue_area_m") in >> c.lue_area_m;
    else if (key == "lue_offset_x_m") in >> c.lue_offset_x_m;
    else if (key == "lue_offset_y_m") in >> c.lue_offset_y_m;
    else if (key == "sat_altitude_m") in >> c.sat_altitude_m;
    else if (key == "abs_altitude_m") in >> c.abs_altitude_m;
    else if (key == "cbs_radius_m") in >> c.cbs_radius_m;
    else if (key == "hue_drift_speed_mps") in >> c.hue_drift_speed_mps;
    else if (key == "carrier_hz") in >> c.radio.carrier_hz;
    else if (key == "bandwidth_sat_hz") in >> c.radio.bandwidth_sat_hz;
    else if (key == "bandwidth_cbs_hz") in >> c.radio.bandwidth_cbs_hz;
    else if (key == "bandwidth_abs_hz") in >> c.radio.bandwidth_abs_hz;
    else if (key == "noise_dbm_per_hz") in >> c.radio.noise_dbm_per_hz;
    else if (key == "p_max_w") in >> c.radio.p_max_w;
    else if (key == "antenna_gain_tx_dbi") in >> c.radio.antenna_gain_tx_dbi;
    else if (key == "antenna_gain_rx_dbi") in >> c.radio.antenna_gain_rx_dbi;
    else if (key == "apply_antenna_gains") { int v; in >> v; c.radio.apply_antenna_gains = v != 0; }
    else if (key == "d0_m") in >> c.radio.d0_m;
    else if (key == "xi0") in >> c.radio.xi0;
    else if (key == "smallscale_scale_abs_lue") in >> c.radio.smallscale_scale_abs_lue;
    else if (key == "smallscale_scale_mmw") in >> c.radio.smallscale_scale_mmw;
    else if (key == "omega_sat_abs_db") in >> c.radio.sat_abs.omega_db;
    else if (key == "zeta_sat_abs") in >> c.radio.sat_abs.zeta;
    else if (key == "delta_sat_abs_db") in >> c.radio.sat_abs.delta_db;
    else if (key == "k_sat_abs") in >> c.radio.sat_abs.rician_k;
    else if (key == "omega_cbs_abs_db") in >> c.radio.cbs_abs.omega_db;
    else if (key == "zeta_cbs_abs") in >> c.radio.cbs_abs.zeta;
    else if (key == "delta_cbs_abs_db") in >> c.radio.cbs_abs.delta_db;
    else if (key == "k_cbs_abs") in >> c.radio.cbs_abs.rician_k;
    else if (key == "omega_sat_hue_db") in >> c.radio.sat_hue.omega_db;
    else if (key == "zeta_sat_hue") in >> c.radio.sat_hue.zeta;
    else if (key == "delta_sat_hue_db") in >> c.radio.sat_hue.delta_db;
    else if (key == "k_sat_hue") in >> c.radio.sat_hue.rician_k;
    else if (key == "k_abs_lue") in >> c.radio.rician_k_abs_lue;
    else if (key == "k_cbs_hue") in >> c.radio.rician_k_cbs_hue;
    else if (key == "k_rb") in >> c.radio.k_rb;
    else if (key == "z_rb") in >> c.radio.z_rb;
    else if (key == "y_rb") in >> c.radio.y_rb;
    else if (key == "circuit_sat_w") in >> c.radio.circuit_sat_w;
    else if (key == "circuit_cbs_w") in >> c.radio.circuit_cbs_w;
    else if (key == "r_th_bps") in >> c.radio.rate_threshold_bps;
    else if (key == "d_th") in >> c.radio.d_th;
    else if (key == "cbs_height_m") in >> c.radio.cbs_height_m;
    else if (key == "hue_height_m") in >> c.radio.hue_height_m;
    else if (key == "ce2r_floor_gain") in >> c.radio.ce2r_floor_gain;
    else if (key == "fold_interference_into_noise") { int v; in >> v; c.radio.fold_interference_into_noise = v != 0; }
    else if (key == "kappa_u") in >> c.energy.kappa;
    else if (key == "zeta_u") in >> c.energy.zeta;
    else if (key == "gravity") in >> c.energy.gravity;
    else if (key == "payload_mass_kg") in >> c.energy.payload_mass_kg;
    else if (key == "lambda_step_s") in >> c.energy.lambda_step_s;
    else if (key == "e_th_j") in >> c.energy.e_th_j;
    else if (key == "v_min_mps") in >> c.energy.v_min_mps;
    else if (key == "v_max_mps") in >> c.energy.v_max_mps;
    else if (key == "h_min_m") in >> c.energy.h_min_m;
    else if (key == "h_max_m") in >> c.energy.h_max_m;
    else if (key == "literal_flight_power") { int v; in >> v; c.energy.literal_flight_power = v != 0; }
    else if (key == "invert_energy_constraints") { int v; in >> v; c.energy.invert_energy_constraints = v != 0; }
    else if (key == "sat") in >> s.satellite.x >> s.satellite.y >> s.satellite.z;
    else if (key == "cbs") { size_t i; Position3D p; in >> i >> p.x >> p.y >> p.z; s.cbs.resize(std::max(s.cbs.size(), i + 1)); s.cbs[i] = p; }
    else if (key == "abs") { size_t i; Position3D p; in >> i >> p.x >> p.y >> p.z; s.abs_initial.resize(std::max(s.abs_initial.size(), i + 1)); s.abs_initial[i] = p; }
    else if (key == "lue") { size_t i; Position3D p; in >> i >> p.x >> p.y >> p.z; s.lue.resize(std::max(s.lue.size(), i + 1)); s.lue[i] = p; }
    else if (key == "hue") {
      size_t i, n; Position3D p; in >> i >> n >> p.x >> p.y >> p.z;
      s.hue.resize(std::max(s.hue.size(), i + 1));
      s.hue[i].resize(std::max(s.hue[i].size(), n + 1));
      s.hue[i][n] = p;
    } else {
      throw std::runtime_error("scenario load: unknown key " + key);
    }
  }
  return s;
}

std::string scenario_hash(const Scenario& s) {
  const std::uint64_t h = Rng::fnv1a(dump_scenario(s));
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace sasnet
