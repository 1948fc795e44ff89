#include "sasnet/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sasnet {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

KeyValueConfig KeyValueConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_text(buf.str());
}

KeyValueConfig KeyValueConfig::parse_text(const std::string& text) {
  KeyValueConfig cfg;
  cfg.text_ = text;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key or value");
    if (cfg.values_.count(key))
      throw std::invalid_argument("config: duplicate key " + key);
    cfg.values_[key] = value;
    cfg.consumed_[key] = false;
  }
  return cfg;
}

bool KeyValueConfig::has(const std::string& key) const { return values_.count(key) > 0; }

double KeyValueConfig::get_double(const std::string& key, double fallback) {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  consumed_[key] = true;
  try {
    size_t pos = 0;
    const double v = std::stod(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw std::invalid_argument("config key " + key + ": not a number: " + it->second);
  }
}

int KeyValueConfig::get_int(const std::string& key, int fallback) {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  consumed_[key] = true;
  try {
    size_t pos = 0;
    const int v = std::stoi(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw std::invalid_argument("config key " + key + ": not an integer: " + it->second);
  }
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  consumed_[key] = true;
  const std::string& v = it->second;
  if (v == "1" || v == "true" || v == "on") return true;
  if (v == "0" || v == "false" || v == "off") return false;
  throw std::invalid_argument("config key " + key + ": not a boolean: " + v);
}

std::vector<std::string> KeyValueConfig::unconsumed() const {
  std::vector<std::string> out;
  for (const auto& [k, used] : consumed_)
    if (!used) out.push_back(k);
  return out;
}

ParsedConfig load_config_text(const std::string& text) {
  KeyValueConfig kv = KeyValueConfig::parse_text(text);
  ParsedConfig pc;
  pc.raw_text = text;
  ScenarioConfig& c = pc.scenario;

  c.abs_count = kv.get_int("abs_count", c.abs_count);
  c.cbs_count = kv.get_int("cbs_count", c.cbs_count);
  c.lue_count = kv.get_int("lue_count", c.lue_count);
  c.hue_count = kv.get_int("hue_count", c.hue_count);
  c.region_size_m = kv.get_double("region_size_m", c.region_size_m);
  c.lue_area_m = kv.get_double("lue_area_m", c.lue_area_m);
  c.lue_offset_x_m = kv.get_double("lue_offset_x_m", c.lue_offset_x_m);
  c.lue_offset_y_m = kv.get_double("lue_offset_y_m", c.lue_offset_y_m);
  c.sat_altitude_m = kv.get_double("sat_altitude_m", c.sat_altitude_m);
  c.abs_altitude_m = kv.get_double("abs_altitude_m", c.abs_altitude_m);
  c.cbs_radius_m = kv.get_double("cbs_radius_m", c.cbs_radius_m);
  c.hue_drift_speed_mps = kv.get_double("hue_drift_speed_mps", c.hue_drift_speed_mps);
  c.time.horizon_s = kv.get_double("horizon_s", c.time.horizon_s);
  c.time.slot_count = kv.get_int("slot_count", c.time.slot_count);
  c.time.slot_len_s = c.time.horizon_s / c.time.slot_count;

  RadioParams& r = c.radio;
  r.carrier_hz = kv.get_double("carrier_hz", r.carrier_hz);
  r.bandwidth_sat_hz = kv.get_double("bandwidth_sat_hz", r.bandwidth_sat_hz);
  r.bandwidth_cbs_hz = kv.get_double("bandwidth_cbs_hz", r.bandwidth_cbs_hz);
  r.bandwidth_abs_hz = kv.get_double("bandwidth_abs_hz", r.bandwidth_abs_hz);
  r.noise_dbm_per_hz = kv.get_double("noise_dbm_per_hz", r.noise_dbm_per_hz);
  r.p_max_w = kv.get_double("p_max_w", r.p_max_w);
  r.antenna_gain_tx_dbi = kv.get_double("antenna_gain_tx_dbi", r.antenna_gain_tx_dbi);
  r.antenna_gain_rx_dbi = kv.get_double("antenna_gain_rx_dbi", r.antenna_gain_rx_dbi);
  r.apply_antenna_gains = kv.get_bool("apply_antenna_gains", r.apply_antenna_gains);
  r.d0_m = kv.get_double("d0_m", r.d0_m);
  r.xi0 = kv.get_double("xi0", r.xi0);
  r.smallscale_scale_abs_lue = kv.get_double("smallscale_scale_abs_lue", r.smallscale_scale_abs_lue);
  r.smallscale_scale_mmw = kv.get_double("smallscale_scale_mmw", r.smallscale_scale_mmw);
  r.sat_abs.omega_db = kv.get_double("omega_sat_abs_db", r.sat_abs.omega_db);
  r.sat_abs.zeta = kv.get_double("zeta_sat_abs", r.sat_abs.zeta);
  r.sat_abs.delta_db = kv.get_double("delta_sat_abs_db", r.sat_abs.delta_db);
  r.sat_abs.rician_k = kv.get_double("k_sat_abs", r.sat_abs.rician_k);
  r.cbs_abs.omega_db = kv.get_double("omega_cbs_abs_db", r.cbs_abs.omega_db);
  r.cbs_abs.zeta = kv.get_double("zeta_cbs_abs", r.cbs_abs.zeta);
  r.cbs_abs.delta_db = kv.get_double("delta_cbs_abs_db", r.cbs_abs.delta_db);
  r.cbs_abs.rician_k = kv.get_double("k_cbs_abs", r.cbs_abs.rician_k);
  r.sat_hue.omega_db = kv.get_double("omega_sat_hue_db", r.sat_hue.omega_db);
  r.sat_hue.zeta = kv.get_double("zeta_sat_hue", r.sat_hue.zeta);
  r.sat_hue.delta_db = kv.get_double("delta_sat_hue_db", r.sat_hue.delta_db);
  r.sat_hue.rician_k = kv.get_double("k_sat_hue", r.sat_hue.rician_k);
  r.rician_k_abs_lue = kv.get_double("k_abs_lue", r.rician_k_abs_lue);
  r.rician_k_cbs_hue = kv.get_double("k_cbs_hue", r.rician_k_cbs_hue);
  r.k_rb = kv.get_int("k_rb", r.k_rb);
  r.z_rb = kv.get_int("z_rb", r.z_rb);
  r.y_rb = kv.get_int("y_rb", r.y_rb);
  r.circuit_sat_w = kv.get_double("circuit_sat_w", r.circuit_sat_w);
  r.circuit_cbs_w = kv.get_double("circuit_cbs_w", r.circuit_cbs_w);
  r.rate_threshold_bps = kv.get_double("r_th_bps", r.rate_threshold_bps);
  r.d_th = kv.get_double("d_th", r.d_th);
  r.cbs_height_m = kv.get_double("cbs_height_m", r.cbs_height_m);
  r.hue_height_m = kv.get_double("hue_height_m", r.hue_height_m);
  r.ce2r_floor_gain = kv.get_double("ce2r_floor_gain", r.ce2r_floor_gain);
  r.fold_interference_into_noise = kv.get_bool("fold_interference_into_noise", r.fold_interference_into_noise);

  EnergyParams& e = c.energy;
  e.kappa = kv.get_double("kappa_u", e.kappa);
  e.zeta = kv.get_double("zeta_u", e.zeta);
  e.gravity = kv.get_double("gravity", e.gravity);
  e.payload_mass_kg = kv.get_double("payload_mass_kg", e.payload_mass_kg);
  e.lambda_step_s = kv.get_double("lambda_step_s", e.lambda_step_s);
  e.e_th_j = kv.get_double("e_th_j", e.e_th_j);
  e.v_min_mps = kv.get_double("v_min_mps", e.v_min_mps);
  e.v_max_mps = kv.get_double("v_max_mps", e.v_max_mps);
  e.h_min_m = kv.get_double("h_min_m", e.h_min_m);
  e.h_max_m = kv.get_double("h_max_m", e.h_max_m);
  e.literal_flight_power = kv.get_bool("literal_flight_power", e.literal_flight_power);
  e.invert_energy_constraints = kv.get_bool("invert_energy_constraints", e.invert_energy_constraints);

  SolverOptions& o = pc.solver;
  o.epsilon = kv.get_double("epsilon", o.epsilon);
  o.upsilon = kv.get_double("upsilon", o.upsilon);
  o.rho = kv.get_double("rho", o.rho);
  o.adaptive_rho = kv.get_bool("adaptive_rho", o.adaptive_rho);
  o.chi_down = kv.get_double("chi_down", o.chi_down);
  o.chi_up = kv.get_double("chi_up", o.chi_up);
  o.max_benders_iters = kv.get_int("max_benders_iters", o.max_benders_iters);
  o.max_dinkelbach_iters = kv.get_int("max_dinkelbach_iters", o.max_dinkelbach_iters);
  o.admm_max_iters = kv.get_int("admm_max_iters", o.admm_max_iters);
  o.admm_tol = kv.get_double("admm_tol", o.admm_tol);
  o.fd_bit_budget = kv.get_int("fd_bit_budget", o.fd_bit_budget);
  o.pgd_max_steps = kv.get_int("pgd_max_steps", o.pgd_max_steps);
  o.ee_unit = kv.get_double("ee_unit", o.ee_unit);
  o.trace = kv.get_bool("trace", o.trace);

  const std::vector<std::string> unknown = kv.unconsumed();
  if (!unknown.empty()) {
    std::string msg = "unknown config key(s):";
    for (const auto& k : unknown) msg += " " + k;
    throw std::invalid_argument(msg);
  }
  return pc;
}

ParsedConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_config_text(buf.str());
}

}  // namespace sasnet
