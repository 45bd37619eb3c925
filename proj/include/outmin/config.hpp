// SPDX-License-Identifier: Apache-2.0
// ris-outmin: outage-minimizing beamforming for RIS-aided mmWave downlinks

#ifndef OUTMIN_CONFIG_HPP
#define OUTMIN_CONFIG_HPP

#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "outmin/baselines.hpp"
#include "outmin/eval.hpp"

namespace outmin {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Flat run configuration. Defaults reproduce the reference deployment:
/// 28 GHz UMi street canyon, 30 dBm transmit power, -94 dBm noise,
/// 5 clusters x 20 subpaths, blockage-free RIS links.
struct RunConfig {
  int n_tx = 8;
  int n_ris = 1;
  int elems_per_ris = 64;
  int n_users = 1;

  double p_max_dbm = 30.0;
  double noise_dbm = -94.0;
  double fc_ghz = 28.0;
  double target_rate_bps_hz = 0.5;

  std::string blockage_law = "fixed";  // "fixed" | "distance"
  double p_block = 0.5;
  std::optional<double> a_out;
  std::optional<double> b_out;

  int n_clusters = 5;
  int n_subpaths = 20;
  double angular_spread_deg = 5.0;
  double kappa_direct = 0.0;
  bool direct_los_only = false;

  double ris_radius_m = 50.0;
  double user_dist_min_m = 50.0;
  double user_dist_max_m = 80.0;
  double sector_rad = kPi / 6.0;
  std::vector<double> user_distances_m;
  std::vector<double> user_angles_rad;

  double pathloss_exp_los = 2.0;
  double pathloss_exp_nlos = 3.5;
  double shadow_sigma_los_db = 4.0;
  double shadow_sigma_nlos_db = 8.2;

  int bs_rows = 0, bs_cols = 0;
  int ris_rows = 0, ris_cols = 0;

  double theta = 0.0;  // 0 = calibrate
  double mu = 0.0;     // 0 = 1/(100K)
  double tau = 0.0;    // 0 = calibrate

  std::string scheme = "smm";
  int max_iter = 1000;
  double stop_tol = 1e-4;
  int stop_patience = 50;
  int mc_samples = 1000;
  std::uint64_t seed = 1;
  std::string out_dir = "out";

  int init_trials = 64;
  int saa_samples = 300;
  double csi_angle_error_rad = 0.01;

  double armijo_xi0 = 1.0;
  double armijo_c1 = 0.01;
  double armijo_c2 = 0.5;
  int armijo_max_backtracks = 30;

  bool use_squarem = true;
  bool squarem_paper_form = false;
  int squarem_max_backtracks = 20;
  std::string phase_minimizer = "elementwise";  // | "rotated"
  bool track_diagnostics = false;

  bool operator==(const RunConfig&) const = default;

  double p_max_watt() const { return dbm_to_watt(p_max_dbm); }
  double noise_watt() const { return dbm_to_watt(noise_dbm); }
  double sinr_threshold() const { return rate_to_sinr_threshold(target_rate_bps_hz); }

  ScenarioConfig to_scenario() const {
    ScenarioConfig s;
    s.n_tx = n_tx;
    s.n_ris = n_ris;
    s.elems_per_ris = elems_per_ris;
    s.n_users = n_users;
    s.p_max = p_max_watt();
    s.noise_power = noise_watt();
    s.fc_ghz = fc_ghz;
    s.sinr_threshold = sinr_threshold();
    s.blockage = blockage_law == "fixed"
                     ? BlockageModel::fixed_probability(p_block)
                     : BlockageModel::distance_law(*a_out, *b_out);
    s.n_clusters = n_clusters;
    s.n_subpaths = n_subpaths;
    s.angular_spread_rad = angular_spread_deg * kPi / 180.0;
    s.kappa_direct = kappa_direct;
    s.direct_los_only = direct_los_only;
    s.ris_radius_m = ris_radius_m;
    s.user_dist_min_m = user_dist_min_m;
    s.user_dist_max_m = user_dist_max_m;
    s.sector_rad = sector_rad;
    s.user_distances_m = user_distances_m;
    s.user_angles_rad = user_angles_rad;
    s.pathloss_exp_los = pathloss_exp_los;
    s.pathloss_exp_nlos = pathloss_exp_nlos;
    s.shadow_sigma_los_db = shadow_sigma_los_db;
    s.shadow_sigma_nlos_db = shadow_sigma_nlos_db;
    s.bs_rows = bs_rows;
    s.bs_cols = bs_cols;
    s.ris_rows = ris_rows;
    s.ris_cols = ris_cols;
    s.seed = seed;
    return s;
  }

  TrainOptions train_options() const {
    TrainOptions t;
    const PhaseMinimizer pm = phase_minimizer == "rotated"
                                  ? PhaseMinimizer::Rotated
                                  : PhaseMinimizer::Elementwise;
    t.smm.stop = {stop_tol, stop_patience, max_iter};
    t.smm.squarem = {squarem_paper_form, squarem_max_backtracks};
    t.smm.use_squarem = use_squarem;
    t.smm.phase_min = pm;
    t.smm.track_diagnostics = track_diagnostics;
    t.smm.theta_override = theta;
    t.ssca.stop = {stop_tol, stop_patience, max_iter};
    t.ssca.rule_f = {armijo_xi0, armijo_c1, armijo_c2, armijo_max_backtracks};
    t.ssca.rule_e = t.ssca.rule_f;
    t.ssca.phase_min = pm;
    t.ssca.tau = tau;
    t.ssca.track_diagnostics = track_diagnostics;
    t.ssca.theta_override = theta;
    t.ssca.mu_override = mu;
    t.saa.n_samples = saa_samples;
    t.saa.stop = {stop_tol, stop_patience, max_iter};
    t.saa.phase_min = pm;
    t.saa.theta_override = theta;
    t.init_trials = init_trials;
    t.csi_error_rad = csi_angle_error_rad;
    return t;
  }
};

namespace detail {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string format_list(const std::vector<double>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += format_double(v[i]);
  }
  return out;
}

inline std::vector<double> parse_list(const std::string& text, int line,
                                      const std::string& key) {
  std::vector<double> out;
  if (text.empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t pos = 0;
      const double v = std::stod(item, &pos);
      if (pos != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw ConfigError("line " + std::to_string(line) + ": key '" + key +
                        "': bad list element '" + item + "'");
    }
  }
  return out;
}

}  // namespace detail

/// Serializes a config as flat key = value lines (strings quoted, lists as
/// quoted comma-joined strings). parse_config(render_config(c)) == c.
inline std::string render_config(const RunConfig& c) {
  std::ostringstream os;
  auto d = detail::format_double;
  os << "n_tx = " << c.n_tx << "\n";
  os << "n_ris = " << c.n_ris << "\n";
  os << "elems_per_ris = " << c.elems_per_ris << "\n";
  os << "n_users = " << c.n_users << "\n";
  os << "p_max_dbm = " << d(c.p_max_dbm) << "\n";
  os << "noise_dbm = " << d(c.noise_dbm) << "\n";
  os << "fc_ghz = " << d(c.fc_ghz) << "\n";
  os << "target_rate_bps_hz = " << d(c.target_rate_bps_hz) << "\n";
  os << "blockage_law = \"" << c.blockage_law << "\"\n";
  os << "p_block = " << d(c.p_block) << "\n";
  if (c.a_out) os << "a_out = " << d(*c.a_out) << "\n";
  if (c.b_out) os << "b_out = " << d(*c.b_out) << "\n";
  os << "n_clusters = " << c.n_clusters << "\n";
  os << "n_subpaths = " << c.n_subpaths << "\n";
  os << "angular_spread_deg = " << d(c.angular_spread_deg) << "\n";
  os << "kappa_direct = " << d(c.kappa_direct) << "\n";
  os << "direct_los_only = " << (c.direct_los_only ? "true" : "false") << "\n";
  os << "ris_radius_m = " << d(c.ris_radius_m) << "\n";
  os << "user_dist_min_m = " << d(c.user_dist_min_m) << "\n";
  os << "user_dist_max_m = " << d(c.user_dist_max_m) << "\n";
  os << "sector_rad = " << d(c.sector_rad) << "\n";
  os << "user_distances_m = \"" << detail::format_list(c.user_distances_m) << "\"\n";
  os << "user_angles_rad = \"" << detail::format_list(c.user_angles_rad) << "\"\n";
  os << "pathloss_exp_los = " << d(c.pathloss_exp_los) << "\n";
  os << "pathloss_exp_nlos = " << d(c.pathloss_exp_nlos) << "\n";
  os << "shadow_sigma_los_db = " << d(c.shadow_sigma_los_db) << "\n";
  os << "shadow_sigma_nlos_db = " << d(c.shadow_sigma_nlos_db) << "\n";
  os << "bs_rows = " << c.bs_rows << "\n";
  os << "bs_cols = " << c.bs_cols << "\n";
  os << "ris_rows = " << c.ris_rows << "\n";
  os << "ris_cols = " << c.ris_cols << "\n";
  os << "theta = " << d(c.theta) << "\n";
  os << "mu = " << d(c.mu) << "\n";
  os << "tau = " << d(c.tau) << "\n";
  os << "scheme = \"" << c.scheme << "\"\n";
  os << "max_iter = " << c.max_iter << "\n";
  os << "stop_tol = " << d(c.stop_tol) << "\n";
  os << "stop_patience = " << c.stop_patience << "\n";
  os << "mc_samples = " << c.mc_samples << "\n";
  os << "seed = " << c.seed << "\n";
  os << "out_dir = \"" << c.out_dir << "\"\n";
  os << "init_trials = " << c.init_trials << "\n";
  os << "saa_samples = " << c.saa_samples << "\n";
  os << "csi_angle_error_rad = " << d(c.csi_angle_error_rad) << "\n";
  os << "armijo_xi0 = " << d(c.armijo_xi0) << "\n";
  os << "armijo_c1 = " << d(c.armijo_c1) << "\n";
  os << "armijo_c2 = " << d(c.armijo_c2) << "\n";
  os << "armijo_max_backtracks = " << c.armijo_max_backtracks << "\n";
  os << "use_squarem = " << (c.use_squarem ? "true" : "false") << "\n";
  os << "squarem_paper_form = " << (c.squarem_paper_form ? "true" : "false") << "\n";
  os << "squarem_max_backtracks = " << c.squarem_max_backtracks << "\n";
  os << "phase_minimizer = \"" << c.phase_minimizer << "\"\n";
  os << "track_diagnostics = " << (c.track_diagnostics ? "true" : "false") << "\n";
  return os.str();
}

/// Parses flat key = value text (TOML-compatible scalars; # comments).
/// Reports unknown keys, malformed or out-of-range values, and missing
/// required keys with the offending line or key name.
inline RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::istringstream is(text);
  std::string line;
  int line_no = 0;

  auto fail = [&](const std::string& key, const std::string& what) {
    throw ConfigError("line " + std::to_string(line_no) + ": key '" + key +
                      "': " + what);
  };

  while (std::getline(is, line)) {
    ++line_no;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string();
      const auto e = s.find_last_not_of(" \t\r");
      return s.substr(b, e - b + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);
    if (key.empty()) fail(key, "empty key");

    auto as_int = [&](int lo, int hi = INT32_MAX) {
      try {
        size_t pos = 0;
        const long v = std::stol(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        if (v < lo || v > hi) fail(key, "value " + value + " out of range");
        return static_cast<int>(v);
      } catch (const ConfigError&) {
        throw;
      } catch (const std::exception&) {
        fail(key, "expected integer, got '" + value + "'");
        return 0;
      }
    };
    auto as_u64 = [&]() {
      try {
        size_t pos = 0;
        const unsigned long long v = std::stoull(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return static_cast<std::uint64_t>(v);
      } catch (const std::exception&) {
        fail(key, "expected unsigned integer, got '" + value + "'");
        return std::uint64_t{0};
      }
    };
    auto as_double = [&](double lo, double hi) {
      try {
        size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        if (!(v >= lo && v <= hi)) fail(key, "value " + value + " out of range");
        return v;
      } catch (const ConfigError&) {
        throw;
      } catch (const std::exception&) {
        fail(key, "expected number, got '" + value + "'");
        return 0.0;
      }
    };
    auto as_bool = [&]() {
      if (value == "true") return true;
      if (value == "false") return false;
      fail(key, "expected true/false, got '" + value + "'");
      return false;
    };
    const double inf = std::numeric_limits<double>::infinity();

    if (key == "n_tx") c.n_tx = as_int(1);
    else if (key == "n_ris") c.n_ris = as_int(1);
    else if (key == "elems_per_ris") c.elems_per_ris = as_int(1);
    else if (key == "n_users") c.n_users = as_int(1);
    else if (key == "p_max_dbm") c.p_max_dbm = as_double(-200.0, 200.0);
    else if (key == "noise_dbm") c.noise_dbm = as_double(-300.0, 100.0);
    else if (key == "fc_ghz") c.fc_ghz = as_double(1e-3, 1e4);
    else if (key == "target_rate_bps_hz") c.target_rate_bps_hz = as_double(1e-9, 100.0);
    else if (key == "blockage_law") {
      if (value != "fixed" && value != "distance")
        fail(key, "expected \"fixed\" or \"distance\"");
      c.blockage_law = value;
    } else if (key == "p_block") c.p_block = as_double(0.0, 1.0);
    else if (key == "a_out") c.a_out = as_double(0.0, 10.0);
    else if (key == "b_out") c.b_out = as_double(-100.0, 100.0);
    else if (key == "n_clusters") c.n_clusters = as_int(1);
    else if (key == "n_subpaths") c.n_subpaths = as_int(1);
    else if (key == "angular_spread_deg") c.angular_spread_deg = as_double(0.0, 90.0);
    else if (key == "kappa_direct") c.kappa_direct = as_double(0.0, inf);
    else if (key == "direct_los_only") c.direct_los_only = as_bool();
    else if (key == "ris_radius_m") c.ris_radius_m = as_double(1.0, 1e6);
    else if (key == "user_dist_min_m") c.user_dist_min_m = as_double(1.0, 1e6);
    else if (key == "user_dist_max_m") c.user_dist_max_m = as_double(1.0, 1e6);
    else if (key == "sector_rad") c.sector_rad = as_double(1e-6, 2.0 * kPi);
    else if (key == "user_distances_m")
      c.user_distances_m = detail::parse_list(value, line_no, key);
    else if (key == "user_angles_rad")
      c.user_angles_rad = detail::parse_list(value, line_no, key);
    else if (key == "pathloss_exp_los") c.pathloss_exp_los = as_double(0.0, 10.0);
    else if (key == "pathloss_exp_nlos") c.pathloss_exp_nlos = as_double(0.0, 10.0);
    else if (key == "shadow_sigma_los_db") c.shadow_sigma_los_db = as_double(0.0, 50.0);
    else if (key == "shadow_sigma_nlos_db") c.shadow_sigma_nlos_db = as_double(0.0, 50.0);
    else if (key == "bs_rows") c.bs_rows = as_int(0);
    else if (key == "bs_cols") c.bs_cols = as_int(0);
    else if (key == "ris_rows") c.ris_rows = as_int(0);
    else if (key == "ris_cols") c.ris_cols = as_int(0);
    else if (key == "theta") c.theta = as_double(0.0, inf);
    else if (key == "mu") c.mu = as_double(0.0, inf);
    else if (key == "tau") c.tau = as_double(0.0, inf);
    else if (key == "scheme") {
      scheme_from_name(value);  // validates
      c.scheme = value;
    } else if (key == "max_iter") c.max_iter = as_int(1);
    else if (key == "stop_tol") c.stop_tol = as_double(0.0, 1.0);
    else if (key == "stop_patience") c.stop_patience = as_int(1);
    else if (key == "mc_samples") c.mc_samples = as_int(1);
    else if (key == "seed") c.seed = as_u64();
    else if (key == "out_dir") c.out_dir = value;
    else if (key == "init_trials") c.init_trials = as_int(1);
    else if (key == "saa_samples") c.saa_samples = as_int(1);
    else if (key == "csi_angle_error_rad") c.csi_angle_error_rad = as_double(0.0, kPi);
    else if (key == "armijo_xi0") c.armijo_xi0 = as_double(1e-300, 1.0);
    else if (key == "armijo_c1") c.armijo_c1 = as_double(1e-12, 1.0 - 1e-12);
    else if (key == "armijo_c2") c.armijo_c2 = as_double(1e-12, 1.0 - 1e-12);
    else if (key == "armijo_max_backtracks") c.armijo_max_backtracks = as_int(1);
    else if (key == "use_squarem") c.use_squarem = as_bool();
    else if (key == "squarem_paper_form") c.squarem_paper_form = as_bool();
    else if (key == "squarem_max_backtracks") c.squarem_max_backtracks = as_int(0);
    else if (key == "phase_minimizer") {
      if (value != "elementwise" && value != "rotated")
        fail(key, "expected \"elementwise\" or \"rotated\"");
      c.phase_minimizer = value;
    } else if (key == "track_diagnostics") c.track_diagnostics = as_bool();
    else fail(key, "unknown key");
  }

  if (c.blockage_law == "distance") {
    if (!c.a_out) throw ConfigError("missing required key 'a_out' for blockage_law = \"distance\"");
    if (!c.b_out) throw ConfigError("missing required key 'b_out' for blockage_law = \"distance\"");
  }
  if (c.user_dist_max_m < c.user_dist_min_m)
    throw ConfigError("key 'user_dist_max_m': must be >= user_dist_min_m");
  return c;
}

}  // namespace outmin

#endif  // OUTMIN_CONFIG_HPP
