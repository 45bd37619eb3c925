// SPDX-License-Identifier: Apache-2.0
// ris-outmin: outage-minimizing beamforming for RIS-aided mmWave downlinks

#ifndef OUTMIN_SCENARIO_HPP
#define OUTMIN_SCENARIO_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "outmin/common.hpp"
#include "outmin/rng.hpp"

namespace outmin {

/// Uniform planar array; element count is rows * cols.
struct ArrayGeometry {
  int rows = 1;
  int cols = 1;
  double element_spacing_wavelengths = 0.5;

  int size() const { return rows * cols; }

  static ArrayGeometry most_square(int n_elements, double spacing = 0.5) {
    auto [r, c] = most_square_factors(n_elements);
    return {r, c, spacing};
  }
};

/// Blockage probability: distance law max(0, 1 - e^{-a*d + b}) or a fixed
/// override.
struct BlockageModel {
  bool fixed = true;
  double p_fixed = 0.0;
  double a_out = 0.0;
  double b_out = 0.0;

  static BlockageModel fixed_probability(double p) {
    BlockageModel m;
    m.fixed = true;
    m.p_fixed = p;
    return m;
  }
  static BlockageModel distance_law(double a, double b) {
    BlockageModel m;
    m.fixed = false;
    m.a_out = a;
    m.b_out = b;
    return m;
  }
};

inline double blockage_probability(const BlockageModel& model, double distance_m) {
  if (distance_m < 0.0) throw std::invalid_argument("blockage_probability: negative distance");
  if (model.fixed) return model.p_fixed;
  const double p = std::max(0.0, 1.0 - std::exp(-model.a_out * distance_m + model.b_out));
  return std::min(p, 1.0);
}

/// Azimuth/elevation pair in radians.
struct Angle2 {
  double azimuth = 0.0;
  double elevation = 0.0;
};

/// Long-term description of one propagation link: path loss (shadowing
/// included), cluster central angles, spread, Rician power split. The LoS
/// component is cluster index 0; NLoS clusters are 1..n_clusters.
struct ClusterGeometry {
  int n_clusters = 5;    // NLoS cluster count L_q
  int n_subpaths = 20;   // I
  double rice_factor = 0.0;
  bool los_only = false; // Rician factor -> infinity
  double distance_m = 0.0;
  double pathloss_db = 0.0;          // positive dB loss
  double angular_spread_rad = 0.0;
  std::vector<Angle2> aod_center;    // size n_clusters + 1, [0] = LoS
  std::vector<Angle2> aoa_center;    // only populated for BS-RIS links

  /// LoS power fraction zeta_0 = kappa / (1 + kappa).
  double zeta_los() const {
    if (los_only) return 1.0;
    return rice_factor / (1.0 + rice_factor);
  }
  /// Per-NLoS-cluster power fraction zeta_l = 1 / ((L-1)(1+kappa)).
  double zeta_nlos() const {
    if (los_only) return 0.0;
    const double denom = (n_clusters > 1 ? n_clusters - 1.0 : 1.0) * (1.0 + rice_factor);
    return 1.0 / denom;
  }
  /// Linear power gain of the link, 10^{-PL/10}.
  double linear_gain() const { return std::pow(10.0, -pathloss_db / 10.0); }
};

/// All physical and algorithmic knobs of a simulated deployment.
struct ScenarioConfig {
  int n_tx = 8;          // N
  int n_ris = 1;         // U
  int elems_per_ris = 64;  // M
  int n_users = 1;       // K

  double p_max = 1.0;        // W
  double noise_power = dbm_to_watt(-94.0);  // W per user
  double fc_ghz = 28.0;
  double sinr_threshold = rate_to_sinr_threshold(0.5);  // gamma

  BlockageModel blockage = BlockageModel::fixed_probability(0.5);

  int n_clusters = 5;
  int n_subpaths = 20;
  double angular_spread_rad = 5.0 * kPi / 180.0;
  double kappa_direct = 0.0;
  bool direct_los_only = false;

  // Fig.-2-style polar deployment: BS at origin, RISs on a circle of radius
  // ris_radius_m with polar angles spread over [0, sector_rad], users drawn
  // in [user_dist_min_m, user_dist_max_m] x [0, sector_rad].
  double ris_radius_m = 50.0;
  double user_dist_min_m = 50.0;
  double user_dist_max_m = 80.0;
  double sector_rad = kPi / 6.0;
  std::vector<double> user_distances_m;  // optional pin, size K
  std::vector<double> user_angles_rad;   // optional pin, size K

  // UMi street-canyon large-scale parameters.
  double pathloss_exp_los = 2.0;
  double pathloss_exp_nlos = 3.5;
  double shadow_sigma_los_db = 4.0;
  double shadow_sigma_nlos_db = 8.2;

  int bs_rows = 0, bs_cols = 0;    // 0 = most-square factorization
  int ris_rows = 0, ris_cols = 0;

  std::uint64_t seed = 1;

  int phase_dim() const { return n_ris * elems_per_ris + 1; }  // UM + 1

  ArrayGeometry bs_array() const {
    if (bs_rows > 0 && bs_cols > 0) {
      if (bs_rows * bs_cols != n_tx)
        throw std::invalid_argument("bs_rows * bs_cols must equal n_tx");
      return {bs_rows, bs_cols, 0.5};
    }
    return ArrayGeometry::most_square(n_tx);
  }
  ArrayGeometry ris_array() const {
    if (ris_rows > 0 && ris_cols > 0) {
      if (ris_rows * ris_cols != elems_per_ris)
        throw std::invalid_argument("ris_rows * ris_cols must equal elems_per_ris");
      return {ris_rows, ris_cols, 0.5};
    }
    return ArrayGeometry::most_square(elems_per_ris);
  }

  void validate() const {
    if (n_tx <= 0 || n_ris < 0 || elems_per_ris <= 0 || n_users <= 0)
      throw std::invalid_argument("scenario: dimensions must be positive");
    if (p_max <= 0.0 || noise_power <= 0.0)
      throw std::invalid_argument("scenario: powers must be positive");
    if (sinr_threshold <= 0.0)
      throw std::invalid_argument("scenario: SINR threshold must be positive");
    if (n_clusters < 1 || n_subpaths < 1)
      throw std::invalid_argument("scenario: cluster/subpath counts must be positive");
    if (user_dist_min_m < 1.0 || user_dist_max_m < user_dist_min_m)
      throw std::invalid_argument("scenario: bad user distance range");
    if (!user_distances_m.empty() &&
        static_cast<int>(user_distances_m.size()) != n_users)
      throw std::invalid_argument("scenario: user_distances_m size mismatch");
    if (!user_angles_rad.empty() &&
        static_cast<int>(user_angles_rad.size()) != n_users)
      throw std::invalid_argument("scenario: user_angles_rad size mismatch");
  }
};

/// UMi path loss in dB: 32.4 + 20 log10(fc) + 10 alpha log10(D) + xi,
/// xi ~ N(0, shadow_sigma_db^2). Deterministic given the rng state.
inline double pathloss_db(double fc_ghz, double distance_m, double alpha,
                          double shadow_sigma_db, Rng& rng) {
  if (fc_ghz <= 0.0) throw std::invalid_argument("pathloss_db: fc must be positive");
  if (distance_m < 1.0)
    throw std::invalid_argument("pathloss_db: distance below 1 m model domain");
  double pl = 32.4 + 20.0 * std::log10(fc_ghz) + 10.0 * alpha * std::log10(distance_m);
  if (shadow_sigma_db > 0.0) pl += shadow_sigma_db * rng.normal();
  return pl;
}

/// Long-term state drawn once per scenario: positions, path losses, cluster
/// central angles. Instantaneous fading is drawn per sample on top of this.
struct ScenarioState {
  std::vector<double> user_distance_m;   // d_k, BS-user
  std::vector<double> user_angle_rad;
  std::vector<double> ris_angle_rad;
  std::vector<double> user_block_prob;   // p_k

  std::vector<ClusterGeometry> direct;               // [k]
  std::vector<ClusterGeometry> bs_ris;               // [u]
  std::vector<std::vector<ClusterGeometry>> ris_user;  // [u][k]

  bool ris_disabled = false;  // sampling emits zero RIS channels
};

namespace detail {

inline constexpr std::uint64_t kTagPositions = 11;
inline constexpr std::uint64_t kTagAngles = 12;
inline constexpr std::uint64_t kTagShadow = 13;

inline std::vector<Angle2> draw_centers(int count, double sector_rad, Rng& rng) {
  std::vector<Angle2> c(count);
  for (auto& a : c) {
    a.azimuth = rng.uniform(0.0, sector_rad);
    a.elevation = rng.uniform(-kPi / 6.0, kPi / 6.0);
  }
  return c;
}

}  // namespace detail

/// Draws the long-term state from the scenario substream of the config seed.
inline ScenarioState build_scenario_state(const ScenarioConfig& cfg) {
  cfg.validate();
  ScenarioState st;
  Rng root = Rng(cfg.seed).fork(Stream::Scenario);

  Rng pos_rng = root.fork(detail::kTagPositions);
  st.user_distance_m.resize(cfg.n_users);
  st.user_angle_rad.resize(cfg.n_users);
  for (int k = 0; k < cfg.n_users; ++k) {
    st.user_distance_m[k] = cfg.user_distances_m.empty()
                                ? pos_rng.uniform(cfg.user_dist_min_m, cfg.user_dist_max_m)
                                : cfg.user_distances_m[k];
    st.user_angle_rad[k] = cfg.user_angles_rad.empty()
                               ? pos_rng.uniform(0.0, cfg.sector_rad)
                               : cfg.user_angles_rad[k];
  }
  st.ris_angle_rad.resize(cfg.n_ris);
  for (int u = 0; u < cfg.n_ris; ++u) {
    st.ris_angle_rad[u] =
        cfg.n_ris == 1 ? 0.0 : cfg.sector_rad * u / (cfg.n_ris - 1.0);
  }

  st.user_block_prob.resize(cfg.n_users);
  for (int k = 0; k < cfg.n_users; ++k)
    st.user_block_prob[k] = blockage_probability(cfg.blockage, st.user_distance_m[k]);

  auto polar_to_xy = [](double r, double ang) {
    return std::pair<double, double>{r * std::cos(ang), r * std::sin(ang)};
  };
  auto distance = [&](double r1, double a1, double r2, double a2) {
    auto [x1, y1] = polar_to_xy(r1, a1);
    auto [x2, y2] = polar_to_xy(r2, a2);
    return std::max(1.0, std::hypot(x1 - x2, y1 - y2));
  };

  auto make_link = [&](double dist, bool los, double kappa, double alpha,
                       double shadow_db, bool with_aoa, std::uint64_t tag) {
    ClusterGeometry g;
    g.n_clusters = cfg.n_clusters;
    g.n_subpaths = cfg.n_subpaths;
    g.los_only = los;
    g.rice_factor = kappa;
    g.distance_m = dist;
    g.angular_spread_rad = cfg.angular_spread_rad;
    Rng shadow_rng = root.fork(detail::kTagShadow, tag);
    g.pathloss_db = pathloss_db(cfg.fc_ghz, dist, alpha, shadow_db, shadow_rng);
    Rng angle_rng = root.fork(detail::kTagAngles, tag);
    g.aod_center = detail::draw_centers(cfg.n_clusters + 1, cfg.sector_rad, angle_rng);
    if (with_aoa)
      g.aoa_center = detail::draw_centers(cfg.n_clusters + 1, cfg.sector_rad, angle_rng);
    return g;
  };

  st.direct.reserve(cfg.n_users);
  for (int k = 0; k < cfg.n_users; ++k) {
    st.direct.push_back(make_link(st.user_distance_m[k], cfg.direct_los_only,
                                  cfg.kappa_direct, cfg.pathloss_exp_nlos,
                                  cfg.shadow_sigma_nlos_db, false,
                                  0x100 + static_cast<std::uint64_t>(k)));
  }
  st.bs_ris.reserve(cfg.n_ris);
  for (int u = 0; u < cfg.n_ris; ++u) {
    st.bs_ris.push_back(make_link(cfg.ris_radius_m, true, 0.0, cfg.pathloss_exp_los,
                                  cfg.shadow_sigma_los_db, true,
                                  0x200 + static_cast<std::uint64_t>(u)));
  }
  st.ris_user.resize(cfg.n_ris);
  for (int u = 0; u < cfg.n_ris; ++u) {
    st.ris_user[u].reserve(cfg.n_users);
    for (int k = 0; k < cfg.n_users; ++k) {
      const double d = distance(cfg.ris_radius_m, st.ris_angle_rad[u],
                                st.user_distance_m[k], st.user_angle_rad[k]);
      st.ris_user[u].push_back(make_link(
          d, true, 0.0, cfg.pathloss_exp_los, cfg.shadow_sigma_los_db, false,
          0x300 + static_cast<std::uint64_t>(u) * 1024 + static_cast<std::uint64_t>(k)));
    }
  }
  return st;
}

}  // namespace outmin

#endif  // OUTMIN_SCENARIO_HPP
