// SPDX-License-Identifier: Apache-2.0
// ris-outmin: outage-minimizing beamforming for RIS-aided mmWave downlinks

#ifndef OUTMIN_CHANNEL_HPP
#define OUTMIN_CHANNEL_HPP

#include <cstdint>
#include <vector>

#include "outmin/common.hpp"
#include "outmin/rng.hpp"
#include "outmin/scenario.hpp"

namespace outmin {

/// UPA steering vector, element (r, c) zero-based:
/// phase = 2*pi*spacing*(r*sin(el)*cos(az) + c*sin(el)*sin(az)).
/// Entries are unit modulus; no normalization, so ||a||^2 = rows*cols.
inline CVec steering_vector(const ArrayGeometry& geom, double azimuth,
                            double elevation) {
  const double se = std::sin(elevation);
  const double kr = 2.0 * kPi * geom.element_spacing_wavelengths * se * std::cos(azimuth);
  const double kc = 2.0 * kPi * geom.element_spacing_wavelengths * se * std::sin(azimuth);
  CVec a(geom.size());
  int idx = 0;
  for (int r = 0; r < geom.rows; ++r) {
    for (int c = 0; c < geom.cols; ++c) {
      const double phase = kr * r + kc * c;
      a[idx++] = cxd(std::cos(phase), std::sin(phase));
    }
  }
  return a;
}

/// One realization of all links plus the per-user equivalent channels.
struct ChannelSample {
  std::vector<CVec> h_direct;                  // [k], length N (masked)
  std::vector<std::vector<CVec>> h_ris_user;   // [u][k], length M
  std::vector<CMat> h_bs_ris;                  // [u], M x N
  std::vector<CMat> equivalent;                // [k], (UM+1) x N
  std::vector<std::vector<std::uint8_t>> blockage_mask;  // [k], length L+1
};

/// Stacks per-user equivalent channel G_k = [diag(h_k^H) H; h_direct^H]
/// where h_k stacks the RIS-user vectors and H stacks the BS-RIS matrices.
inline CMat assemble_equivalent(const CVec& h_direct,
                                const std::vector<CVec>& h_ris_user_k,
                                const std::vector<CMat>& h_bs_ris) {
  const int n_tx = static_cast<int>(h_direct.size());
  const int n_ris = static_cast<int>(h_bs_ris.size());
  if (static_cast<int>(h_ris_user_k.size()) != n_ris)
    throw std::invalid_argument("assemble_equivalent: RIS count mismatch");
  int um = 0;
  for (int u = 0; u < n_ris; ++u) {
    if (h_bs_ris[u].cols() != n_tx)
      throw std::invalid_argument("assemble_equivalent: BS-RIS column mismatch");
    if (h_bs_ris[u].rows() != h_ris_user_k[u].size())
      throw std::invalid_argument("assemble_equivalent: RIS element mismatch");
    um += static_cast<int>(h_bs_ris[u].rows());
  }
  CMat g(um + 1, n_tx);
  int row = 0;
  for (int u = 0; u < n_ris; ++u) {
    const int m = static_cast<int>(h_bs_ris[u].rows());
    g.middleRows(row, m) =
        h_ris_user_k[u].conjugate().asDiagonal() * h_bs_ris[u];
    row += m;
  }
  g.row(um) = h_direct.adjoint();
  return g;
}

namespace detail {

inline constexpr std::uint64_t kTagDirect = 21;
inline constexpr std::uint64_t kTagBsRis = 22;
inline constexpr std::uint64_t kTagRisUser = 23;
inline constexpr std::uint64_t kTagMask = 24;

inline Angle2 jitter(const Angle2& center, double spread, Rng& rng) {
  return {center.azimuth + spread * rng.normal(),
          center.elevation + spread * rng.normal()};
}

/// SV vector link: LoS term at the central angle plus sqrt(1/(I*L)) times
/// the NLoS subpath sum. An optional mask zeroes the LoS term (bit 0) and
/// whole NLoS clusters (bits 1..L).
inline CVec draw_vector_channel(const ClusterGeometry& link,
                                const ArrayGeometry& array, Rng& rng,
                                const std::vector<std::uint8_t>* mask = nullptr) {
  const double gain = link.linear_gain();
  CVec h = CVec::Zero(array.size());
  const cxd g0 = rng.cnormal(link.zeta_los() * gain);
  if (!mask || (*mask)[0]) {
    if (link.zeta_los() > 0.0)
      h = g0 * steering_vector(array, link.aod_center[0].azimuth,
                               link.aod_center[0].elevation);
  }
  if (!link.los_only) {
    const double zl = link.zeta_nlos() * gain;
    const double scale = std::sqrt(1.0 / (link.n_subpaths * link.n_clusters));
    for (int l = 1; l <= link.n_clusters; ++l) {
      CVec cluster = CVec::Zero(array.size());
      for (int i = 0; i < link.n_subpaths; ++i) {
        const cxd g = rng.cnormal(zl);
        const Angle2 ang = jitter(link.aod_center[l], link.angular_spread_rad, rng);
        cluster += g * steering_vector(array, ang.azimuth, ang.elevation);
      }
      if (!mask || (*mask)[l]) h += scale * cluster;
    }
  }
  return h;
}

/// SV matrix link (BS-RIS): rank-one terms a_rx(AoA) a_tx(AoD)^H.
inline CMat draw_matrix_channel(const ClusterGeometry& link,
                                const ArrayGeometry& rx_array,
                                const ArrayGeometry& tx_array, Rng& rng) {
  const double gain = link.linear_gain();
  CMat h = CMat::Zero(rx_array.size(), tx_array.size());
  const cxd g0 = rng.cnormal(link.zeta_los() * gain);
  if (link.zeta_los() > 0.0) {
    h = g0 * (steering_vector(rx_array, link.aoa_center[0].azimuth,
                              link.aoa_center[0].elevation) *
              steering_vector(tx_array, link.aod_center[0].azimuth,
                              link.aod_center[0].elevation)
                  .adjoint());
  }
  if (!link.los_only) {
    const double zl = link.zeta_nlos() * gain;
    const double scale = std::sqrt(1.0 / (link.n_subpaths * link.n_clusters));
    for (int l = 1; l <= link.n_clusters; ++l) {
      for (int i = 0; i < link.n_subpaths; ++i) {
        const cxd g = rng.cnormal(zl);
        const Angle2 aoa = jitter(link.aoa_center[l], link.angular_spread_rad, rng);
        const Angle2 aod = jitter(link.aod_center[l], link.angular_spread_rad, rng);
        h += (scale * g) *
             (steering_vector(rx_array, aoa.azimuth, aoa.elevation) *
              steering_vector(tx_array, aod.azimuth, aod.elevation).adjoint());
      }
    }
  }
  return h;
}

}  // namespace detail

/// Draws one instantaneous realization of all links. Blockage masks apply to
/// the direct links only; a mask bit drawn as (uniform >= p_k) is 1 when the
/// cluster is unblocked, so larger p_k blocks monotonically more clusters
/// under a shared rng stream. Each link consumes an independent fork of the
/// sample rng, so scenario variants that drop links leave the rest unchanged.
inline ChannelSample sample_channel(const ScenarioConfig& cfg,
                                    const ScenarioState& st, const Rng& sample_rng) {
  const ArrayGeometry bs = cfg.bs_array();
  const ArrayGeometry ris = cfg.ris_array();
  const int n_users = cfg.n_users;
  const int n_ris = cfg.n_ris;

  ChannelSample s;
  s.h_direct.resize(n_users);
  s.blockage_mask.resize(n_users);
  s.h_bs_ris.resize(n_ris);
  s.h_ris_user.assign(n_ris, std::vector<CVec>(n_users));
  s.equivalent.resize(n_users);

  for (int k = 0; k < n_users; ++k) {
    Rng mask_rng = sample_rng.fork(detail::kTagMask, k);
    auto& mask = s.blockage_mask[k];
    mask.resize(st.direct[k].n_clusters + 1);
    for (auto& bit : mask)
      bit = mask_rng.uniform() >= st.user_block_prob[k] ? 1 : 0;
    Rng link_rng = sample_rng.fork(detail::kTagDirect, k);
    s.h_direct[k] = detail::draw_vector_channel(st.direct[k], bs, link_rng, &mask);
  }

  for (int u = 0; u < n_ris; ++u) {
    if (st.ris_disabled) {
      s.h_bs_ris[u] = CMat::Zero(ris.size(), bs.size());
      for (int k = 0; k < n_users; ++k)
        s.h_ris_user[u][k] = CVec::Zero(ris.size());
      continue;
    }
    Rng link_rng = sample_rng.fork(detail::kTagBsRis, u);
    s.h_bs_ris[u] = detail::draw_matrix_channel(st.bs_ris[u], ris, bs, link_rng);
    for (int k = 0; k < n_users; ++k) {
      Rng ru = sample_rng.fork(detail::kTagRisUser, u * 1024 + k);
      s.h_ris_user[u][k] = detail::draw_vector_channel(st.ris_user[u][k], ris, ru);
    }
  }

  for (int k = 0; k < n_users; ++k) {
    std::vector<CVec> per_user(n_ris);
    for (int u = 0; u < n_ris; ++u) per_user[u] = s.h_ris_user[u][k];
    s.equivalent[k] = assemble_equivalent(s.h_direct[k], per_user, s.h_bs_ris);
  }
  return s;
}

}  // namespace outmin

#endif  // OUTMIN_CHANNEL_HPP
