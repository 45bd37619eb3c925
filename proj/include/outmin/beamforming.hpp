// SPDX-License-Identifier: Apache-2.0
// ris-outmin: outage-minimizing beamforming for RIS-aided mmWave downlinks

#ifndef OUTMIN_BEAMFORMING_HPP
#define OUTMIN_BEAMFORMING_HPP

#include "outmin/common.hpp"
#include "outmin/rng.hpp"

namespace outmin {

/// Precoder F (N x K, columns f_k) and phase vector e (UM+1).
/// Feasible when ||F||_F^2 <= p_max, |e_m| = 1 for m < UM and e_{UM+1} = 1.
struct BeamformingState {
  CMat precoder;
  CVec phases;

  static BeamformingState zero(int n_tx, int n_users, int phase_dim) {
    BeamformingState s;
    s.precoder = CMat::Zero(n_tx, n_users);
    s.phases = CVec::Ones(phase_dim);
    return s;
  }
};

/// Radial projection onto the power ball ||F||_F^2 <= p_max.
inline CMat project_power(const CMat& f, double p_max) {
  const double n2 = f.squaredNorm();
  if (n2 <= p_max || n2 == 0.0) return f;
  return f * std::sqrt(p_max / n2);
}

/// Entrywise unit-modulus projection with the last entry pinned to 1.
/// Zero entries map to 1.
inline CVec project_phases(const CVec& e) {
  CVec out(e.size());
  for (Eigen::Index m = 0; m + 1 < e.size(); ++m) {
    const double mag = std::abs(e[m]);
    out[m] = mag > 0.0 ? e[m] / mag : cxd(1.0, 0.0);
  }
  out[e.size() - 1] = 1.0;
  return out;
}

inline bool precoder_feasible(const CMat& f, double p_max, double tol = 1e-9) {
  return f.squaredNorm() <= p_max * (1.0 + tol);
}

inline bool phases_feasible(const CVec& e, double tol = 1e-9) {
  for (Eigen::Index m = 0; m + 1 < e.size(); ++m)
    if (std::abs(std::abs(e[m]) - 1.0) > tol) return false;
  return std::abs(e[e.size() - 1] - cxd(1.0, 0.0)) <= tol;
}

/// Random feasible state: full-power precoder, uniform random phases.
inline BeamformingState random_state(int n_tx, int n_users, int phase_dim,
                                     double p_max, Rng& rng) {
  BeamformingState s;
  s.precoder = CMat::NullaryExpr(n_tx, n_users, [&]() { return rng.cnormal(); });
  s.precoder *= std::sqrt(p_max) / s.precoder.norm();
  s.phases = CVec(phase_dim);
  for (int m = 0; m + 1 < phase_dim; ++m) {
    const double a = rng.uniform(0.0, 2.0 * kPi);
    s.phases[m] = cxd(std::cos(a), std::sin(a));
  }
  s.phases[phase_dim - 1] = 1.0;
  return s;
}

}  // namespace outmin

#endif  // OUTMIN_BEAMFORMING_HPP
