// SPDX-License-Identifier: Apache-2.0
// ris-outmin: outage-minimizing beamforming for RIS-aided mmWave downlinks
//
// Test-only oracles, independent of the implementation paths they check:
// finite differences, power iteration, projected gradient descent, phase
// grid search, and direct evaluation of the composite signal model.

#ifndef OUTMIN_TESTS_ORACLES_HPP
#define OUTMIN_TESTS_ORACLES_HPP

#include <functional>
#include <vector>

#include "outmin/beamforming.hpp"
#include "outmin/channel.hpp"
#include "outmin/objective.hpp"
#include "outmin/rng.hpp"

namespace oracles {

using outmin::CMat;
using outmin::CVec;
using outmin::cxd;

/// Central finite-difference conjugate gradient of a real function of a
/// complex matrix: grad_m = (d/dRe + j d/dIm)/2.
template <typename Fn>
CMat fd_gradient(Fn&& fn, const CMat& z, double h = 1e-5) {
  CMat g(z.rows(), z.cols());
  CMat zp = z;
  for (Eigen::Index j = 0; j < z.cols(); ++j) {
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
      const cxd orig = z(i, j);
      zp(i, j) = orig + h;
      const double fre_p = fn(zp);
      zp(i, j) = orig - h;
      const double fre_m = fn(zp);
      zp(i, j) = orig + cxd(0.0, h);
      const double fim_p = fn(zp);
      zp(i, j) = orig - cxd(0.0, h);
      const double fim_m = fn(zp);
      zp(i, j) = orig;
      const double dre = (fre_p - fre_m) / (2.0 * h);
      const double dim = (fim_p - fim_m) / (2.0 * h);
      g(i, j) = cxd(dre / 2.0, dim / 2.0);
    }
  }
  return g;
}

/// Largest eigenvalue of a Hermitian matrix by shifted power iteration.
/// The Rayleigh quotient never overshoots lambda_max, so dominance
/// assertions cannot falsely fail from unconverged iterations.
inline double lambda_max_power_iteration(const CMat& h, int iters = 3000) {
  const double shift = h.norm() + 1.0;
  const CMat a = h + shift * CMat::Identity(h.rows(), h.cols());
  outmin::Rng rng(12345);
  CVec v = CVec::NullaryExpr(h.rows(), [&]() { return rng.cnormal(); });
  v.normalize();
  for (int i = 0; i < iters; ++i) {
    v = a * v;
    v.normalize();
  }
  const double rq = (v.adjoint() * a * v).value().real();
  return rq - shift;
}

/// Explicit 2N x 2N curvature matrix of the single-user smoothed objective
/// along the segment f_prev + xi (f_tilde - f_prev): the quadratic form in
/// [t; t*] whose value is the exact second directional derivative.
inline CMat curvature_matrix(const CVec& f_prev, const CVec& f_tilde, double xi,
                             const CMat& g, const CVec& e, double theta,
                             double gamma, double sigma2) {
  const int n = static_cast<int>(f_prev.size());
  const CVec ge = g.adjoint() * e;
  const CMat a = ge * ge.adjoint();  // G^H e e^H G
  const CVec fx = f_prev + xi * (f_tilde - f_prev);
  const CVec q = a * fx;
  const double l = gamma * sigma2 - std::norm(ge.dot(fx));
  const double u = outmin::sigmoid(l, theta);
  const double gl = theta * u * (1.0 - u);  // sigmoid slope at l
  const double expl = std::exp(-theta * l) > 1e300 ? 1e300 : std::exp(-theta * l);
  const double coeff = gl * (2.0 * (1.0 + expl) * gl - theta);

  CVec stacked(2 * n);
  stacked.head(n) = q;
  stacked.tail(n) = q.conjugate();
  CMat phi = coeff * (stacked * stacked.adjoint());
  phi.topLeftCorner(n, n) -= gl * a;
  phi.bottomRightCorner(n, n) -= gl * a.conjugate();
  return phi;
}

/// Projected gradient descent for min 2Re{<d, x>} + alpha ||x||^2 over the
/// ball ||x||_F^2 <= p_max.
template <typename X>
X pgd_ball_oracle(const X& d, double alpha, double p_max, int iters = 20000) {
  X x = X::Zero(d.rows(), d.cols());
  const double dnorm = d.norm();
  const double step = 1.0 / (2.0 * alpha + 2.0 * dnorm / std::sqrt(p_max) + 1e-12);
  for (int i = 0; i < iters; ++i) {
    x -= step * (d + alpha * x);
    const double n2 = x.squaredNorm();
    if (n2 > p_max) x *= std::sqrt(p_max / n2);
  }
  return x;
}

/// Exhaustive per-element phase grid search for min 2Re{d^H e} on the phase
/// set (last entry pinned to 1). Exponential in the free dimension.
inline CVec phase_grid_oracle(const CVec& d, int points_per_element) {
  const int dim = static_cast<int>(d.size());
  const int free = dim - 1;
  CVec e = CVec::Ones(dim);
  CVec best = e;
  double best_val = std::numeric_limits<double>::infinity();
  std::vector<int> idx(free, 0);
  while (true) {
    for (int m = 0; m < free; ++m) {
      const double a = 2.0 * outmin::kPi * idx[m] / points_per_element;
      e[m] = cxd(std::cos(a), std::sin(a));
    }
    const double val = outmin::real_inner(d, e);
    if (val < best_val) {
      best_val = val;
      best = e;
    }
    int carry = 0;
    while (carry < free && ++idx[carry] == points_per_element) {
      idx[carry] = 0;
      ++carry;
    }
    if (carry == free) break;
  }
  return best;
}

/// Composite received gain (h_b^H + sum_u h_u^H E_u H_u) f evaluated from
/// the raw links, with E_u the diagonal of the matching phase segment.
inline cxd composite_gain(const CVec& h_direct,
                          const std::vector<CVec>& h_ris_user,
                          const std::vector<CMat>& h_bs_ris, const CVec& e,
                          const CVec& f) {
  Eigen::RowVectorXcd row = h_direct.adjoint();
  int offset = 0;
  for (size_t u = 0; u < h_bs_ris.size(); ++u) {
    const int m = static_cast<int>(h_bs_ris[u].rows());
    const CVec seg = e.segment(offset, m);
    row += h_ris_user[u].adjoint() * seg.conjugate().asDiagonal() * h_bs_ris[u];
    offset += m;
  }
  return (row * f).value();
}

/// Deterministic random complex matrix with entries of unit scale.
inline CMat random_matrix(int rows, int cols, outmin::Rng& rng) {
  return CMat::NullaryExpr(rows, cols, [&]() { return rng.cnormal(); });
}

inline CVec random_vector(int n, outmin::Rng& rng) {
  return CVec::NullaryExpr(n, [&]() { return rng.cnormal(); });
}

/// Random feasible phase vector (unit modulus, last entry 1).
inline CVec random_phases(int dim, outmin::Rng& rng) {
  CVec e(dim);
  for (int m = 0; m + 1 < dim; ++m) {
    const double a = rng.uniform(0.0, 2.0 * outmin::kPi);
    e[m] = cxd(std::cos(a), std::sin(a));
  }
  e[dim - 1] = 1.0;
  return e;
}

}  // namespace oracles

#endif  // OUTMIN_TESTS_ORACLES_HPP
