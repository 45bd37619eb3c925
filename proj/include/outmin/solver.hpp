// SPDX-License-Identifier: Apache-2.0
// ris-outmin: outage-minimizing beamforming for RIS-aided mmWave downlinks

#ifndef OUTMIN_SOLVER_HPP
#define OUTMIN_SOLVER_HPP

#include <cstdint>
#include <vector>

#include "outmin/common.hpp"

namespace outmin {

/// Stop when the tracked objective change stays below tol for `patience`
/// consecutive iterations, or at max_iter.
struct StoppingRule {
  double tol = 1e-4;
  int patience = 50;
  int max_iter = 1000;
};

/// Armijo backtracking rule: largest xi in {xi0 * c2^t} satisfying the
/// sufficient-decrease inequality.
struct StepSizeRule {
  double xi0 = 1.0;
  double c1 = 0.01;
  double c2 = 0.5;
  int max_backtracks = 30;
};

/// Which minimizer of min 2Re{d^H e} over the unit-modulus set to use.
/// Elementwise is the separable optimum e_m = -exp(j angle(d_m)); Rotated
/// divides by the last entry before taking phases.
enum class PhaseMinimizer { Elementwise, Rotated };

struct SquaremOptions {
  bool paper_form = false;  // negate the extrapolated point, literal guard
  int max_backtracks = 20;
};

/// Per-iteration record for convergence diagnostics and CSV export.
struct TraceRow {
  int iter = 0;
  double objective_f = 0.0;  // averaged surrogate value after the F update
  double objective_e = 0.0;  // averaged surrogate value after the e update
  double step_f = 0.0;       // SQUAREM omega or Armijo xi
  double step_e = 0.0;
  std::int64_t wall_ns = 0;  // full iteration
  std::int64_t opt_ns = 0;   // excluding channel generation
  double gap_f = 0.0;        // |avg surrogate - avg true objective| at iterate
  double gap_e = 0.0;
  double subproblem_dist = 0.0;  // ||x_hat - x_prev|| of the F subproblem
};

struct RunTrace {
  std::vector<TraceRow> rows;
  double theta = 0.0;
  double mu = 0.0;
};

/// Minimizer of 2Re{<D, X>} + alpha ||X||^2 over ||X||^2 <= p_max.
/// Returns -D/alpha when interior, otherwise the boundary point -sqrt(p_max)
/// D/||D||. Zero D and alpha yield the zero matrix.
template <typename X>
X minimize_linear_quadratic_ball(const X& d, double alpha, double p_max) {
  const double dnorm2 = d.squaredNorm();
  if (dnorm2 == 0.0) return X::Zero(d.rows(), d.cols());
  if (alpha > 0.0 && dnorm2 / (alpha * alpha) <= p_max) return X(-d / alpha);
  return X(-std::sqrt(p_max / dnorm2) * d);
}

/// Minimizer of 2Re{d^H e} subject to |e_m| = 1 (m < dim-1), e_{dim-1} = 1.
/// Entries of d equal to zero map to 1 (objective is indifferent).
inline CVec solve_phase_subproblem(const CVec& d,
                                   PhaseMinimizer form = PhaseMinimizer::Elementwise) {
  const Eigen::Index dim = d.size();
  CVec e(dim);
  if (form == PhaseMinimizer::Rotated && std::abs(d[dim - 1]) > 0.0) {
    const cxd pivot = d[dim - 1];
    for (Eigen::Index m = 0; m < dim; ++m) {
      const cxd r = d[m] / pivot;
      const double mag = std::abs(r);
      e[m] = mag > 0.0 ? r / mag : cxd(1.0, 0.0);
    }
    e[dim - 1] = 1.0;
    return e;
  }
  for (Eigen::Index m = 0; m + 1 < dim; ++m) {
    const double mag = std::abs(d[m]);
    e[m] = mag > 0.0 ? -d[m] / mag : cxd(1.0, 0.0);
  }
  e[dim - 1] = 1.0;
  return e;
}

/// Objective history needed by the paper-form SQUAREM guard.
struct SquaremGuard {
  double obj_prev = 0.0;       // objective value at iteration n-1
  double obj_prev_prev = 0.0;  // at n-2
  int recorded = 0;
};

/// One SQUAREM-accelerated step of the fixed-point map. Computes the squared
/// extrapolation of two map applications, projects it back to the feasible
/// set, and backtracks omega toward -1 (the plain double step) while the
/// acceptance guard fails. Falls back to the unaccelerated x2 at the cap.
/// The projector receives the extrapolated point and x2 (the power-set
/// projector rescales to ||x2||).
template <typename X, typename MapFn, typename ProjFn, typename ObjFn>
X squarem_step(const X& x_prev, MapFn&& map, ProjFn&& project, ObjFn&& objective,
               const SquaremOptions& opt, const SquaremGuard& guard,
               double* omega_used = nullptr) {
  if (omega_used) *omega_used = 0.0;
  const X x1 = map(x_prev);
  const X x2 = map(x1);
  const X j1 = x1 - x_prev;
  const X j2 = x2 - x1 - j1;
  const double n1 = j1.norm();
  const double n2 = j2.norm();
  if (n2 == 0.0) return x2;

  double omega = -n1 / n2;
  const double obj_base = objective(x_prev);
  for (int t = 0; t <= opt.max_backtracks; ++t) {
    X y = x_prev - 2.0 * omega * j1 + omega * omega * j2;
    if (opt.paper_form) y = -y;
    const X cand = project(y, x2);
    const double obj_cand = objective(cand);
    bool accept;
    if (opt.paper_form && guard.recorded >= 2) {
      accept = std::abs(obj_cand - guard.obj_prev) >
               std::abs(guard.obj_prev - guard.obj_prev_prev);
    } else {
      accept = obj_cand <= obj_base;
    }
    if (accept) {
      if (omega_used) *omega_used = omega;
      return cand;
    }
    omega = (omega - 1.0) / 2.0;
  }
  if (omega_used) *omega_used = -1.0;
  return x2;
}

/// Largest xi in {xi0 * c2^t, t <= max_backtracks} with
/// objective(x + xi (x_hat - x)) <= objective(x) + c1 xi <grad, x_hat - x>.
/// Returns 0 when no step qualifies (e.g. ascent directions).
template <typename X, typename ObjFn>
double armijo_step(const X& x_prev, const X& x_hat, ObjFn&& objective,
                   const X& gradient, const StepSizeRule& rule) {
  const X dir = x_hat - x_prev;
  const double slope = real_inner(gradient, dir);
  const double f0 = objective(x_prev);
  double xi = rule.xi0;
  for (int t = 0; t <= rule.max_backtracks; ++t) {
    if (objective(X(x_prev + xi * dir)) <= f0 + rule.c1 * xi * slope) return xi;
    xi *= rule.c2;
  }
  return 0.0;
}

}  // namespace outmin

#endif  // OUTMIN_SOLVER_HPP
