// SPDX-License-Identifier: Apache-2.0
// ris-outmin: outage-minimizing beamforming for RIS-aided mmWave downlinks

#ifndef OUTMIN_SSCA_HPP
#define OUTMIN_SSCA_HPP

#include <chrono>
#include <vector>

#include "outmin/beamforming.hpp"
#include "outmin/channel.hpp"
#include "outmin/objective.hpp"
#include "outmin/scenario.hpp"
#include "outmin/smm.hpp"
#include "outmin/solver.hpp"

namespace outmin {

/// Proximal surrogate coefficients of one sample for the F update:
/// 2 Re{Tr(P^H F)} + (tau/2)||F||_F^2 + constant.
struct FProximal {
  CMat p;
  double tau = 0.0;
  double constant = 0.0;
};

/// Linear surrogate on the phase set: 2 Re{p^H e} + constant.
struct EProximal {
  CVec p;
  double constant = 0.0;
};

/// Streaming sums defining the SSCA subproblems at iteration n.
struct SscaAccumulator {
  int n = 0;
  CMat sum_p_f;
  CVec sum_p_e;
  double sum_tau = 0.0;
  double sum_const_f = 0.0;
  double sum_const_e = 0.0;

  void init(int n_tx, int n_users, int phase_dim) {
    n = 0;
    sum_tau = sum_const_f = sum_const_e = 0.0;
    sum_p_f = CMat::Zero(n_tx, n_users);
    sum_p_e = CVec::Zero(phase_dim);
  }
};

/// F-side proximal surrogate around (f_prev, e): P = W - (tau/2) F_prev with
/// W the conjugate gradient of the smoothed objective at F_prev.
inline FProximal ssca_precoder_params(const CMat& f_prev, const CVec& e,
                                      const ChannelSample& sample,
                                      const SmoothingParams& sp, double tau) {
  FProximal out;
  const CMat w = gradient_precoder(f_prev, e, sample, sp);
  out.tau = tau;
  out.p = w - (tau / 2.0) * f_prev;
  out.constant = smoothed_objective(f_prev, e, sample, sp) +
                 (tau / 2.0) * f_prev.squaredNorm() - real_inner(w, f_prev);
  return out;
}

/// e-side proximal surrogate around (f, e_prev); the quadratic term is
/// constant on the phase set and folded into the constant.
inline EProximal ssca_phase_params(const CMat& f, const CVec& e_prev,
                                   const ChannelSample& sample,
                                   const SmoothingParams& sp, double tau) {
  EProximal out;
  const CVec w = gradient_phases(f, e_prev, sample, sp);
  out.p = w - (tau / 2.0) * e_prev;
  out.constant = smoothed_objective(f, e_prev, sample, sp) +
                 tau * static_cast<double>(e_prev.size()) - real_inner(w, e_prev);
  return out;
}

/// Closed-form minimizer of the accumulated F subproblem: -2 sum(P)/sum(tau)
/// when inside the power ball, otherwise the rescaled boundary point.
inline CMat solve_precoder_subproblem(const SscaAccumulator& acc, double p_max) {
  return minimize_linear_quadratic_ball(acc.sum_p_f, acc.sum_tau / 2.0, p_max);
}

/// Closed-form minimizer of the accumulated e subproblem on the phase set.
inline CVec solve_phase_subproblem_ssca(
    const SscaAccumulator& acc, PhaseMinimizer form = PhaseMinimizer::Elementwise) {
  return solve_phase_subproblem(acc.sum_p_e, form);
}

/// Randomized max-min phase initialization: scores `trials` random feasible
/// candidates by min_k ||e^H G_k||^2, keeps the best, then runs one exact
/// coordinate pass. Per coordinate each user's gain is a sinusoid of the
/// phase, so the max-min over users is attained at a sinusoid peak or a
/// pairwise crossing; all of those are enumerated in closed form.
inline CVec init_phases(const ChannelSample& s0, int trials, Rng& rng) {
  if (trials < 1) throw std::invalid_argument("init_phases: trials must be >= 1");
  const int n_users = static_cast<int>(s0.equivalent.size());
  const int dim = static_cast<int>(s0.equivalent[0].rows());

  auto score = [&](const CVec& e) {
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < n_users; ++k)
      best = std::min(best, (e.adjoint() * s0.equivalent[k]).squaredNorm());
    return best;
  };

  CVec best_e;
  double best_score = -1.0;
  for (int t = 0; t < trials; ++t) {
    CVec e(dim);
    for (int m = 0; m + 1 < dim; ++m) {
      const double a = rng.uniform(0.0, 2.0 * kPi);
      e[m] = cxd(std::cos(a), std::sin(a));
    }
    e[dim - 1] = 1.0;
    const double sc = score(e);
    if (sc > best_score) {
      best_score = sc;
      best_e = e;
    }
  }

  // Coordinate pass; rows_k tracks e^H G_k incrementally. With e_m = e^{j a},
  // user k's gain is D_k + 2 |c_k| cos(a - psi_k).
  std::vector<Eigen::RowVectorXcd> rows(n_users);
  for (int k = 0; k < n_users; ++k)
    rows[k] = best_e.adjoint() * s0.equivalent[k];
  for (int m = 0; m + 1 < dim; ++m) {
    std::vector<double> d0(n_users), amp(n_users), psi(n_users);
    for (int k = 0; k < n_users; ++k) {
      const Eigen::RowVectorXcd gk = s0.equivalent[k].row(m);
      const Eigen::RowVectorXcd rest = rows[k] - std::conj(best_e[m]) * gk;
      const cxd c = (gk * rest.adjoint()).value();  // value: D + 2 Re{z* c}
      d0[k] = rest.squaredNorm() + gk.squaredNorm();
      amp[k] = std::abs(c);
      psi[k] = std::arg(c);
    }
    auto min_gain = [&](double a) {
      double v = std::numeric_limits<double>::infinity();
      for (int k = 0; k < n_users; ++k)
        v = std::min(v, d0[k] + 2.0 * amp[k] * std::cos(a - psi[k]));
      return v;
    };
    std::vector<double> angles;
    angles.reserve(2 + n_users + n_users * n_users);
    angles.push_back(std::arg(best_e[m]));
    for (int k = 0; k < n_users; ++k) angles.push_back(psi[k]);  // peaks
    for (int i = 0; i < n_users; ++i) {
      for (int j = i + 1; j < n_users; ++j) {
        // Crossing: 2 amp_i cos(a - psi_i) - 2 amp_j cos(a - psi_j) = d0_j - d0_i.
        const double ca = 2.0 * (amp[i] * std::cos(psi[i]) - amp[j] * std::cos(psi[j]));
        const double cb = 2.0 * (amp[i] * std::sin(psi[i]) - amp[j] * std::sin(psi[j]));
        const double rhs = d0[j] - d0[i];
        const double mag = std::hypot(ca, cb);
        if (mag > 0.0 && std::abs(rhs) <= mag) {
          const double base = std::atan2(cb, ca);
          const double off = std::acos(std::clamp(rhs / mag, -1.0, 1.0));
          angles.push_back(base + off);
          angles.push_back(base - off);
        }
      }
    }
    double best_angle = angles[0];
    double best_val = -std::numeric_limits<double>::infinity();
    for (double a : angles) {
      const double v = min_gain(a);
      if (v > best_val) {
        best_val = v;
        best_angle = a;
      }
    }
    const cxd z(std::cos(best_angle), std::sin(best_angle));
    for (int k = 0; k < n_users; ++k)
      rows[k] += (std::conj(z) - std::conj(best_e[m])) *
                 Eigen::RowVectorXcd(s0.equivalent[k].row(m));
    best_e[m] = z;
  }
  return best_e;
}

/// Per-user maximum-ratio transmission columns with an equal power split:
/// f_k = sqrt(p_max/K) G_k^H e / ||G_k^H e||; the Frobenius norm is exactly
/// sqrt(p_max). Users with a vanishing effective channel get a random
/// unit column.
inline CMat init_precoder(const ChannelSample& s0, const CVec& e0, double p_max,
                          Rng& rng) {
  const int n_users = static_cast<int>(s0.equivalent.size());
  const int n_tx = static_cast<int>(s0.equivalent[0].cols());
  CMat f(n_tx, n_users);
  const double col_power = std::sqrt(p_max / n_users);
  for (int k = 0; k < n_users; ++k) {
    CVec v = s0.equivalent[k].adjoint() * e0;
    double nv = v.norm();
    if (nv == 0.0) {
      v = CVec::NullaryExpr(n_tx, [&]() { return rng.cnormal(); });
      nv = v.norm();
    }
    f.col(k) = (col_power / nv) * v;
  }
  return f;
}

struct SscaOptions {
  StoppingRule stop;
  StepSizeRule rule_f;
  StepSizeRule rule_e;
  PhaseMinimizer phase_min = PhaseMinimizer::Elementwise;
  double tau = 0.0;  // 0 = calibrate to the initial gradient scale
  bool optimize_phases = true;
  bool track_diagnostics = false;
  double theta_override = 0.0;
  double mu_override = 0.0;  // 0 = 1/(100K)
};

namespace detail {

/// The proximal weight must live on the scale of the objective's gradients,
/// which depends on channel magnitudes through theta; a fixed weight either
/// freezes the iterate or lets it thrash. Calibrated as a small fraction of
/// the initial gradient-to-power ratio so the subproblem is gradient-driven.
inline double calibrate_tau(const ScenarioConfig& cfg, const ScenarioState& st,
                            const BeamformingState& init,
                            const SmoothingParams& sp, const Rng& solver_rng,
                            double override_value) {
  if (override_value > 0.0) return override_value;
  const ChannelSample s0 =
      sample_channel(cfg, st, solver_rng.fork(kTagCalibration));
  const double grad_norm = gradient_precoder(init.precoder, init.phases, s0, sp).norm();
  const double scale = grad_norm / (10.0 * std::sqrt(cfg.p_max));
  return scale > 0.0 ? scale : 1.0;
}

}  // namespace detail

/// Multiuser SSCA-OutMin: softmax-weighted proximal surrogates, closed-form
/// subproblem solutions, Armijo-damped updates, entrywise renormalization of
/// the phase iterate.
inline std::pair<BeamformingState, RunTrace> run_ssca_outmin(
    const ScenarioConfig& cfg, const ScenarioState& st,
    const BeamformingState& init, const SscaOptions& opt, const Rng& solver_rng) {
  using clock = std::chrono::steady_clock;
  SmoothingParams sp;
  sp.gamma = cfg.sinr_threshold;
  sp.sigma2 = cfg.noise_power;
  sp.mu = opt.mu_override > 0.0 ? opt.mu_override : 1.0 / (100.0 * cfg.n_users);
  sp.theta = detail::calibrate_theta(cfg, st, init, solver_rng, opt.theta_override);
  const double tau = detail::calibrate_tau(cfg, st, init, sp, solver_rng, opt.tau);

  CMat f = init.precoder;
  CVec e = init.phases;
  SscaAccumulator acc;
  acc.init(cfg.n_tx, cfg.n_users, cfg.phase_dim());

  RunTrace trace;
  trace.theta = sp.theta;
  trace.mu = sp.mu;
  trace.rows.reserve(opt.stop.max_iter);

  std::vector<ChannelSample> history;  // diagnostics only
  int calm = 0;

  for (int n = 1; n <= opt.stop.max_iter; ++n) {
    const auto t0 = clock::now();
    const ChannelSample sample = sample_channel(cfg, st, solver_rng.fork(n));
    const auto t1 = clock::now();

    // F update.
    const CMat w_f = gradient_precoder(f, e, sample, sp);
    FProximal pf;
    pf.tau = tau;
    pf.p = w_f - (tau / 2.0) * f;
    pf.constant = smoothed_objective(f, e, sample, sp) +
                  (tau / 2.0) * f.squaredNorm() - real_inner(w_f, f);
    acc.n += 1;
    acc.sum_p_f += pf.p;
    acc.sum_tau += pf.tau;
    acc.sum_const_f += pf.constant;
    const CMat f_hat = solve_precoder_subproblem(acc, cfg.p_max);
    auto obj_in_f = [&](const CMat& x) {
      return smoothed_objective(x, e, sample, sp);
    };
    const double xi_f = armijo_step(f, f_hat, obj_in_f, w_f, opt.rule_f);
    const CMat f_new = xi_f > 0.0 ? CMat(f + xi_f * (f_hat - f)) : f;

    // e update at the fresh precoder.
    CVec e_new = e;
    double xi_e = 0.0;
    if (opt.optimize_phases) {
      const CVec w_e = gradient_phases(f_new, e, sample, sp);
      EProximal pe;
      pe.p = w_e - (tau / 2.0) * e;
      pe.constant = smoothed_objective(f_new, e, sample, sp) +
                    tau * static_cast<double>(e.size()) - real_inner(w_e, e);
      acc.sum_p_e += pe.p;
      acc.sum_const_e += pe.constant;
      const CVec e_hat = solve_phase_subproblem_ssca(acc, opt.phase_min);
      auto obj_in_e = [&](const CVec& x) {
        return smoothed_objective(f_new, x, sample, sp);
      };
      xi_e = armijo_step(e, e_hat, obj_in_e, w_e, opt.rule_e);
      if (xi_e > 0.0) e_new = project_phases(CVec(e + xi_e * (e_hat - e)));
    }
    const auto t2 = clock::now();

    TraceRow row;
    row.iter = n;
    row.objective_f =
        (real_inner(acc.sum_p_f, f_new) + 0.5 * acc.sum_tau * f_new.squaredNorm() +
         acc.sum_const_f) /
        acc.n;
    row.objective_e =
        (real_inner(acc.sum_p_e, e_new) + acc.sum_const_e) / acc.n;
    row.step_f = xi_f;
    row.step_e = xi_e;
    row.subproblem_dist = (f_hat - f).norm();
    row.wall_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(t2 - t0).count();
    row.opt_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(t2 - t1).count();

    if (opt.track_diagnostics) {
      history.push_back(sample);
      double true_avg = 0.0;
      for (const auto& s : history)
        true_avg += smoothed_objective(f_new, e_new, s, sp);
      row.gap_f = std::abs(row.objective_f - true_avg / acc.n);
    }
    trace.rows.push_back(row);

    const double delta_f = (f_new - f).norm();
    const double delta_e = (e_new - e).norm();
    f = f_new;
    e = e_new;
    const bool settled = delta_f < opt.stop.tol && delta_e < opt.stop.tol;
    calm = settled ? calm + 1 : 0;
    if (calm >= opt.stop.patience) break;
  }

  BeamformingState out;
  out.precoder = f;
  out.phases = e;
  return {out, trace};
}

}  // namespace outmin

#endif  // OUTMIN_SSCA_HPP
