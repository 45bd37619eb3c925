// SPDX-License-Identifier: Apache-2.0
// ris-outmin: outage-minimizing beamforming for RIS-aided mmWave downlinks

#ifndef OUTMIN_SMM_HPP
#define OUTMIN_SMM_HPP

#include <chrono>
#include <vector>

#include "outmin/beamforming.hpp"
#include "outmin/channel.hpp"
#include "outmin/objective.hpp"
#include "outmin/scenario.hpp"
#include "outmin/solver.hpp"

namespace outmin {

/// Quadratic upper-bound surrogate of the single-user smoothed indicator in
/// f around f_prev: 2 Re{d^H f} + alpha ||f||^2 + constant.
struct FSurrogate {
  CVec d;
  double alpha = 0.0;
  double constant = 0.0;
};

/// Linear surrogate in e on the unit-modulus set: 2 Re{d^H e} + constant.
struct ESurrogate {
  CVec d;
  double constant = 0.0;
};

/// Streaming sums defining the deterministic subproblems of iteration n.
struct SmmAccumulator {
  int n = 0;
  double sum_alpha_f = 0.0;
  CVec sum_d_f;
  double sum_const_f = 0.0;
  CVec sum_d_e;
  double sum_const_e = 0.0;

  void init(int n_tx, int phase_dim) {
    n = 0;
    sum_alpha_f = sum_const_f = sum_const_e = 0.0;
    sum_d_f = CVec::Zero(n_tx);
    sum_d_e = CVec::Zero(phase_dim);
  }
  void add(const FSurrogate& pf, const ESurrogate& pe) {
    ++n;
    sum_alpha_f += pf.alpha;
    sum_d_f += pf.d;
    sum_const_f += pf.constant;
    sum_d_e += pe.d;
    sum_const_e += pe.constant;
  }
};

/// Surrogate coefficients for the f update around (f_prev, e_prev):
/// x = gamma sigma^2 - |e^H G f_prev|^2,
/// m = -u'(x) G^H e e^H G f_prev,
/// alpha = (theta^2/2) p_max ||G^H e||^4, d = m - alpha f_prev.
inline FSurrogate f_surrogate_params(const CVec& f_prev, const CVec& e_prev,
                                     const CMat& g, double theta, double gamma,
                                     double sigma2, double p_max) {
  const CVec ge = g.adjoint() * e_prev;
  const cxd s = ge.dot(f_prev);  // e^H G f
  const double x = gamma * sigma2 - std::norm(s);
  const double slope = -sigmoid_derivative(x, theta);
  FSurrogate p;
  const CVec m = slope * s * ge;
  const double ge2 = ge.squaredNorm();
  p.alpha = 0.5 * theta * theta * p_max * ge2 * ge2;
  p.d = m - p.alpha * f_prev;
  p.constant = sigmoid(x, theta) + p.alpha * f_prev.squaredNorm() -
               real_inner(m, f_prev);
  return p;
}

/// Surrogate coefficients for the e update around (f, e_prev):
/// m = -u'(x) G f f^H G^H e_prev, alpha = (theta^2/2)(UM+1) ||G f||^4,
/// d = m - alpha e_prev. The quadratic term is constant on the feasible set
/// and is folded into the constant.
inline ESurrogate e_surrogate_params(const CVec& f, const CVec& e_prev,
                                     const CMat& g, double theta, double gamma,
                                     double sigma2) {
  const CVec gf = g * f;
  const cxd s = e_prev.dot(gf);  // e^H G f
  const double x = gamma * sigma2 - std::norm(s);
  const double slope = -sigmoid_derivative(x, theta);
  const double dim = static_cast<double>(e_prev.size());
  const double gf2 = gf.squaredNorm();
  const double alpha = 0.5 * theta * theta * dim * gf2 * gf2;
  const CVec m = slope * std::conj(s) * gf;
  ESurrogate p;
  p.d = m - alpha * e_prev;
  p.constant = sigmoid(x, theta) + 2.0 * dim * alpha - real_inner(m, e_prev);
  return p;
}

/// Closed-form minimizer of the accumulated f subproblem over the power ball.
inline CVec solve_f_subproblem(const SmmAccumulator& acc, double p_max) {
  return minimize_linear_quadratic_ball(acc.sum_d_f, acc.sum_alpha_f, p_max);
}

/// Closed-form minimizer of the accumulated e subproblem on the phase set.
inline CVec solve_e_subproblem(const SmmAccumulator& acc,
                               PhaseMinimizer form = PhaseMinimizer::Elementwise) {
  return solve_phase_subproblem(acc.sum_d_e, form);
}

struct SmmOptions {
  StoppingRule stop;
  SquaremOptions squarem;
  bool use_squarem = true;
  PhaseMinimizer phase_min = PhaseMinimizer::Elementwise;
  bool optimize_phases = true;
  bool track_diagnostics = false;
  double theta_override = 0.0;  // 0 = calibrate as 1/|x^0|
};

namespace detail {

inline constexpr std::uint64_t kTagCalibration = 0xCA11B;

/// theta = 1 / max_k |x_k^0| on an initial sample, per-config overridable.
inline double calibrate_theta(const ScenarioConfig& cfg, const ScenarioState& st,
                              const BeamformingState& init, const Rng& solver_rng,
                              double override_value) {
  if (override_value > 0.0) return override_value;
  const ChannelSample s0 =
      sample_channel(cfg, st, solver_rng.fork(kTagCalibration));
  SmoothingParams p;
  p.gamma = cfg.sinr_threshold;
  p.sigma2 = cfg.noise_power;
  p.theta = 1.0;
  double max_abs = 0.0;
  for (int k = 0; k < cfg.n_users; ++k) {
    const double x = multi_indicator_arg(init.precoder, init.phases,
                                         s0.equivalent[k], k, p);
    max_abs = std::max(max_abs, std::abs(x));
  }
  return max_abs > 0.0 ? 1.0 / max_abs : 1.0;
}

inline double avg_f_value(const SmmAccumulator& acc, const FSurrogate& extra,
                          const CVec& f) {
  const double lin = real_inner(CVec(acc.sum_d_f + extra.d), f);
  const double quad = (acc.sum_alpha_f + extra.alpha) * f.squaredNorm();
  return (lin + quad + acc.sum_const_f + extra.constant) / (acc.n + 1);
}

inline double avg_e_value(const SmmAccumulator& acc, const ESurrogate& extra,
                          const CVec& e) {
  const double lin = real_inner(CVec(acc.sum_d_e + extra.d), e);
  return (lin + acc.sum_const_e + extra.constant) / (acc.n + 1);
}

}  // namespace detail

/// Single-user SMM-OutMin: per-sample quadratic upper-bound surrogates,
/// streaming running averages, closed-form subproblem solutions, SQUAREM
/// acceleration with a monotonicity safeguard.
inline std::pair<BeamformingState, RunTrace> run_smm_outmin(
    const ScenarioConfig& cfg, const ScenarioState& st,
    const BeamformingState& init, const SmmOptions& opt, const Rng& solver_rng) {
  if (cfg.n_users != 1)
    throw std::invalid_argument("run_smm_outmin: single-user solver (K must be 1)");
  using clock = std::chrono::steady_clock;
  const double gamma = cfg.sinr_threshold;
  const double sigma2 = cfg.noise_power;
  const double p_max = cfg.p_max;
  const double theta =
      detail::calibrate_theta(cfg, st, init, solver_rng, opt.theta_override);

  CVec f = init.precoder.col(0);
  CVec e = init.phases;
  SmmAccumulator acc;
  acc.init(cfg.n_tx, cfg.phase_dim());

  RunTrace trace;
  trace.theta = theta;
  trace.mu = 0.0;
  trace.rows.reserve(opt.stop.max_iter);

  // Diagnostics: per-iteration effective channels for evaluating the averaged
  // true smoothed objective at the current iterate.
  std::vector<CVec> hist_ge, hist_gf;

  SquaremGuard guard_f, guard_e;
  double prev_obj_f = 0.0, prev_obj_e = 0.0;
  int calm = 0;

  for (int n = 1; n <= opt.stop.max_iter; ++n) {
    const auto t0 = clock::now();
    const ChannelSample sample = sample_channel(cfg, st, solver_rng.fork(n));
    const CMat& g = sample.equivalent[0];
    const auto t1 = clock::now();

    // f update with e fixed.
    const FSurrogate pf = f_surrogate_params(f, e, g, theta, gamma, sigma2, p_max);
    auto map_f = [&](const CVec& x) {
      const FSurrogate p = f_surrogate_params(x, e, g, theta, gamma, sigma2, p_max);
      return minimize_linear_quadratic_ball(CVec(acc.sum_d_f + p.d),
                                            acc.sum_alpha_f + p.alpha, p_max);
    };
    auto proj_f = [&](const CVec& y, const CVec& x2) {
      const double ny = y.norm();
      return ny > 0.0 ? CVec(y * (x2.norm() / ny)) : x2;
    };
    auto obj_f = [&](const CVec& x) { return detail::avg_f_value(acc, pf, x); };
    double omega_f = 0.0;
    const CVec f_new =
        opt.use_squarem
            ? squarem_step(f, map_f, proj_f, obj_f, opt.squarem, guard_f, &omega_f)
            : map_f(f);

    // e update with f = f_new.
    const ESurrogate pe =
        e_surrogate_params(f_new, e, g, theta, gamma, sigma2);
    CVec e_new = e;
    double omega_e = 0.0;
    if (opt.optimize_phases) {
      auto map_e = [&](const CVec& x) {
        const ESurrogate p = e_surrogate_params(f_new, x, g, theta, gamma, sigma2);
        return solve_phase_subproblem(CVec(acc.sum_d_e + p.d), opt.phase_min);
      };
      auto proj_e = [&](const CVec& y, const CVec&) { return project_phases(y); };
      auto obj_e = [&](const CVec& x) { return detail::avg_e_value(acc, pe, x); };
      e_new = opt.use_squarem
                  ? squarem_step(e, map_e, proj_e, obj_e, opt.squarem, guard_e,
                                 &omega_e)
                  : map_e(e);
    }

    const double obj_f_n = detail::avg_f_value(acc, pf, f_new);
    const double obj_e_n = detail::avg_e_value(acc, pe, e_new);
    acc.add(pf, pe);
    const auto t2 = clock::now();

    TraceRow row;
    row.iter = n;
    row.objective_f = obj_f_n;
    row.objective_e = obj_e_n;
    row.step_f = omega_f;
    row.step_e = omega_e;
    row.wall_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(t2 - t0).count();
    row.opt_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(t2 - t1).count();

    if (opt.track_diagnostics) {
      hist_ge.push_back(g.adjoint() * e);
      hist_gf.push_back(g * f_new);
      double true_f = 0.0, true_e = 0.0;
      for (int i = 0; i < acc.n; ++i) {
        true_f += sigmoid(gamma * sigma2 - std::norm(hist_ge[i].dot(f_new)), theta);
        true_e += sigmoid(gamma * sigma2 - std::norm(e_new.dot(hist_gf[i])), theta);
      }
      row.gap_f = std::abs(obj_f_n - true_f / acc.n);
      row.gap_e = std::abs(obj_e_n - true_e / acc.n);
    }
    trace.rows.push_back(row);

    guard_f.obj_prev_prev = guard_f.obj_prev;
    guard_f.obj_prev = obj_f_n;
    guard_f.recorded = std::min(guard_f.recorded + 1, 2);
    guard_e.obj_prev_prev = guard_e.obj_prev;
    guard_e.obj_prev = obj_e_n;
    guard_e.recorded = std::min(guard_e.recorded + 1, 2);

    const bool settled = n > 1 &&
                         std::abs(obj_f_n - prev_obj_f) < opt.stop.tol &&
                         std::abs(obj_e_n - prev_obj_e) < opt.stop.tol;
    calm = settled ? calm + 1 : 0;
    prev_obj_f = obj_f_n;
    prev_obj_e = obj_e_n;
    f = f_new;
    e = e_new;
    if (calm >= opt.stop.patience) break;
  }

  BeamformingState out;
  out.precoder = f;
  out.phases = e;
  return {out, trace};
}

}  // namespace outmin

#endif  // OUTMIN_SMM_HPP
