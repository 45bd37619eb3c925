// SPDX-License-Identifier: Apache-2.0
// ris-outmin: outage-minimizing beamforming for RIS-aided mmWave downlinks

#ifndef OUTMIN_OBJECTIVE_HPP
#define OUTMIN_OBJECTIVE_HPP

#include <vector>

#include "outmin/beamforming.hpp"
#include "outmin/channel.hpp"
#include "outmin/common.hpp"

namespace outmin {

/// Smoothing and threshold parameters shared by the solvers.
struct SmoothingParams {
  double theta = 1.0;   // sigmoid sharpness
  double mu = 0.01;     // log-sum-exp temperature
  double gamma = 1.0;   // SINR threshold (equal across users)
  double sigma2 = 1.0;  // noise power (linear W, equal across users)
};

/// Numerically stable logistic 1 / (1 + exp(-theta * x)).
inline double sigmoid(double x, double theta) {
  const double t = theta * x;
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double ex = std::exp(t);
  return ex / (1.0 + ex);
}

/// d/dx sigmoid = theta * u * (1 - u); equals theta/4 at x = 0.
inline double sigmoid_derivative(double x, double theta) {
  const double u = sigmoid(x, theta);
  return theta * u * (1.0 - u);
}

/// SINR of user k for the given state and sample.
inline double sinr(const BeamformingState& state, const ChannelSample& sample,
                   int k, double sigma2) {
  const CMat& g = sample.equivalent[k];
  const Eigen::RowVectorXcd row = state.phases.adjoint() * g;  // e^H G_k
  double signal = 0.0, interference = 0.0;
  for (Eigen::Index i = 0; i < state.precoder.cols(); ++i) {
    const double p = std::norm((row * state.precoder.col(i)).value());
    if (i == k)
      signal = p;
    else
      interference += p;
  }
  return signal / (interference + sigma2);
}

/// Single-user smoothed outage indicator u(gamma*sigma^2 - |e^H G f|^2).
inline double smooth_single(const CVec& f, const CVec& e, const CMat& g,
                            const SmoothingParams& p) {
  const cxd s = (e.adjoint() * g * f).value();
  return sigmoid(p.gamma * p.sigma2 - std::norm(s), p.theta);
}

/// Quadratic-form argument of the multiuser smoothed indicator,
/// e^H G_k F Y_k F^H G_k^H e + gamma*sigma^2 with Y_k = diag(gamma) except
/// entry k = -1. Positive exactly when SINR_k < gamma.
inline double multi_indicator_arg(const CMat& f, const CVec& e, const CMat& g,
                                  int k, const SmoothingParams& p) {
  const Eigen::RowVectorXcd row = e.adjoint() * g;
  double quad = p.gamma * p.sigma2;
  for (Eigen::Index i = 0; i < f.cols(); ++i) {
    const double pw = std::norm((row * f.col(i)).value());
    quad += (i == k ? -1.0 : p.gamma) * pw;
  }
  return quad;
}

/// Multiuser smoothed outage indicator of user k.
inline double smooth_multi(const BeamformingState& state,
                           const ChannelSample& sample, int k,
                           const SmoothingParams& p) {
  return sigmoid(multi_indicator_arg(state.precoder, state.phases,
                                     sample.equivalent[k], k, p),
                 p.theta);
}

/// Smoothed max: mu * ln(sum exp(v_k / mu)), max-subtracted for stability.
/// Bounded by max(v) <= result <= max(v) + mu * ln(K).
inline double logsumexp_max(const std::vector<double>& values, double mu) {
  if (values.empty()) throw std::invalid_argument("logsumexp_max: empty input");
  double vmax = values[0];
  for (double v : values) vmax = std::max(vmax, v);
  double acc = 0.0;
  for (double v : values) acc += std::exp((v - vmax) / mu);
  return vmax + mu * std::log(acc);
}

/// Multiuser smoothed objective F(F, e | G): log-sum-exp over the per-user
/// smoothed indicators. Defined for any e, not just feasible ones.
inline double smoothed_objective(const CMat& f, const CVec& e,
                                 const ChannelSample& sample,
                                 const SmoothingParams& p) {
  const int n_users = static_cast<int>(sample.equivalent.size());
  std::vector<double> vals(n_users);
  for (int k = 0; k < n_users; ++k)
    vals[k] = sigmoid(multi_indicator_arg(f, e, sample.equivalent[k], k, p),
                      p.theta);
  return logsumexp_max(vals, p.mu);
}

/// Per-user weights l_k of the proximal surrogate: softmax of the smoothed
/// indicators times the sigmoid slope at the quadratic argument.
inline std::vector<double> softmax_sigmoid_weights(const CMat& f, const CVec& e,
                                                   const ChannelSample& sample,
                                                   const SmoothingParams& p) {
  const int n_users = static_cast<int>(sample.equivalent.size());
  std::vector<double> arg(n_users), ind(n_users), w(n_users);
  double vmax = -1.0;
  for (int k = 0; k < n_users; ++k) {
    arg[k] = multi_indicator_arg(f, e, sample.equivalent[k], k, p);
    ind[k] = sigmoid(arg[k], p.theta);
    vmax = std::max(vmax, ind[k]);
  }
  double denom = 0.0;
  for (int k = 0; k < n_users; ++k) {
    w[k] = std::exp((ind[k] - vmax) / p.mu);
    denom += w[k];
  }
  for (int k = 0; k < n_users; ++k)
    w[k] = w[k] / denom * sigmoid_derivative(arg[k], p.theta);
  return w;
}

/// Conjugate gradient of the multiuser smoothed objective w.r.t. F*:
/// W_f = sum_k l_k G_k^H e e^H G_k F Y_k.
inline CMat gradient_precoder(const CMat& f, const CVec& e,
                              const ChannelSample& sample,
                              const SmoothingParams& p) {
  const std::vector<double> w = softmax_sigmoid_weights(f, e, sample, p);
  const int n_users = static_cast<int>(sample.equivalent.size());
  CMat grad = CMat::Zero(f.rows(), f.cols());
  for (int k = 0; k < n_users; ++k) {
    const CMat& g = sample.equivalent[k];
    const CVec ge = g.adjoint() * e;                 // G_k^H e
    const Eigen::RowVectorXcd proj = ge.adjoint() * f;  // e^H G_k F
    CMat term = ge * proj;                           // G_k^H e e^H G_k F
    for (Eigen::Index i = 0; i < f.cols(); ++i)
      term.col(i) *= (i == k ? -1.0 : p.gamma);      // right-multiply Y_k
    grad += w[k] * term;
  }
  return grad;
}

/// Conjugate gradient of the multiuser smoothed objective w.r.t. e*:
/// w_e = sum_k l_k G_k F Y_k F^H G_k^H e.
inline CVec gradient_phases(const CMat& f, const CVec& e,
                            const ChannelSample& sample,
                            const SmoothingParams& p) {
  const std::vector<double> w = softmax_sigmoid_weights(f, e, sample, p);
  const int n_users = static_cast<int>(sample.equivalent.size());
  CVec grad = CVec::Zero(e.size());
  for (int k = 0; k < n_users; ++k) {
    const CMat& g = sample.equivalent[k];
    const CMat gf = g * f;                            // G_k F
    const CVec proj = gf.adjoint() * e;               // F^H G_k^H e
    CVec term = CVec::Zero(e.size());
    for (Eigen::Index i = 0; i < f.cols(); ++i)
      term += (i == k ? -1.0 : p.gamma) * proj[i] * gf.col(i);
    grad += w[k] * term;
  }
  return grad;
}

}  // namespace outmin

#endif  // OUTMIN_OBJECTIVE_HPP
