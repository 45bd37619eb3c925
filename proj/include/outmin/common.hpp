// SPDX-License-Identifier: Apache-2.0
// ris-outmin: outage-minimizing beamforming for RIS-aided mmWave downlinks

#ifndef OUTMIN_COMMON_HPP
#define OUTMIN_COMMON_HPP

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace outmin {

using cxd = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

/// dBm -> watts. 30 dBm is exactly 1 W.
inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

/// Target rate (bps/Hz) -> SINR threshold gamma = 2^R - 1.
inline double rate_to_sinr_threshold(double rate_bps_hz) {
  return std::exp2(rate_bps_hz) - 1.0;
}

/// Real inner product <X, Y> = 2 Re{Tr(X^H Y)} on C^{m x n} viewed as R^{2mn}.
template <typename DerivedA, typename DerivedB>
double real_inner(const Eigen::MatrixBase<DerivedA>& x,
                  const Eigen::MatrixBase<DerivedB>& y) {
  using std::real;
  return 2.0 * real(x.conjugate().cwiseProduct(y).sum());
}

/// Two most-square factors r <= c with r * c = n (r maximal).
inline std::pair<int, int> most_square_factors(int n) {
  if (n <= 0) throw std::invalid_argument("most_square_factors: n must be positive");
  int r = static_cast<int>(std::sqrt(static_cast<double>(n)));
  while (r > 1 && n % r != 0) --r;
  return {r, n / r};
}

}  // namespace outmin

#endif  // OUTMIN_COMMON_HPP
