#ifndef HSDU_METRICS_HPP
#define HSDU_METRICS_HPP

#include <algorithm>
#include <cmath>

#include "hsdu/core.hpp"

namespace hsdu {

/// sum_k ||est_k - truth_k||_F^2 / sum_k ||truth_k||_F^2
inline double scaled_mse(const std::vector<Matrix>& est,
                         const std::vector<Matrix>& truth) {
  if (est.size() != truth.size())
    throw DimensionError("scaled_mse: trajectory lengths differ");
  double num = 0, den = 0;
  for (std::size_t k = 0; k < truth.size(); ++k) {
    require_same_shape(est[k], truth[k], "scaled_mse");
    num += (est[k] - truth[k]).squaredNorm();
    den += truth[k].squaredNorm();
  }
  if (den == 0) throw DomainError("scaled_mse: zero-norm truth");
  return num / den;
}

inline double scaled_mse(const Matrix& est, const Matrix& truth) {
  return scaled_mse(std::vector<Matrix>{est}, std::vector<Matrix>{truth});
}

/// Angle between two spectra in [0, pi]; invariant to positive scaling.
inline double spectral_angle(const Vector& u, const Vector& v) {
  double nu = u.norm(), nv = v.norm();
  if (nu == 0 || nv == 0) throw DomainError("spectral_angle: zero vector");
  double c = u.dot(v) / (nu * nv);
  return std::acos(std::clamp(c, -1.0, 1.0));
}

struct EvalReport {
  double e_S = 0;
  double e_A = 0;
  double e_psi = 0;
  std::vector<double> e_S_per_frame;
  std::vector<double> e_A_per_frame;
  Matrix angle_table;  // P x K spectral angles vs truth
};

inline EvalReport evaluate_estimate(const EndmemberTrajectory& S_est,
                                    const AbundanceTrajectory& A_est,
                                    const ScaleSeries& psi_est,
                                    const GroundTruth& gt) {
  EvalReport rep;
  rep.e_S = scaled_mse(S_est, gt.S);
  rep.e_A = scaled_mse(A_est, gt.A);
  rep.e_psi = scaled_mse(psi_est, gt.psi);
  const int K = static_cast<int>(gt.S.size());
  const int P = static_cast<int>(gt.S0.cols());
  rep.angle_table.resize(P, K);
  for (int k = 0; k < K; ++k) {
    rep.e_S_per_frame.push_back((S_est[k] - gt.S[k]).squaredNorm() /
                                gt.S[k].squaredNorm());
    rep.e_A_per_frame.push_back((A_est[k] - gt.A[k]).squaredNorm() /
                                gt.A[k].squaredNorm());
    for (int p = 0; p < P; ++p)
      rep.angle_table(p, k) = spectral_angle(S_est[k].col(p), gt.S[k].col(p));
  }
  return rep;
}

}  // namespace hsdu

#endif
