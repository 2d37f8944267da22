#ifndef HSDU_OBJECTIVE_HPP
#define HSDU_OBJECTIVE_HPP

#include <utility>

#include "hsdu/core.hpp"

namespace hsdu {

/// Regularization weights and solver tolerances. lambda_S may carry one
/// weight per source; a single entry is broadcast to all sources.
struct Hyperparams {
  std::vector<double> lambda_S = {1.0};
  double lambda_A = 0.25;
  double rho = 1.0;
  double eps_S = 1e-6;  // on the squared relative change per outer pass
  double eps_A = 1e-6;
  int max_outer = 200;
  int max_inner = 500;
  double admm_eps_abs = 1e-6;
  double admm_eps_rel = 1e-4;

  void validate() const {
    if (lambda_S.empty()) throw ConfigError("Hyperparams: lambda_S empty");
    for (double l : lambda_S)
      if (l < 0) throw ConfigError("Hyperparams: lambda_S must be >= 0");
    if (lambda_A < 0) throw ConfigError("Hyperparams: lambda_A must be >= 0");
    if (rho <= 0) throw ConfigError("Hyperparams: rho must be > 0");
    if (eps_S <= 0 || eps_A <= 0 || admm_eps_abs <= 0 || admm_eps_rel <= 0)
      throw ConfigError("Hyperparams: tolerances must be > 0");
    if (max_outer < 1 || max_inner < 1)
      throw ConfigError("Hyperparams: iteration caps must be >= 1");
  }

  /// Per-source weights expanded to length P.
  Vector lambda_S_vector(int P) const {
    if (static_cast<int>(lambda_S.size()) == P)
      return Eigen::Map<const Vector>(lambda_S.data(), P);
    if (lambda_S.size() == 1) return Vector::Constant(P, lambda_S[0]);
    throw ConfigError("Hyperparams: lambda_S must have 1 or P entries");
  }
};

/// lambda_S = sigma_e^2 / sigma_v^2, lambda_A = sigma_e^2 / b.
inline std::pair<double, double> tune_hyperparameters(double sigma_e,
                                                      double sigma_v,
                                                      double b) {
  if (sigma_v <= 0 || b <= 0)
    throw DomainError("tune_hyperparameters: sigma_v and b must be > 0");
  // grouped so that e.g. (0.05, 0.05, 0.01) -> exactly (1.0, 0.25)
  return {(sigma_e / sigma_v) * (sigma_e / sigma_v), (sigma_e / b) * sigma_e};
}

/// The joint objective:
///   (1/2) sum_k ||X_k - S_k A_k||_F^2
/// + (1/2) sum_k sum_p lambda_S^p ||s_k^p - psi_k^p s_0^p||^2
/// + lambda_A sum_{k>=2} ||A_k - A_{k-1}||_l1
inline double evaluate_objective(const EndmemberTrajectory& S,
                                 const AbundanceTrajectory& A,
                                 const ScaleSeries& psi,
                                 const FrameSequence& X,
                                 const ReferenceSpectra& S0,
                                 const Hyperparams& h) {
  const int K = X.dims.K, P = X.dims.P;
  if (static_cast<int>(S.size()) != K || static_cast<int>(A.size()) != K ||
      psi.rows() != K || psi.cols() != P)
    throw DimensionError("evaluate_objective: trajectory lengths");
  const Vector lam = h.lambda_S_vector(P);
  double value = 0.0;
  for (int k = 0; k < K; ++k) {
    require_same_shape(S[k], S0, "evaluate_objective S_k");
    if (S[k].cols() != A[k].rows() || X.frames[k].rows() != S[k].rows() ||
        X.frames[k].cols() != A[k].cols())
      throw DimensionError("evaluate_objective: frame shape mismatch");
    value += 0.5 * (X.frames[k] - S[k] * A[k]).squaredNorm();
    for (int p = 0; p < P; ++p)
      value += 0.5 * lam[p] *
               (S[k].col(p) - psi(k, p) * S0.col(p)).squaredNorm();
    if (k > 0) value += h.lambda_A * (A[k] - A[k - 1]).cwiseAbs().sum();
  }
  return value;
}

/// Gradient of the smooth terms w.r.t. S_k:
///   (S_k A_k - X_k) A_k^T + (S_k - S0 psi_k) Lambda_S
inline std::vector<Matrix> gradient_smooth_S(const EndmemberTrajectory& S,
                                             const AbundanceTrajectory& A,
                                             const ScaleSeries& psi,
                                             const FrameSequence& X,
                                             const ReferenceSpectra& S0,
                                             const Hyperparams& h) {
  const int K = X.dims.K, P = X.dims.P;
  const Vector lam = h.lambda_S_vector(P);
  std::vector<Matrix> grad;
  grad.reserve(K);
  for (int k = 0; k < K; ++k) {
    Matrix g = (S[k] * A[k] - X.frames[k]) * A[k].transpose();
    for (int p = 0; p < P; ++p)
      g.col(p) += lam[p] * (S[k].col(p) - psi(k, p) * S0.col(p));
    grad.push_back(std::move(g));
  }
  return grad;
}

}  // namespace hsdu

#endif
