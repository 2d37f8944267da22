#ifndef HSDU_ADMM_ENDMEMBER_HPP
#define HSDU_ADMM_ENDMEMBER_HPP

#include <cmath>
#include <utility>

#include "hsdu/objective.hpp"

namespace hsdu {

/// ADMM state of the endmember subproblem (split S_k = M_k, multiplier U_k).
struct EndmemberAdmmState {
  std::vector<Matrix> S;  // K matrices L x P
  std::vector<Matrix> M;  // nonnegative splits
  std::vector<Matrix> U;  // normalized multipliers
  std::vector<double> primal_res;
  std::vector<double> dual_res;
  int iterations = 0;
  bool converged = false;
};

/// Closed-form S update:
/// S_k = (X_k A_k^T + S0 psi_k Lambda_S + rho (M_k - U_k))
///       (A_k A_k^T + (Lambda_S + rho I))^{-1}
inline Matrix s_step(const Matrix& X_k, const Matrix& A_k,
                     const ReferenceSpectra& S0,
                     const Eigen::RowVectorXd& psi_k, const Matrix& M_k,
                     const Matrix& U_k, const Hyperparams& h) {
  const int P = static_cast<int>(S0.cols());
  const Vector lam = h.lambda_S_vector(P);
  Matrix rhs = X_k * A_k.transpose() + h.rho * (M_k - U_k);
  for (int p = 0; p < P; ++p) rhs.col(p) += lam[p] * psi_k[p] * S0.col(p);
  Matrix gram = A_k * A_k.transpose();
  gram.diagonal() += lam.array().matrix() + Vector::Constant(P, h.rho);
  if (!rhs.allFinite() || !gram.allFinite())
    throw NumericError("s_step: non-finite input");
  // solve S * gram = rhs with gram symmetric positive definite
  return gram.llt().solve(rhs.transpose()).transpose();
}

/// ADMM over the K decoupled per-frame problems. Returns the projected
/// M variables as the (exactly nonnegative) endmember estimate.
inline std::pair<EndmemberTrajectory, EndmemberAdmmState> solve_S(
    const FrameSequence& X, const AbundanceTrajectory& A,
    const ScaleSeries& psi, const ReferenceSpectra& S0, const Hyperparams& h,
    EndmemberAdmmState warm = {}) {
  const int K = X.dims.K, L = X.dims.L, P = X.dims.P;
  EndmemberAdmmState st = std::move(warm);
  if (st.S.empty()) {
    st.S.assign(K, Matrix::Zero(L, P));
    st.M.assign(K, Matrix::Zero(L, P));
    st.U.assign(K, Matrix::Zero(L, P));
  }
  st.primal_res.clear();
  st.dual_res.clear();
  st.iterations = 0;
  st.converged = false;

  const double scale = std::sqrt(static_cast<double>(K) * L * P);
  for (int it = 0; it < h.max_inner; ++it) {
    double r2 = 0, s2 = 0, s_norm2 = 0, m_norm2 = 0, u_norm2 = 0;
    for (int k = 0; k < K; ++k) {
      st.S[k] = s_step(X.frames[k], A[k], S0, psi.row(k), st.M[k], st.U[k], h);
      Matrix M_new = project_nonnegative(st.S[k] + st.U[k]);
      s2 += (h.rho * (M_new - st.M[k])).squaredNorm();
      st.M[k] = std::move(M_new);
      st.U[k] += st.S[k] - st.M[k];
      r2 += (st.S[k] - st.M[k]).squaredNorm();
      s_norm2 += st.S[k].squaredNorm();
      m_norm2 += st.M[k].squaredNorm();
      u_norm2 += st.U[k].squaredNorm();
    }
    ++st.iterations;
    double r = std::sqrt(r2), s = std::sqrt(s2);
    st.primal_res.push_back(r);
    st.dual_res.push_back(s);
    double eps_pri = scale * h.admm_eps_abs +
                     h.admm_eps_rel * std::sqrt(std::max(s_norm2, m_norm2));
    double eps_dual = scale * h.admm_eps_abs +
                      h.admm_eps_rel * h.rho * std::sqrt(u_norm2);
    if (r <= eps_pri && s <= eps_dual) {
      st.converged = true;
      break;
    }
  }
  return {st.M, std::move(st)};
}

}  // namespace hsdu

#endif
