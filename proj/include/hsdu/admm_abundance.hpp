#ifndef HSDU_ADMM_ABUNDANCE_HPP
#define HSDU_ADMM_ABUNDANCE_HPP

#include <cmath>
#include <utility>

#include "hsdu/objective.hpp"

namespace hsdu {

/// ADMM state of the abundance subproblem: splits Q_k (nonnegativity) and
/// D_k (temporal differences, k = 2..K), multipliers W_k and Z_k.
struct AbundanceAdmmState {
  std::vector<Matrix> A;  // K matrices P x N
  std::vector<Matrix> Q;  // nonnegative splits
  std::vector<Matrix> D;  // K-1 difference splits, D[k-1] pairs frames k-1,k
  std::vector<Matrix> W;
  std::vector<Matrix> Z;  // K-1 multipliers matching D
  std::vector<double> primal_res;
  std::vector<double> dual_res;
  int iterations = 0;
  bool converged = false;
};

inline double soft_threshold(double t, double tau) {
  return std::copysign(std::max(std::abs(t) - tau, 0.0), t);
}

inline Matrix soft_threshold(const Matrix& t, double tau) {
  return t.unaryExpr([tau](double v) { return soft_threshold(v, tau); });
}

/// Closed-form A_k update from the augmented Lagrangian, Jacobi style: all
/// neighbor quantities are read from `st`, the previous-iteration snapshot.
/// k is 0-based here. Boundary frames see two coupling terms (2 rho I),
/// interior frames three (3 rho I); for K = 1 only the Q split remains.
inline Matrix a_step(int k, const FrameSequence& X,
                     const EndmemberTrajectory& S,
                     const AbundanceAdmmState& st, const Hyperparams& h) {
  const int K = X.dims.K, P = X.dims.P;
  const double rho = h.rho;
  Matrix rhs = S[k].transpose() * X.frames[k] + rho * (st.Q[k] - st.W[k]);
  int couplings = 1;
  if (k > 0) {  // difference constraint with the previous frame
    rhs += rho * (st.A[k - 1] + st.D[k - 1] - st.Z[k - 1]);
    ++couplings;
  }
  if (k < K - 1) {  // difference constraint with the next frame
    rhs += rho * (st.A[k + 1] - st.D[k] + st.Z[k]);
    ++couplings;
  }
  Matrix gram = S[k].transpose() * S[k];
  gram.diagonal().array() += couplings * rho;
  return gram.llt().solve(rhs);
}

/// ADMM for the abundance block. One inner iteration runs a Jacobi sweep of
/// a_step over all frames, then the Q projection, the D soft-threshold with
/// tau = lambda_A / rho, and the dual updates. Returns the projected Q
/// variables as the (exactly nonnegative) abundance estimate.
inline std::pair<AbundanceTrajectory, AbundanceAdmmState> solve_A(
    const FrameSequence& X, const EndmemberTrajectory& S, const Hyperparams& h,
    AbundanceAdmmState warm = {}) {
  const int K = X.dims.K, N = X.dims.N, P = X.dims.P;
  AbundanceAdmmState st = std::move(warm);
  if (st.A.empty()) {
    st.A.assign(K, Matrix::Zero(P, N));
    st.Q.assign(K, Matrix::Zero(P, N));
    st.W.assign(K, Matrix::Zero(P, N));
    st.D.assign(K > 1 ? K - 1 : 0, Matrix::Zero(P, N));
    st.Z.assign(K > 1 ? K - 1 : 0, Matrix::Zero(P, N));
  }
  st.primal_res.clear();
  st.dual_res.clear();
  st.iterations = 0;
  st.converged = false;

  const double tau = h.lambda_A / h.rho;
  const double scale = std::sqrt(static_cast<double>(2 * K - 1) * P * N);
  std::vector<Matrix> A_new(K);
  for (int it = 0; it < h.max_inner; ++it) {
    for (int k = 0; k < K; ++k) A_new[k] = a_step(k, X, S, st, h);
    st.A = A_new;

    double r2 = 0, s2 = 0, ax_norm2 = 0, split_norm2 = 0, mult_norm2 = 0;
    for (int k = 0; k < K; ++k) {
      Matrix Q_new = project_nonnegative(st.A[k] + st.W[k]);
      s2 += (h.rho * (Q_new - st.Q[k])).squaredNorm();
      st.Q[k] = std::move(Q_new);
      st.W[k] += st.A[k] - st.Q[k];
      r2 += (st.A[k] - st.Q[k]).squaredNorm();
      ax_norm2 += st.A[k].squaredNorm();
      split_norm2 += st.Q[k].squaredNorm();
      mult_norm2 += st.W[k].squaredNorm();
    }
    for (int k = 1; k < K; ++k) {
      Matrix diff = st.A[k] - st.A[k - 1];
      Matrix D_new = soft_threshold(diff + st.Z[k - 1], tau);
      s2 += (h.rho * (D_new - st.D[k - 1])).squaredNorm();
      st.D[k - 1] = std::move(D_new);
      st.Z[k - 1] += diff - st.D[k - 1];
      r2 += (diff - st.D[k - 1]).squaredNorm();
      ax_norm2 += diff.squaredNorm();
      split_norm2 += st.D[k - 1].squaredNorm();
      mult_norm2 += st.Z[k - 1].squaredNorm();
    }
    ++st.iterations;
    double r = std::sqrt(r2), s = std::sqrt(s2);
    st.primal_res.push_back(r);
    st.dual_res.push_back(s);
    double eps_pri = scale * h.admm_eps_abs +
                     h.admm_eps_rel * std::sqrt(std::max(ax_norm2, split_norm2));
    double eps_dual = scale * h.admm_eps_abs +
                      h.admm_eps_rel * h.rho * std::sqrt(mult_norm2);
    if (r <= eps_pri && s <= eps_dual) {
      st.converged = true;
      break;
    }
  }
  return {st.Q, std::move(st)};
}

}  // namespace hsdu

#endif
