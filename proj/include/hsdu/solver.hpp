#ifndef HSDU_SOLVER_HPP
#define HSDU_SOLVER_HPP

#include <optional>
#include <utility>

#include "hsdu/admm_abundance.hpp"
#include "hsdu/admm_endmember.hpp"

namespace hsdu {

struct Initialization {
  EndmemberTrajectory S;
  AbundanceTrajectory A;
  ScaleSeries psi;
};

struct SolverConfig {
  Hyperparams h;
  std::optional<Initialization> init;  // default: psi = 1, A = 1/P, S = S0
  bool record_trace = true;
};

struct UnmixResult {
  EndmemberTrajectory S;
  AbundanceTrajectory A;
  ScaleSeries psi;
  std::vector<double> objective_trace;
  int outer_iterations = 0;
  bool converged = false;
  double residual_S = 0;
  double residual_A = 0;
};

/// Least-squares scale factors: psi_k^p = <s_0^p, s_k^p> / <s_0^p, s_0^p>.
inline ScaleSeries update_psi(const EndmemberTrajectory& S,
                              const ReferenceSpectra& S0) {
  const int K = static_cast<int>(S.size()), P = static_cast<int>(S0.cols());
  ScaleSeries psi(K, P);
  for (int p = 0; p < P; ++p) {
    double denom = S0.col(p).squaredNorm();
    if (denom <= 0)
      throw DomainError("update_psi: zero-norm reference column");
    for (int k = 0; k < K; ++k)
      psi(k, p) = S0.col(p).dot(S[k].col(p)) / denom;
  }
  return psi;
}

inline double relative_change_sq(const std::vector<Matrix>& fresh,
                                 const std::vector<Matrix>& old) {
  double num = 0, den = 0;
  for (std::size_t k = 0; k < old.size(); ++k) {
    num += (fresh[k] - old[k]).squaredNorm();
    den += old[k].squaredNorm();
  }
  if (den == 0) {
    if (num == 0) return 0;
    throw DomainError("relative_change_sq: zero-norm previous iterate");
  }
  return num / den;
}

inline bool outer_converged(const EndmemberTrajectory& S_new,
                            const EndmemberTrajectory& S_old,
                            const AbundanceTrajectory& A_new,
                            const AbundanceTrajectory& A_old,
                            const Hyperparams& h) {
  return relative_change_sq(A_new, A_old) < h.eps_A &&
         relative_change_sq(S_new, S_old) < h.eps_S;
}

/// Outer ANLS loop: repeat { S-block ADMM; A-block ADMM; closed-form psi }
/// until both relative-change criteria hold or max_outer is reached.
/// ADMM states are carried across outer iterations as warm starts.
inline UnmixResult joint_unmix(const FrameSequence& X,
                               const ReferenceSpectra& S0,
                               const SolverConfig& cfg) {
  const Dims& d = X.dims;
  d.validate();
  cfg.h.validate();
  if (S0.rows() != d.L || S0.cols() != d.P)
    throw DimensionError("joint_unmix: S0 must be L x P");
  for (const Matrix& frame : X.frames)
    if (!frame.allFinite()) throw NumericError("joint_unmix: non-finite data");
  for (int p = 0; p < d.P; ++p)
    if (S0.col(p).isZero())
      throw DomainError("joint_unmix: all-zero reference column");

  UnmixResult res;
  if (cfg.init) {
    res.S = cfg.init->S;
    res.A = cfg.init->A;
    res.psi = cfg.init->psi;
  } else {
    res.S.assign(d.K, S0);
    res.A.assign(d.K, Matrix::Constant(d.P, d.N, 1.0 / d.P));
    res.psi = ScaleSeries::Ones(d.K, d.P);
  }

  EndmemberAdmmState s_state;
  s_state.S = res.S;
  s_state.M.reserve(d.K);
  for (const Matrix& S_k : res.S) s_state.M.push_back(project_nonnegative(S_k));
  s_state.U.assign(d.K, Matrix::Zero(d.L, d.P));

  AbundanceAdmmState a_state;
  a_state.A = res.A;
  a_state.Q.reserve(d.K);
  for (const Matrix& A_k : res.A) a_state.Q.push_back(project_nonnegative(A_k));
  a_state.W.assign(d.K, Matrix::Zero(d.P, d.N));
  for (int k = 1; k < d.K; ++k) a_state.D.push_back(res.A[k] - res.A[k - 1]);
  a_state.Z.assign(d.K > 1 ? d.K - 1 : 0, Matrix::Zero(d.P, d.N));

  if (cfg.record_trace)
    res.objective_trace.push_back(
        evaluate_objective(res.S, res.A, res.psi, X, S0, cfg.h));

  for (int outer = 0; outer < cfg.h.max_outer; ++outer) {
    EndmemberTrajectory S_old = res.S;
    AbundanceTrajectory A_old = res.A;

    std::tie(res.S, s_state) =
        solve_S(X, res.A, res.psi, S0, cfg.h, std::move(s_state));
    std::tie(res.A, a_state) = solve_A(X, res.S, cfg.h, std::move(a_state));
    res.psi = update_psi(res.S, S0);

    ++res.outer_iterations;
    if (cfg.record_trace)
      res.objective_trace.push_back(
          evaluate_objective(res.S, res.A, res.psi, X, S0, cfg.h));

    res.residual_S = relative_change_sq(res.S, S_old);
    res.residual_A = relative_change_sq(res.A, A_old);
    if (res.residual_A < cfg.h.eps_A && res.residual_S < cfg.h.eps_S) {
      res.converged = true;
      break;
    }
  }
  return res;
}

}  // namespace hsdu

#endif
