#ifndef HSDU_BASELINE_HPP
#define HSDU_BASELINE_HPP

#include <algorithm>
#include <numeric>
#include <utility>

#include "hsdu/admm_abundance.hpp"
#include "hsdu/metrics.hpp"
#include "hsdu/solver.hpp"

namespace hsdu {

/// Per-frame bijection estimated source index -> reference source index.
struct PermutationMap {
  std::vector<std::vector<int>> perm;  // perm[k][p_est] = p_ref
};

/// Simplified vertex-component extraction. The frame is projected onto the
/// top-P eigenvectors of its second-moment matrix X X^T / N (uncentered, so
/// sum-to-one data keeps full rank P), then pixels are picked greedily by
/// largest component orthogonal to the span of the already-selected
/// vertices, ties broken by lowest pixel index. Deterministic; the seed is
/// accepted for interface stability but the procedure draws nothing.
inline Matrix vca_extract(const Matrix& X_k, int P, std::uint64_t /*seed*/) {
  const int L = static_cast<int>(X_k.rows());
  const int N = static_cast<int>(X_k.cols());
  if (N < P) throw DimensionError("vca_extract: need at least P pixels");
  if (P < 1 || P > L) throw DimensionError("vca_extract: bad P");

  Matrix second_moment = X_k * X_k.transpose() / N;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(second_moment);
  Matrix basis = eig.eigenvectors().rightCols(P);  // top-P directions
  Matrix Y = basis.transpose() * X_k;              // P x N projection

  std::vector<int> picked;
  Matrix ortho = Matrix::Zero(P, P);  // orthonormal span of picked vertices
  for (int i = 0; i < P; ++i) {
    int best = -1;
    double best_norm = 0;
    for (int n = 0; n < N; ++n) {
      Vector y = Y.col(n);
      for (int j = 0; j < i; ++j) y -= ortho.col(j).dot(y) * ortho.col(j);
      double norm = y.norm();
      if (norm > best_norm + 1e-12 * (1 + best_norm)) {
        best_norm = norm;
        best = n;
      }
    }
    if (best < 0 || best_norm <= 1e-9 * (1 + Y.norm()))
      throw DegeneracyError(
          "vca_extract: zero orthogonal component at vertex " +
          std::to_string(i + 1));
    picked.push_back(best);
    Vector y = Y.col(best);
    for (int j = 0; j < i; ++j) y -= ortho.col(j).dot(y) * ortho.col(j);
    ortho.col(i) = y / y.norm();
  }

  Matrix S(L, P);
  for (int i = 0; i < P; ++i) S.col(i) = X_k.col(picked[i]).cwiseMax(0.0);
  return S;
}

/// Exhaustive search over all P! permutations for the one minimizing the
/// summed spectral angle between matched columns.
inline std::vector<int> align_permutation(const Matrix& S_est,
                                          const Matrix& S_ref) {
  require_same_shape(S_est, S_ref, "align_permutation");
  const int P = static_cast<int>(S_ref.cols());
  Matrix angle(P, P);
  for (int i = 0; i < P; ++i)
    for (int j = 0; j < P; ++j)
      angle(i, j) = spectral_angle(S_est.col(i), S_ref.col(j));

  std::vector<int> idx(P), best;
  std::iota(idx.begin(), idx.end(), 0);
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    double cost = 0;
    for (int i = 0; i < P; ++i) cost += angle(i, idx[i]);
    if (cost < best_cost) {
      best_cost = cost;
      best = idx;
    }
  } while (std::next_permutation(idx.begin(), idx.end()));
  return best;
}

/// Frame-by-frame baseline: VCA endmembers, NNLS abundances (abundance
/// ADMM with K = 1 and lambda_A = 0), spectral-angle alignment to S_ref,
/// scale factors from the aligned endmembers.
inline UnmixResult separate_unmix(const FrameSequence& X, int P,
                                  const ReferenceSpectra& S_ref,
                                  std::uint64_t seed,
                                  const Hyperparams& base = {}) {
  const Dims& d = X.dims;
  UnmixResult res;
  Hyperparams h = base;
  h.lambda_A = 0;
  for (int k = 0; k < d.K; ++k) {
    Matrix S_k = vca_extract(X.frames[k], P, seed + k);

    FrameSequence frame;
    frame.dims = {1, d.L, d.N, P};
    frame.frames = {X.frames[k]};
    auto [A_frames, a_state] = solve_A(frame, {S_k}, h);
    Matrix A_k = A_frames[0];

    std::vector<int> perm = align_permutation(S_k, S_ref);
    Matrix S_aligned(d.L, P), A_aligned(P, d.N);
    for (int i = 0; i < P; ++i) {
      S_aligned.col(perm[i]) = S_k.col(i);
      A_aligned.row(perm[i]) = A_k.row(i);
    }
    res.S.push_back(std::move(S_aligned));
    res.A.push_back(std::move(A_aligned));
  }
  res.psi = update_psi(res.S, S_ref);
  res.outer_iterations = d.K;
  res.converged = true;
  return res;
}

}  // namespace hsdu

#endif
