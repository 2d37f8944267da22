#ifndef HSDU_CORE_HPP
#define HSDU_CORE_HPP

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace hsdu {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DegeneracyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Problem dimensions: K time frames, L channels, N pixels, P sources.
struct Dims {
  int K = 0;
  int L = 0;
  int N = 0;
  int P = 0;

  void validate() const {
    if (K < 1 || L < 1 || N < 1 || P < 1)
      throw DimensionError("Dims: all of K, L, N, P must be >= 1");
    if (P > L || P > N)
      throw DimensionError("Dims: P must not exceed min(L, N)");
  }
};

/// Observed sequence: K frames, each L x N with pixel spectra in columns.
struct FrameSequence {
  Dims dims;
  std::vector<Matrix> frames;  // K matrices, each L x N
};

/// Fixed reference spectra S0, one nonnegative column per source (L x P).
using ReferenceSpectra = Matrix;

/// Per-frame endmember matrices S_k, each L x P, nonnegative.
using EndmemberTrajectory = std::vector<Matrix>;

/// Per-frame abundance matrices A_k, each P x N, nonnegative.
/// No sum-to-one constraint is imposed.
using AbundanceTrajectory = std::vector<Matrix>;

/// Scale factors, K x P; row k holds the diagonal of psi_k.
using ScaleSeries = Matrix;

/// Noise configuration for the synthetic generator.
struct NoiseSpec {
  double sigma_e = 0.05;       // observation noise std dev
  double sigma_v = 0.05;       // spectral distortion std dev
  double b = 0.01;             // Laplacian scale of abundance changes
  double change_density = 0.05;  // fraction of abundance entries perturbed
  std::uint64_t seed = 0;

  void validate() const {
    if (sigma_e < 0 || sigma_v < 0 || b < 0)
      throw ConfigError("NoiseSpec: sigma_e, sigma_v, b must be >= 0");
    if (change_density < 0 || change_density > 1)
      throw ConfigError("NoiseSpec: change_density must be in [0,1]");
  }
};

/// Latent variables realized by the generator, plus the realized noise
/// (E per frame, D per transition) so the residual identities are checkable.
struct GroundTruth {
  EndmemberTrajectory S;
  AbundanceTrajectory A;
  ScaleSeries psi;
  ReferenceSpectra S0;
  std::vector<Matrix> E;  // K matrices L x N, X_k - S_k A_k
  std::vector<Matrix> D;  // K-1 matrices P x N, A_k - A_{k-1} (post clamp)
};

inline void require_same_shape(const Matrix& a, const Matrix& b,
                               const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionError(std::string("shape mismatch in ") + what);
}

inline Matrix project_nonnegative(const Matrix& m) {
  return m.cwiseMax(0.0);
}

}  // namespace hsdu

#endif
