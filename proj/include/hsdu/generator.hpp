#ifndef HSDU_GENERATOR_HPP
#define HSDU_GENERATOR_HPP

#include <cmath>
#include <numbers>
#include <utility>

#include "hsdu/core.hpp"
#include "hsdu/rng.hpp"

namespace hsdu {

struct Circle {
  double cx = 0;  // pixel coordinates, 1-based grid
  double cy = 0;
  double radius = 0;
};

/// Spatial layout of the first-frame abundance map: one circle per source
/// on a width x height pixel grid, raster order n = y*width + x.
struct CircleGeometry {
  int width = 50;
  int height = 50;
  std::vector<Circle> circles;

  static CircleGeometry standard(int p, int width = 50, int height = 50) {
    CircleGeometry g;
    g.circles = {{17, 17, 15}, {33, 17, 15}, {25, 35, 15}};
    if (p != 3) {
      // spread p circles evenly on a ring; keeps pure pixels at centers
      g.circles.clear();
      for (int i = 0; i < p; ++i) {
        double ang = 2.0 * std::numbers::pi * i / std::max(p, 1);
        g.circles.push_back({25.0 + 12.0 * std::cos(ang),
                             25.0 + 12.0 * std::sin(ang), 11.0});
      }
    }
    // layout is designed on a 50 x 50 grid; rescale to the requested one
    g.width = width;
    g.height = height;
    double sx = width / 50.0, sy = height / 50.0;
    for (Circle& c : g.circles) {
      c.cx *= sx;
      c.cy *= sy;
      c.radius *= std::min(sx, sy);
    }
    return g;
  }

  void validate(const Dims& dims) const {
    if (width < 1 || height < 1 || width * height != dims.N)
      throw ConfigError("CircleGeometry: width*height must equal N");
    if (static_cast<int>(circles.size()) != dims.P)
      throw ConfigError("CircleGeometry: need exactly P circles");
    for (const Circle& c : circles) {
      if (c.radius <= 0 || c.cx - c.radius < 0 || c.cx + c.radius > width + 1 ||
          c.cy - c.radius < 0 || c.cy + c.radius > height + 1)
        throw ConfigError("CircleGeometry: circle outside the image grid");
    }
  }
};

/// Noiseless mixing: frame k of the result is exactly S_k * A_k.
inline FrameSequence forward_mix(const EndmemberTrajectory& S,
                                 const AbundanceTrajectory& A) {
  if (S.empty() || S.size() != A.size())
    throw DimensionError("forward_mix: trajectory lengths differ");
  FrameSequence X;
  X.dims = {static_cast<int>(S.size()), static_cast<int>(S[0].rows()),
            static_cast<int>(A[0].cols()), static_cast<int>(S[0].cols())};
  for (std::size_t k = 0; k < S.size(); ++k) {
    if (S[k].cols() != A[k].rows() || S[k].rows() != X.dims.L ||
        A[k].cols() != X.dims.N)
      throw DimensionError("forward_mix: inconsistent frame shapes");
    X.frames.push_back(S[k] * A[k]);
  }
  return X;
}

/// First-frame abundance map from overlapping circles. Pixels inside m
/// circles get 1/m on each of those sources; pixels outside every circle
/// get abundance 1 on the source with the nearest circle center.
inline Matrix make_circle_abundances(const Dims& dims,
                                     const CircleGeometry& geom) {
  dims.validate();
  geom.validate(dims);
  Matrix A = Matrix::Zero(dims.P, dims.N);
  for (int iy = 0; iy < geom.height; ++iy) {
    for (int ix = 0; ix < geom.width; ++ix) {
      int n = iy * geom.width + ix;
      double px = ix + 1, py = iy + 1;
      std::vector<int> inside;
      int nearest = 0;
      double best = std::numeric_limits<double>::infinity();
      for (int p = 0; p < dims.P; ++p) {
        const Circle& c = geom.circles[p];
        double d2 = (px - c.cx) * (px - c.cx) + (py - c.cy) * (py - c.cy);
        if (d2 <= c.radius * c.radius) inside.push_back(p);
        if (d2 < best) {
          best = d2;
          nearest = p;
        }
      }
      if (inside.empty()) {
        A(nearest, n) = 1.0;
      } else {
        for (int p : inside) A(p, n) = 1.0 / inside.size();
      }
    }
  }
  return A;
}

/// psi_k^p = 1 + amplitude * sin(2*pi*(k-1)/K + 2*pi*(p-1)/P):
/// one full sinusoid period over the K frames, phase-offset per source.
inline ScaleSeries make_sinusoid_scales(const Dims& dims, double amplitude) {
  dims.validate();
  if (amplitude < 0 || amplitude >= 1)
    throw ConfigError("make_sinusoid_scales: amplitude must be in [0,1)");
  ScaleSeries psi(dims.K, dims.P);
  for (int k = 0; k < dims.K; ++k)
    for (int p = 0; p < dims.P; ++p)
      psi(k, p) = 1.0 + amplitude * std::sin(2.0 * std::numbers::pi * k / dims.K +
                                             2.0 * std::numbers::pi * p / dims.P);
  return psi;
}

/// Smooth synthetic reference spectra: per source, the sum of three
/// Gaussian bumps with source-specific centers, normalized to peak 1.
inline ReferenceSpectra make_bump_spectra(int L, int P) {
  if (L < 1 || P < 1) throw ConfigError("make_bump_spectra: bad dims");
  Matrix S0 = Matrix::Zero(L, P);
  for (int p = 0; p < P; ++p) {
    for (int j = 0; j < 3; ++j) {
      // centers interleaved across sources so spectra stay distinct
      double center = std::fmod(L * (0.12 + 0.3 * j + 0.17 * p),
                                static_cast<double>(L));
      double width = L * (0.05 + 0.02 * ((p + j) % 3));
      double height = 0.5 + 0.5 * ((j + 2 * p) % 3) / 2.0;
      for (int l = 0; l < L; ++l) {
        double t = (l - center) / width;
        S0(l, p) += height * std::exp(-0.5 * t * t);
      }
    }
    S0.col(p) /= S0.col(p).maxCoeff();
  }
  return S0;
}

struct GeneratorOptions {
  double amplitude = 0.2;     // sinusoid amplitude of the scale factors
  bool ntf1 = false;          // force V_k = 0 so S_k = S0 psi_k exactly
  ReferenceSpectra spectra;   // empty -> synthetic bump spectra
};

/// Realizes the simplified dynamic system on a fixed random stream:
///   A_1 from circles; A_k = max(A_{k-1} + D_k, 0), D_k sparse Laplacian;
///   S_k = max(S0 psi_k + V_k, 0); X_k = S_k A_k + E_k.
/// Draw order (one CounterRng stream seeded with noise.seed): D entries
/// column-major for k = 2..K (one uniform per entry, plus one Laplacian
/// when the entry is active), then V entries column-major for k = 1..K
/// (skipped in NTF1 mode), then E entries column-major for k = 1..K.
/// Identical inputs give bit-identical outputs.
inline std::pair<FrameSequence, GroundTruth> generate_synthetic(
    const Dims& dims, const CircleGeometry& geom, const NoiseSpec& noise,
    const GeneratorOptions& opts = {}) {
  dims.validate();
  noise.validate();
  GroundTruth gt;
  gt.S0 = opts.spectra.size() > 0 ? opts.spectra
                                  : make_bump_spectra(dims.L, dims.P);
  if (gt.S0.rows() != dims.L || gt.S0.cols() != dims.P)
    throw DimensionError("generate_synthetic: reference spectra must be L x P");
  if ((gt.S0.array() < 0).any())
    throw ConfigError("generate_synthetic: reference spectra must be >= 0");
  for (int p = 0; p < dims.P; ++p)
    if (gt.S0.col(p).isZero())
      throw ConfigError("generate_synthetic: all-zero reference column");

  CounterRng rng(noise.seed);

  gt.A.push_back(make_circle_abundances(dims, geom));
  for (int k = 1; k < dims.K; ++k) {
    Matrix D(dims.P, dims.N);
    for (int n = 0; n < dims.N; ++n)
      for (int p = 0; p < dims.P; ++p)
        D(p, n) = rng.uniform() < noise.change_density
                      ? rng.laplacian(noise.b)
                      : 0.0;
    Matrix A = (gt.A.back() + D).cwiseMax(0.0);
    gt.D.push_back(A - gt.A.back());  // clamp folded back into D
    gt.A.push_back(std::move(A));
  }

  gt.psi = make_sinusoid_scales(dims, opts.amplitude);
  for (int k = 0; k < dims.K; ++k) {
    Matrix S = gt.S0 * gt.psi.row(k).asDiagonal();
    if (!opts.ntf1) {
      for (int p = 0; p < dims.P; ++p)
        for (int l = 0; l < dims.L; ++l)
          S(l, p) += noise.sigma_v * rng.gaussian();
      S = S.cwiseMax(0.0);
    }
    gt.S.push_back(std::move(S));
  }

  FrameSequence X;
  X.dims = dims;
  for (int k = 0; k < dims.K; ++k) {
    Matrix E(dims.L, dims.N);
    for (int n = 0; n < dims.N; ++n)
      for (int l = 0; l < dims.L; ++l)
        E(l, n) = noise.sigma_e * rng.gaussian();
    Matrix mix = gt.S[k] * gt.A[k];
    X.frames.push_back(mix + E);
    gt.E.push_back(X.frames.back() - mix);  // rounding folded back into E
  }
  return {std::move(X), std::move(gt)};
}

/// NTF1 special case: X_k = S0 psi_k A_k + E_k (no spectral distortion).
inline std::pair<FrameSequence, GroundTruth> generate_ntf1(
    const Dims& dims, const CircleGeometry& geom, const NoiseSpec& noise,
    GeneratorOptions opts = {}) {
  opts.ntf1 = true;
  return generate_synthetic(dims, geom, noise, opts);
}

}  // namespace hsdu

#endif
