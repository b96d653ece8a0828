// Temporal Hankel embedding of dynamic k-space and its rank-a projection.
//
// Every voxel's time series s_0..s_{T-1} becomes an L x w block B[l][c] = s_{l+c},
// L = T - w + 1. Blocks are stacked voxel-major (voxel y*W + x owns rows
// [(y*W + x)*L, (y*W + x + 1)*L)), so the embedded matrix is (H*W*L) x w.
#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <complex>

#include "ddugm/tensor.hpp"

namespace ddugm {

using EmbeddedMatrix = Eigen::MatrixXcd;

struct HankelConfig {
  std::size_t window = 2;
  std::size_t rank = 1;

  std::size_t rows_per_voxel(std::size_t frames) const { return frames - window + 1; }

  void validate(std::size_t frames) const {
    if (window < 2 || window > frames)
      throw std::invalid_argument("Hankel window " + std::to_string(window) + " must lie in [2, " +
                                  std::to_string(frames) + "]");
    if (rank < 1 || rank > window)
      throw std::invalid_argument("Hankel rank " + std::to_string(rank) + " must lie in [1, " + std::to_string(window) + "]");
  }
};

/// w = floor(T/2) + 1 and a = min(6, w - 1); for T = 16 this gives w = 9, a = 6.
inline HankelConfig default_hankel_config(std::size_t frames) {
  HankelConfig cfg;
  cfg.window = std::clamp<std::size_t>(frames / 2 + 1, 2, std::max<std::size_t>(frames, 2));
  cfg.rank = std::max<std::size_t>(1, std::min<std::size_t>(6, cfg.window - 1));
  return cfg;
}

inline EmbeddedMatrix hankel_embed(const DynamicTensor& v, const HankelConfig& cfg) {
  cfg.validate(v.frames());
  const std::size_t voxels = v.shape().frame_size();
  const std::size_t L = cfg.rows_per_voxel(v.frames());
  const std::size_t w = cfg.window;
  EmbeddedMatrix A(static_cast<Eigen::Index>(voxels * L), static_cast<Eigen::Index>(w));
  for (std::size_t p = 0; p < voxels; ++p)
    for (std::size_t l = 0; l < L; ++l)
      for (std::size_t c = 0; c < w; ++c)
        A(static_cast<Eigen::Index>(p * L + l), static_cast<Eigen::Index>(c)) = v[(l + c) * voxels + p];
  return A;
}

/// Anti-diagonal averaging: sample t of each voxel is the mean of all block entries with l + c = t.
/// This is the least-squares inverse of hankel_embed.
inline DynamicTensor hankel_adjoint_avg(const EmbeddedMatrix& A, const HankelConfig& cfg, Shape3 dims) {
  cfg.validate(dims.frames);
  const std::size_t voxels = dims.frame_size();
  const std::size_t L = cfg.rows_per_voxel(dims.frames);
  const std::size_t w = cfg.window;
  if (static_cast<std::size_t>(A.rows()) != voxels * L || static_cast<std::size_t>(A.cols()) != w)
    throw std::invalid_argument("hankel_adjoint_avg: matrix is " + std::to_string(A.rows()) + "x" +
                                std::to_string(A.cols()) + ", expected " + std::to_string(voxels * L) + "x" +
                                std::to_string(w) + " for " + dims.str());
  DynamicTensor out(dims);
  std::vector<double> counts(dims.frames, 0.0);
  for (std::size_t l = 0; l < L; ++l)
    for (std::size_t c = 0; c < w; ++c) counts[l + c] += 1.0;
  for (std::size_t p = 0; p < voxels; ++p) {
    for (std::size_t l = 0; l < L; ++l)
      for (std::size_t c = 0; c < w; ++c)
        out[(l + c) * voxels + p] += A(static_cast<Eigen::Index>(p * L + l), static_cast<Eigen::Index>(c));
    for (std::size_t t = 0; t < dims.frames; ++t) out[t * voxels + p] /= counts[t];
  }
  return out;
}

struct TruncatedSvd {
  Eigen::MatrixXcd U;       // rows x a
  Eigen::VectorXd S;        // a, descending
  Eigen::MatrixXcd V;       // cols x a

  Eigen::MatrixXcd recompose() const { return U * S.asDiagonal() * V.adjoint(); }
};

/// Top-a singular triplets. Each left singular vector is rotated so that its
/// largest-magnitude entry is real and positive (V rotated to match).
inline TruncatedSvd truncated_svd(const Eigen::MatrixXcd& A, std::size_t rank) {
  const auto limit = static_cast<std::size_t>(std::min(A.rows(), A.cols()));
  if (rank < 1 || rank > limit)
    throw std::invalid_argument("svd rank " + std::to_string(rank) + " outside [1, " + std::to_string(limit) + "]");
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto a = static_cast<Eigen::Index>(rank);
  TruncatedSvd out{svd.matrixU().leftCols(a), svd.singularValues().head(a), svd.matrixV().leftCols(a)};
  for (Eigen::Index k = 0; k < a; ++k) {
    Eigen::Index arg = 0;
    out.U.col(k).cwiseAbs().maxCoeff(&arg);
    const std::complex<double> pivot = out.U(arg, k);
    if (std::abs(pivot) == 0.0) continue;
    const std::complex<double> phase = std::conj(pivot) / std::abs(pivot);
    out.U.col(k) *= phase;
    out.V.col(k) *= phase;
  }
  return out;
}

/// Best rank-a approximation in Frobenius norm.
inline EmbeddedMatrix svd_hard_threshold(const EmbeddedMatrix& A, std::size_t rank) {
  return truncated_svd(A, rank).recompose();
}

inline DynamicTensor lowrank_project(const DynamicTensor& v, const HankelConfig& cfg) {
  return hankel_adjoint_avg(svd_hard_threshold(hankel_embed(v, cfg), cfg.rank), cfg, v.shape());
}

}  // namespace ddugm
