#pragma once

// Gaussian states and symplectic layers.
//
// A state is its covariance matrix g and displacement d; the vacuum has
// g = 1, d = 0. A layer (M, d') acts on the quadratures as R -> M R + d',
// so on the state as g -> M g M^T, d -> M d + d'. Layers are composed in
// physical order: the vacuum-side layer first.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "gbs/core.hpp"

namespace gbs {

class GaussianState {
 public:
  /// Validates symmetry (1e-12, scaled by the largest entry) and positive
  /// definiteness.
  GaussianState(Mat cov, Vec disp) : cov_(std::move(cov)), disp_(std::move(disp)) {
    require(cov_.rows() == cov_.cols(), "GaussianState: covariance must be square");
    require(cov_.rows() > 0 && cov_.rows() % 2 == 0, "GaussianState: dimension must be 2*n_modes");
    require(disp_.size() == cov_.rows(), "GaussianState: displacement length mismatch");
    const double scale = std::max(1.0, max_abs(cov_));
    if (max_abs(cov_ - cov_.transpose()) >= 1e-12 * scale)
      throw NumericalError("GaussianState: covariance is not symmetric");
    if (!cov_.allFinite() || !disp_.allFinite())
      throw NumericalError("GaussianState: non-finite entries");
    Eigen::LLT<Mat> llt(cov_);
    if (llt.info() != Eigen::Success)
      throw NumericalError("GaussianState: covariance is not positive definite");
  }

  int n_modes() const { return static_cast<int>(cov_.rows() / 2); }
  int dim() const { return static_cast<int>(cov_.rows()); }
  const Mat& cov() const { return cov_; }
  const Vec& disp() const { return disp_; }

 private:
  Mat cov_;
  Vec disp_;
};

class SymplecticMap {
 public:
  /// Rejects matrices violating M J M^T = J beyond 1e-9 * max(1, |M|_max^2).
  SymplecticMap(Mat mat, Vec shift) : mat_(std::move(mat)), shift_(std::move(shift)) {
    require(mat_.rows() == mat_.cols(), "SymplecticMap: matrix must be square");
    require(mat_.rows() > 0 && mat_.rows() % 2 == 0, "SymplecticMap: dimension must be even");
    require(shift_.size() == mat_.rows(), "SymplecticMap: shift length mismatch");
    const double scale = std::max(1.0, max_abs(mat_));
    if (symplectic_defect(mat_) > 1e-9 * scale * scale)
      throw std::invalid_argument("SymplecticMap: matrix is not symplectic");
  }

  static SymplecticMap identity(int n_modes) {
    return {Mat::Identity(2 * n_modes, 2 * n_modes), Vec::Zero(2 * n_modes)};
  }

  int n_modes() const { return static_cast<int>(mat_.rows() / 2); }
  int dim() const { return static_cast<int>(mat_.rows()); }
  const Mat& mat() const { return mat_; }
  const Vec& shift() const { return shift_; }

 private:
  Mat mat_;
  Vec shift_;
};

inline GaussianState vacuum(int n_modes) {
  require(n_modes >= 1, "vacuum: n_modes must be >= 1");
  const int n = 2 * n_modes;
  return {Mat::Identity(n, n), Vec::Zero(n)};
}

/// 2x2 squeezing block cosh(r) I - sinh(r) (cos(phi) Z + sin(phi) X).
template <typename T>
Eigen::Matrix<T, 2, 2> squeezing_block(T r, T phi) {
  using std::cos, std::cosh, std::sin, std::sinh;
  const T c = cosh(r), s = sinh(r);
  Eigen::Matrix<T, 2, 2> b;
  b << c - s * cos(phi), -s * sin(phi),
       -s * sin(phi), c + s * cos(phi);
  return b;
}

inline SymplecticMap squeezer(int mode, double r, double phi, int n_modes) {
  require(n_modes >= 1, "squeezer: n_modes must be >= 1");
  require(mode >= 0 && mode < n_modes, "squeezer: mode out of range");
  require(r >= 0.0, "squeezer: r must be non-negative");
  Mat m = Mat::Identity(2 * n_modes, 2 * n_modes);
  m.block<2, 2>(2 * mode, 2 * mode) = squeezing_block(r, phi);
  return {std::move(m), Vec::Zero(2 * n_modes)};
}

/// Real orthogonal-symplectic image of a complex n x n matrix U = X + iY.
///
/// In mode-blocked order (all q, then all p) the image is [[X, -Y], [Y, X]];
/// conjugating by the interleaving permutation makes block (i, j) equal to
/// [[X_ij, -Y_ij], [Y_ij, X_ij]], which is what is written here.
template <typename T>
MatT<T> passive_embedding(const MatT<T>& re, const MatT<T>& im) {
  const Eigen::Index n = re.rows();
  MatT<T> m(2 * n, 2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      m(2 * i, 2 * j) = re(i, j);
      m(2 * i, 2 * j + 1) = -im(i, j);
      m(2 * i + 1, 2 * j) = im(i, j);
      m(2 * i + 1, 2 * j + 1) = re(i, j);
    }
  }
  return m;
}

inline Mat passive_embedding(const CMat& u) {
  return passive_embedding<double>(u.real(), u.imag());
}

inline SymplecticMap interferometer_map(const CMat& u) {
  require(u.rows() == u.cols() && u.rows() >= 1, "interferometer_map: U must be square");
  if (unitarity_defect(u) >= 1e-10)
    throw std::invalid_argument("interferometer_map: U is not unitary");
  return {passive_embedding(u), Vec::Zero(2 * u.rows())};
}

inline GaussianState apply(const SymplecticMap& map, const GaussianState& state) {
  require(map.dim() == state.dim(), "apply: dimension mismatch");
  Mat cov = map.mat() * state.cov() * map.mat().transpose();
  cov = 0.5 * (cov + cov.transpose()).eval();
  return {std::move(cov), map.mat() * state.disp() + map.shift()};
}

/// Single map equivalent to applying maps[0], then maps[1], ...
inline SymplecticMap compose(std::span<const SymplecticMap> maps) {
  require(!maps.empty(), "compose: empty map list");
  Mat m = maps.front().mat();
  Vec s = maps.front().shift();
  for (const auto& next : maps.subspan(1)) {
    require(next.dim() == m.rows(), "compose: dimension mismatch");
    s = next.mat() * s + next.shift();
    m = next.mat() * m;
  }
  return {std::move(m), std::move(s)};
}

inline SymplecticMap compose(std::initializer_list<SymplecticMap> maps) {
  return compose(std::span<const SymplecticMap>(maps.begin(), maps.size()));
}

/// chi(x) = exp(-x g x^T / 4 + i x d)
inline Complex chi(const GaussianState& state, const Vec& x) {
  require(x.size() == state.dim(), "chi: argument length mismatch");
  const double quad = x.dot(state.cov() * x);
  return std::exp(Complex(-0.25 * quad, x.dot(state.disp())));
}

}  // namespace gbs
