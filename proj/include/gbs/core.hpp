#pragma once

// Shared aliases, error types and the symplectic form.
//
// Quadratures are interleaved: index 2j is q_j, index 2j+1 is p_j.

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace gbs {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using Complex = std::complex<double>;

template <typename T> using MatT = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <typename T> using VecT = Eigen::Matrix<T, Eigen::Dynamic, 1>;

/// A computation produced a non-finite or physically impossible result.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument(what);
}

template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.size() == 0 ? 0.0 : static_cast<double>(m.cwiseAbs().maxCoeff());
}

/// Block-diagonal J = (+) [[0,1],[-1,0]] over n_modes modes.
inline Mat symplectic_form(int n_modes) {
  Mat j = Mat::Zero(2 * n_modes, 2 * n_modes);
  for (int m = 0; m < n_modes; ++m) {
    j(2 * m, 2 * m + 1) = 1.0;
    j(2 * m + 1, 2 * m) = -1.0;
  }
  return j;
}

/// max |M J M^T - J|
inline double symplectic_defect(const Mat& m) {
  const Mat j = symplectic_form(static_cast<int>(m.rows() / 2));
  return max_abs(m * j * m.transpose() - j);
}

inline double unitarity_defect(const CMat& u) {
  return max_abs(u * u.adjoint() - CMat::Identity(u.rows(), u.cols()));
}

}  // namespace gbs
