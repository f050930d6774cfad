#pragma once

// Haar-distributed unitaries by QR of a complex Ginibre matrix, with the
// diagonal of R normalized to positive reals (Mezzadri's construction).

#include <cstdint>
#include <random>

#include "gbs/core.hpp"

namespace gbs {

inline CMat haar_unitary(int n, std::uint64_t seed) {
  require(n >= 1, "haar_unitary: n must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(2.0));
  CMat z(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      z(i, j) = Complex(re, im);
    }
  Eigen::HouseholderQR<CMat> qr(z);
  CMat q = qr.householderQ();
  const CMat& r = qr.matrixQR();
  for (int j = 0; j < n; ++j) {
    const Complex d = r(j, j);
    const double mag = std::abs(d);
    q.col(j) *= mag > 0.0 ? d / mag : Complex(1.0);
  }
  return q;
}

}  // namespace gbs
