#include <gtest/gtest.h>

#include <random>

#include "gbs/gaussian.hpp"
#include "gbs/haar.hpp"
#include "test_util.hpp"

using namespace gbs;

namespace {

Mat rotation(double theta) {
  Mat r(2, 2);
  r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return r;
}

}  // namespace

TEST(Vacuum, IdentityCovarianceZeroMean) {
  const auto v = vacuum(3);
  EXPECT_EQ(v.n_modes(), 3);
  EXPECT_EQ(v.cov(), Mat::Identity(6, 6));
  EXPECT_EQ(v.disp(), Vec::Zero(6));
  EXPECT_THROW(vacuum(0), std::invalid_argument);
}

TEST(GaussianState, RejectsInvalidCovariances) {
  EXPECT_THROW(GaussianState(Mat::Identity(3, 3), Vec::Zero(3)), std::invalid_argument);
  EXPECT_THROW(GaussianState(Mat::Identity(2, 2), Vec::Zero(4)), std::invalid_argument);
  Mat asym = Mat::Identity(2, 2);
  asym(0, 1) = 0.1;
  EXPECT_THROW(GaussianState(asym, Vec::Zero(2)), NumericalError);
  Mat indefinite = Mat::Identity(2, 2);
  indefinite(1, 1) = -1.0;
  EXPECT_THROW(GaussianState(indefinite, Vec::Zero(2)), NumericalError);
  Mat nan = Mat::Identity(2, 2);
  nan(0, 0) = std::nan("");
  EXPECT_THROW(GaussianState(nan, Vec::Zero(2)), NumericalError);
}

TEST(SymplecticMap, RejectsNonSymplectic) {
  Mat m = Mat::Identity(2, 2);
  m(0, 0) = 2.0;
  EXPECT_THROW(SymplecticMap(m, Vec::Zero(2)), std::invalid_argument);
  EXPECT_THROW(SymplecticMap(Mat::Identity(2, 2), Vec::Zero(3)), std::invalid_argument);
  EXPECT_NO_THROW(SymplecticMap::identity(4));
}

TEST(Squeezer, RealSqueezingIsDiagonal) {
  const double r = 0.88;
  const auto s = apply(squeezer(0, r, 0.0, 1), vacuum(1));
  EXPECT_NEAR(s.cov()(0, 0), std::exp(-2 * r), 1e-14);
  EXPECT_NEAR(s.cov()(1, 1), std::exp(2 * r), 1e-13);
  EXPECT_NEAR(s.cov()(0, 1), 0.0, 1e-14);
}

TEST(Squeezer, BlockIsSymplecticForAnyPhase) {
  for (double phi : {0.0, 0.4, M_PI / 4, 2.0, 5.5}) {
    const auto s = squeezer(1, 0.7, phi, 3);
    EXPECT_LT(symplectic_defect(s.mat()), 1e-12);
    EXPECT_NEAR(squeezing_block(0.7, phi).determinant(), 1.0, 1e-13);
  }
}

TEST(Squeezer, PhaseIsRotatedRealSqueezing) {
  const double r = 0.6, phi = 1.1;
  const Mat want = rotation(phi / 2) * squeezing_block(r, 0.0) * rotation(phi / 2).transpose();
  EXPECT_LT(max_abs(Mat(squeezing_block(r, phi)) - want), 1e-14);
}

TEST(Squeezer, ZeroRIsIdentityAndErrors) {
  EXPECT_EQ(squeezer(0, 0.0, 1.3, 2).mat(), Mat::Identity(4, 4));
  EXPECT_THROW(squeezer(2, 0.1, 0.0, 2), std::invalid_argument);
  EXPECT_THROW(squeezer(0, -0.1, 0.0, 2), std::invalid_argument);
}

TEST(Interferometer, SwapExchangesModes) {
  CMat u(2, 2);
  u << 0, 1, 1, 0;
  const auto sq = apply(squeezer(0, 0.5, 0.0, 2), vacuum(2));
  const auto out = apply(interferometer_map(u), sq);
  EXPECT_NEAR(out.cov()(2, 2), std::exp(-1.0), 1e-14);
  EXPECT_NEAR(out.cov()(3, 3), std::exp(1.0), 1e-14);
  EXPECT_NEAR(out.cov()(0, 0), 1.0, 1e-14);
}

TEST(Interferometer, SinglePhaseRotatesQuadratures) {
  const double theta = 0.3;
  CMat u(1, 1);
  u(0, 0) = std::polar(1.0, theta);
  EXPECT_LT(max_abs(interferometer_map(u).mat() - rotation(theta)), 1e-15);
  const SymplecticMap shift(Mat::Identity(2, 2), (Vec(2) << 1.0, 0.0).finished());
  const auto out = apply(interferometer_map(u), apply(shift, vacuum(1)));
  EXPECT_NEAR(out.disp()(0), std::cos(theta), 1e-15);
  EXPECT_NEAR(out.disp()(1), std::sin(theta), 1e-15);
}

TEST(Interferometer, EmbeddingIsOrthogonalSymplecticHomomorphism) {
  const CMat u = haar_unitary(4, 3), v = haar_unitary(4, 4);
  const Mat mu = passive_embedding(u), mv = passive_embedding(v);
  EXPECT_LT(max_abs(mu * mu.transpose() - Mat::Identity(8, 8)), 1e-13);
  EXPECT_LT(symplectic_defect(mu), 1e-13);
  EXPECT_LT(max_abs(passive_embedding(CMat(u * v)) - mu * mv), 1e-13);
}

TEST(Interferometer, RejectsNonUnitary) {
  CMat u = CMat::Identity(2, 2);
  u(0, 0) = 1.01;
  EXPECT_THROW(interferometer_map(u), std::invalid_argument);
}

TEST(Apply, CovarianceStaysSymmetricAndPositive) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = gbs::testing::random_state(3, rng, true);
    EXPECT_EQ(s.cov(), s.cov().transpose());
    // Uncertainty principle: g + i Omega >= 0.
    Eigen::MatrixXcd h = s.cov().cast<Complex>() + Complex(0, 1) * symplectic_form(3).cast<Complex>();
    EXPECT_GT(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(h).eigenvalues().minCoeff(), -1e-10);
  }
}

TEST(Apply, CharacteristicFunctionPullback) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> normal(0.0, 0.5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = gbs::testing::random_state(2, rng, true);
    const auto map = gbs::testing::random_map(2, rng, true);
    Vec x(4);
    for (auto& v : x) v = normal(rng);
    const Vec pulled = map.mat().transpose() * x;
    const Complex want = chi(s, pulled) * std::exp(Complex(0, x.dot(map.shift())));
    EXPECT_LT(std::abs(chi(apply(map, s), x) - want), 1e-12);
  }
}

TEST(Chi, VacuumIsGaussian) {
  const Vec x = (Vec(2) << 0.3, -1.2).finished();
  EXPECT_NEAR(chi(vacuum(1), x).real(), std::exp(-x.squaredNorm() / 4), 1e-15);
  EXPECT_NEAR(chi(vacuum(1), x).imag(), 0.0, 1e-15);
  EXPECT_THROW(chi(vacuum(2), x), std::invalid_argument);
}

TEST(Compose, MatchesSequentialApplication) {
  std::mt19937_64 rng(3);
  const auto a = gbs::testing::random_map(3, rng, true);
  const auto b = gbs::testing::random_map(3, rng, true);
  const auto c = gbs::testing::random_map(3, rng, true);
  const auto s = gbs::testing::random_state(3, rng, true);
  const auto seq = apply(c, apply(b, apply(a, s)));
  const auto once = apply(compose({a, b, c}), s);
  const auto nested = apply(compose({compose({a, b}), c}), s);
  EXPECT_LT(max_abs(seq.cov() - once.cov()), 1e-10 * (1 + max_abs(seq.cov())));
  EXPECT_LT(max_abs(seq.disp() - once.disp()), 1e-10 * (1 + max_abs(seq.disp())));
  EXPECT_LT(max_abs(nested.cov() - once.cov()), 1e-10 * (1 + max_abs(seq.cov())));
  EXPECT_THROW(compose(std::span<const SymplecticMap>{}), std::invalid_argument);
}

TEST(Compose, SqueezersOnDistinctModesCommute) {
  const auto a = squeezer(0, 0.4, 0.2, 2), b = squeezer(1, 0.9, 1.7, 2);
  EXPECT_LT(max_abs(compose({a, b}).mat() - compose({b, a}).mat()), 1e-15);
}
