#include <gtest/gtest.h>

#include <random>

#include "gbs/jet.hpp"
#include "test_util.hpp"

using namespace gbs;
using gbs::testing::FiniteDifferenceOracle;
using gbs::testing::random_form;

namespace {

QuadraticExponentForm<double> zero_form(int nv) { return {Mat::Zero(nv, nv), Vec::Zero(nv), 0.0}; }

void expect_matches_oracle(const QuadraticExponentForm<double>& form, const DegreeCaps& caps) {
  const auto jet = jet_from_quadratic(form, caps);
  const FiniteDifferenceOracle oracle(form);
  for (std::size_t flat = 0; flat < caps.size(); ++flat) {
    const auto e = caps.exponents(flat);
    const std::vector<int> orders(e.begin(), e.end());
    const double want = oracle.coefficient(orders);
    EXPECT_NEAR(jet[flat], want, 1e-6 * std::abs(want) + 1e-10) << "flat index " << flat;
  }
}

}  // namespace

TEST(DegreeCaps, SizeIsProductAndIndexingRoundTrips) {
  const DegreeCaps caps({2, 0, 3});
  EXPECT_EQ(caps.size(), 12u);
  EXPECT_EQ(caps.total_degree(), 5);
  for (std::size_t flat = 0; flat < caps.size(); ++flat) EXPECT_EQ(caps.flat_index(caps.exponents(flat)), flat);
  EXPECT_THROW(DegreeCaps({1, -1}), std::invalid_argument);
}

TEST(JetFromQuadratic, ZeroFormIsConstantOne) {
  const auto jet = jet_from_quadratic(zero_form(2), DegreeCaps({2, 2}));
  EXPECT_EQ(jet[0], 1.0);
  for (std::size_t i = 1; i < jet.size(); ++i) EXPECT_EQ(jet[i], 0.0);
}

TEST(JetFromQuadratic, OneVariableGaussianSeries) {
  const double a = 0.7;
  QuadraticExponentForm<double> f{Mat::Constant(1, 1, a), Vec::Zero(1), 0.0};
  const auto jet = jet_from_quadratic(f, DegreeCaps({4}));
  EXPECT_DOUBLE_EQ(jet[0], 1.0);
  EXPECT_DOUBLE_EQ(jet[1], 0.0);
  EXPECT_DOUBLE_EQ(jet[2], a / 2);
  EXPECT_DOUBLE_EQ(jet[3], 0.0);
  EXPECT_DOUBLE_EQ(jet[4], a * a / 8);
}

TEST(JetFromQuadratic, ConstantScalesByExp) {
  QuadraticExponentForm<double> f{Mat::Zero(1, 1), Vec::Constant(1, 0.5), -0.3};
  const auto jet = jet_from_quadratic(f, DegreeCaps({3}));
  // e^{-0.3} e^{0.5 x}
  EXPECT_NEAR(jet[3], std::exp(-0.3) * 0.125 / 6, 1e-15);
}

TEST(JetFromQuadratic, RandomFourVariableFormMatchesFiniteDifferences) {
  std::mt19937_64 rng(1);
  expect_matches_oracle(random_form(4, rng), DegreeCaps({2, 2, 2, 2}));
}

TEST(JetFromQuadratic, OracleAgreementOnFiftyRandomForms) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    const int nv = 1 + static_cast<int>(rng() % 6);
    std::vector<int> caps(nv);
    std::size_t size = 1;
    for (auto& c : caps) {
      c = static_cast<int>(rng() % 3);
      if (size * (c + 1) > 81) c = 0;
      size *= c + 1;
    }
    SCOPED_TRACE(trial);
    expect_matches_oracle(random_form(nv, rng), DegreeCaps(caps));
  }
}

TEST(JetFromQuadratic, DimensionMismatchThrows) {
  EXPECT_THROW(jet_from_quadratic(zero_form(3), DegreeCaps({1, 1})), std::invalid_argument);
}

TEST(JetFromQuadratic, TruncationConsistency) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const auto form = random_form(3, rng);
    const DegreeCaps big({4, 3, 5}), small({2, 3, 1});
    const auto a = jet_from_quadratic(form, big).restrict_to(small);
    const auto b = jet_from_quadratic(form, small);
    for (std::size_t i = 0; i < small.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-13 * (1 + std::abs(b[i])));
  }
}

TEST(JetFromQuadratic, ExponentAdditivity) {
  std::mt19937_64 rng(4);
  const DegreeCaps caps({3, 2, 2});
  for (int trial = 0; trial < 10; ++trial) {
    const auto p = random_form(3, rng), q = random_form(3, rng);
    QuadraticExponentForm<double> sum{p.quad + q.quad, p.lin + q.lin, p.constant + q.constant};
    const auto prod = jet_multiply(jet_from_quadratic(p, caps), jet_from_quadratic(q, caps));
    const auto direct = jet_from_quadratic(sum, caps);
    for (std::size_t i = 0; i < caps.size(); ++i) EXPECT_NEAR(prod[i], direct[i], 1e-10 * (1 + std::abs(direct[i])));
  }
}

TEST(JetMultiply, IdentityElement) {
  std::mt19937_64 rng(5);
  const DegreeCaps caps({2, 3});
  const auto a = jet_from_quadratic(random_form(2, rng), caps);
  const auto one = JetPolynomial<double>(caps, 1.0);
  const auto b = jet_multiply(a, one);
  for (std::size_t i = 0; i < caps.size(); ++i) EXPECT_EQ(b[i], a[i]);
}

TEST(JetMultiply, TruncatesAtCaps) {
  const DegreeCaps c2({2}), c1({1});
  const auto x2 = jet_multiply(JetPolynomial<double>::variable(c2, 0), JetPolynomial<double>::variable(c2, 0));
  EXPECT_EQ(x2[2], 1.0);
  EXPECT_EQ(x2[0], 0.0);
  EXPECT_EQ(x2[1], 0.0);
  const auto x1 = jet_multiply(JetPolynomial<double>::variable(c1, 0), JetPolynomial<double>::variable(c1, 0));
  EXPECT_TRUE(x1.is_zero());
}

TEST(JetMultiply, CommutativeAndAssociative) {
  std::mt19937_64 rng(6);
  const DegreeCaps caps({2, 2, 1});
  const auto a = jet_from_quadratic(random_form(3, rng), caps);
  const auto b = jet_from_quadratic(random_form(3, rng), caps);
  const auto c = jet_from_quadratic(random_form(3, rng), caps);
  const auto ab = jet_multiply(a, b), ba = jet_multiply(b, a);
  const auto l = jet_multiply(ab, c), r = jet_multiply(a, jet_multiply(b, c));
  for (std::size_t i = 0; i < caps.size(); ++i) {
    EXPECT_NEAR(ab[i], ba[i], 1e-14 * (1 + std::abs(ab[i])));
    EXPECT_NEAR(l[i], r[i], 1e-12 * (1 + std::abs(l[i])));
  }
}

TEST(JetMultiply, CapsMismatchThrows) {
  EXPECT_THROW(jet_multiply(JetPolynomial<double>(DegreeCaps({1})), JetPolynomial<double>(DegreeCaps({2}))),
               std::invalid_argument);
}

TEST(ExtractMixedDerivative, Constant) {
  const JetPolynomial<double> c(DegreeCaps({2, 1}), 3.5);
  EXPECT_EQ(extract_mixed_derivative(c, {0, 0}), 3.5);
}

TEST(ExtractMixedDerivative, SecondDerivativeOfGaussian) {
  const double a = -1.3;
  QuadraticExponentForm<double> f{Mat::Constant(1, 1, a), Vec::Zero(1), 0.0};
  EXPECT_DOUBLE_EQ(extract_mixed_derivative(jet_from_quadratic(f, DegreeCaps({2})), {2}), a);
}

TEST(ExtractMixedDerivative, IsserlisPairing) {
  Mat q(2, 2);
  q << 0.8, -0.35, -0.35, 1.7;
  QuadraticExponentForm<double> f{q, Vec::Zero(2), 0.0};
  const auto jet = jet_from_quadratic(f, DegreeCaps({2, 2}));
  const double want = q(0, 0) * q(1, 1) + 2 * q(0, 1) * q(0, 1);
  EXPECT_NEAR(extract_mixed_derivative(jet, {2, 2}), want, 1e-14);
  EXPECT_NEAR(FiniteDifferenceOracle(f).derivative({2, 2}), want, 1e-9);
}

TEST(ExtractMixedDerivative, OrdersBeyondCapsThrow) {
  const JetPolynomial<double> c(DegreeCaps({2, 1}), 1.0);
  EXPECT_THROW(extract_mixed_derivative(c, {3, 0}), std::invalid_argument);
  EXPECT_THROW(extract_mixed_derivative(c, {0}), std::invalid_argument);
}

TEST(LaplacianPowerDerivative, ZeroPowersGiveConstant) {
  std::mt19937_64 rng(7);
  const auto form = random_form(2, rng);
  const auto jet = jet_from_quadratic(form, DegreeCaps({2, 2}));
  EXPECT_DOUBLE_EQ(laplacian_power_derivative(jet, {{0, 1, 0}}), jet[0]);
}

TEST(LaplacianPowerDerivative, SinglePairSecondMoment) {
  Mat q(2, 2);
  q << 0.4, 0.9, 0.9, -0.6;
  QuadraticExponentForm<double> f{q, Vec::Zero(2), 0.0};
  const auto jet = jet_from_quadratic(f, DegreeCaps({2, 2}));
  EXPECT_NEAR(laplacian_power_derivative(jet, {{0, 1, 1}}), q(0, 0) + q(1, 1), 1e-15);
  const FiniteDifferenceOracle fd(f);
  EXPECT_NEAR(fd.derivative({2, 0}) + fd.derivative({0, 2}), q(0, 0) + q(1, 1), 1e-9);
}

TEST(LaplacianPowerDerivative, TwoPairsMatchFiniteDifferences) {
  std::mt19937_64 rng(8);
  const auto form = random_form(4, rng);
  const auto jet = jet_from_quadratic(form, DegreeCaps({2, 2, 2, 2}));
  const FiniteDifferenceOracle fd(form);
  const double want =
      fd.derivative({2, 0, 2, 0}) + fd.derivative({2, 0, 0, 2}) + fd.derivative({0, 2, 2, 0}) + fd.derivative({0, 2, 0, 2});
  EXPECT_NEAR(laplacian_power_derivative(jet, {{0, 1, 1}, {2, 3, 1}}), want, 1e-6 * std::abs(want));
}

TEST(LaplacianPowerDerivative, SquaredLaplacianMatchesFiniteDifferences) {
  std::mt19937_64 rng(9);
  const auto form = random_form(2, rng);
  const auto jet = jet_from_quadratic(form, DegreeCaps({4, 4}));
  const FiniteDifferenceOracle fd(form);
  const double want = fd.derivative({4, 0}) + 2 * fd.derivative({2, 2}) + fd.derivative({0, 4});
  EXPECT_NEAR(laplacian_power_derivative(jet, {{0, 1, 2}}), want, 1e-6 * std::abs(want));
}

TEST(LaplacianPowerDerivative, CapsExceededThrows) {
  const JetPolynomial<double> c(DegreeCaps({2, 2}), 1.0);
  EXPECT_THROW(laplacian_power_derivative(c, {{0, 1, 2}}), std::invalid_argument);
}

TEST(JetDual, TangentIsDerivativeOfCoefficients) {
  // d/dt of the (2,2) coefficient of exp(k Q(t) k / 2) with Q(t) = Q + t E.
  Mat q(2, 2), e(2, 2);
  q << 0.5, 0.2, 0.2, -0.3;
  e << 0.0, 1.0, 1.0, 0.4;
  using D = Dual<double>;
  QuadraticExponentForm<D> f{MatT<D>(2, 2), VecT<D>::Constant(2, D(0)), D(0)};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) f.quad(i, j) = D(q(i, j), e(i, j));
  const D d = extract_mixed_derivative(jet_from_quadratic(f, DegreeCaps({2, 2})), {2, 2});
  // Q00 Q11 + 2 Q01^2
  EXPECT_NEAR(d.val, q(0, 0) * q(1, 1) + 2 * q(0, 1) * q(0, 1), 1e-15);
  EXPECT_NEAR(d.eps, e(0, 0) * q(1, 1) + q(0, 0) * e(1, 1) + 4 * q(0, 1) * e(0, 1), 1e-15);
}
