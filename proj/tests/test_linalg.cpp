#include <neqm/linalg.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace neqm;

namespace {

Matrix<Real> random_matrix(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-1, 1);
  Matrix<Real> m(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) m(r, c) = u(rng);
  return m;
}

Matrix<Real> product(const Matrix<Real>& a, const Matrix<Real>& b) {
  Matrix<Real> out(a.rows(), b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < b.cols(); ++c) {
      Real s = 0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += a(r, k) * b(k, c);
      out(r, c) = s;
    }
  return out;
}

}  // namespace

TEST(ScaledValue, RoundTripAndNormalization) {
  for (double x : {1.0, -3.5, 0.1, 1e-300, -7e250}) {
    auto v = ScaledValue<double>::from(x);
    EXPECT_EQ(v.value(), x);
    EXPECT_GE(v.mantissa, 1.0);
    EXPECT_LT(v.mantissa, 2.0);
  }
  EXPECT_TRUE(ScaledValue<double>::from(0.0).is_zero());
}

TEST(ScaledValue, ExponentBeyondDoubleRange) {
  auto big = ScaledValue<double>::from(1.5);
  big.scale_pow2(5000);
  auto prod = big * big;
  EXPECT_EQ(prod.exponent, 10000 + 1);
  EXPECT_DOUBLE_EQ(prod.mantissa, 1.125);
  EXPECT_NEAR(prod.log2_abs(), 10001 + std::log2(1.125), 1e-9);
  EXPECT_EQ((-prod).sign, -1);
}

TEST(ScaledValue, RelativeDifference) {
  auto a = ScaledValue<double>::from(3.0);
  auto b = ScaledValue<double>::from(3.0 * (1 + 1e-12));
  EXPECT_NEAR(relative_difference(a, b), 1e-12, 1e-15);
  EXPECT_TRUE(std::isinf(relative_difference(a, ScaledValue<double>::zero())));
  EXPECT_DOUBLE_EQ(relative_difference(a, -a), 2.0);
}

TEST(Determinant, KnownValues) {
  Matrix<double> m(3, 3);
  // permuted diagonal: det = -(2 * 3 * 5)
  m(0, 1) = 2;
  m(1, 0) = 3;
  m(2, 2) = 5;
  EXPECT_DOUBLE_EQ(determinant(m).value(), -30.0);
  EXPECT_DOUBLE_EQ(determinant(m, {false, Pivoting::full}).value(), -30.0);
}

TEST(Determinant, HilbertMatrix) {
  PrecisionScope prec(256);
  const std::size_t n = 6;
  Matrix<Real> h(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) h(r, c) = Real(1) / Real(r + c + 1);
  // 1 / 186313420339200000
  Real ref = Real(1) / Real("186313420339200000");
  for (auto opts : {DetOptions{true, Pivoting::partial}, DetOptions{false, Pivoting::partial},
                    DetOptions{true, Pivoting::full}}) {
    Real d = determinant(h, opts).value();
    EXPECT_LT(to_double(Real(abs(d - ref) / ref)), 1e-60);
  }
}

TEST(Determinant, SingularGivesSignZero) {
  Matrix<double> m(3, 3);
  m(0, 0) = 1;
  m(0, 1) = 2;
  m(1, 0) = 2;
  m(1, 1) = 4;
  m(2, 2) = 1;
  EXPECT_EQ(determinant(m).sign, 0);
  Matrix<double> z(2, 2);
  EXPECT_EQ(determinant(z).sign, 0);
  EXPECT_THROW(determinant(Matrix<double>(2, 3)), std::invalid_argument);
}

TEST(Determinant, MultiplicativeOnRandomMatrices) {
  PrecisionScope prec(256);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 20; ++i) {
    auto a = random_matrix(rng, 8), b = random_matrix(rng, 8);
    auto lhs = determinant(product(a, b));
    auto rhs = determinant(a) * determinant(b);
    EXPECT_LT(to_double(relative_difference(lhs, rhs)), 1e-60);
  }
}

TEST(Equilibrate, PowerOfTwoScalingPreservesDeterminant) {
  PrecisionScope prec(256);
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> ue(-900, 900);
  for (int i = 0; i < 10; ++i) {
    auto a = random_matrix(rng, 7);
    for (std::size_t r = 0; r < 7; ++r) {
      int e = ue(rng);
      for (std::size_t c = 0; c < 7; ++c) a(r, c) = times_pow2(a(r, c), e);
    }
    auto on = determinant(a, {true, Pivoting::partial});
    auto off = determinant(a, {false, Pivoting::partial});
    EXPECT_EQ(on.sign, off.sign);
    EXPECT_LT(to_double(relative_difference(on, off)), 1e-60);

    Matrix<Real> copy = a;
    auto eq = equilibrate(copy);
    for (std::size_t r = 0; r < 7; ++r) {
      Real best = 0;
      for (std::size_t c = 0; c < 7; ++c) best = std::max<Real>(best, abs(copy(r, c)));
      EXPECT_GE(best, Real(0.5));
      EXPECT_LT(best, Real(1));
      for (std::size_t c = 0; c < 7; ++c)
        EXPECT_EQ(times_pow2(copy(r, c), eq.row_exp[r] + eq.col_exp[c]), a(r, c));
    }
  }
}

TEST(LuFactorize, RectangularFullPivoting) {
  PrecisionScope prec(256);
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-1, 1);
  Matrix<Real> a(3, 4);
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 4; ++c) a(r, c) = u(rng);
  auto f = lu_factorize(a, Pivoting::full);
  EXPECT_FALSE(f.singular);
  // pivots are the largest remaining entries, so |l_ij| <= 1
  for (std::size_t r = 1; r < 3; ++r)
    for (std::size_t c = 0; c < r; ++c) EXPECT_LE(abs(f.lu(r, c)), Real(1));
  std::vector<bool> seen(4, false);
  for (auto c : f.col_perm) seen[c] = true;
  for (bool s : seen) EXPECT_TRUE(s);
}
