#include <neqm/matcher.hpp>
#include <neqm/qm_oracle.hpp>
#include <neqm/solver.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace neqm;

class MatcherTest : public ::testing::Test {
 protected:
  PrecisionScope prec{256};
};

TEST_F(MatcherTest, Dimensions) {
  Params p = Params::make(0.71, 200);
  Real mu = 1;
  EXPECT_EQ(assemble_even(mu, p, 3).dim(), 14u);
  EXPECT_EQ(assemble_odd(mu, p, 3).dim(), 14u);
  auto full = assemble_full(mu, p, 2);
  EXPECT_EQ(full.entries.rows(), 20u);
  EXPECT_EQ(full.entries.cols(), 20u);
  EXPECT_EQ(matching_orders(3), 13);
  EXPECT_EQ(sector_dim(3), 14u);
}

TEST_F(MatcherTest, CollapsesToStandardWellAtOrderZero) {
  Params p = Params::make(0.3, 50);
  Real mu = 2.1;
  Real rho = rho_of_mu(mu, p);
  auto e = assemble_even(mu, p, 0).entries;
  EXPECT_EQ(e(0, 0), exp(-rho));
  EXPECT_EQ(e(0, 1), -cos(mu));
  EXPECT_LT(to_double(Real(abs(e(1, 0) - rho * exp(-rho)))), 1e-70);
  EXPECT_LT(to_double(Real(abs(e(1, 1) + mu * sin(mu)))), 1e-70);
  auto o = assemble_odd(mu, p, 0).entries;
  EXPECT_LT(to_double(Real(abs(o(0, 1) - sin(mu)))), 1e-70);
  EXPECT_LT(to_double(Real(abs(o(1, 1) + mu * cos(mu)))), 1e-70);

  // the standard 4x4 matrix with (kappa, k) -> (rho, mu)
  auto full = assemble_full(mu, p, 0).entries;
  double k = to_double(mu), kap = to_double(rho);
  double ex = std::exp(-kap), c = std::cos(k), s = std::sin(k);
  double ref[4][4] = {{ex, -c, s, 0},
                      {kap * ex, -k * s, -k * c, 0},
                      {0, -c, -s, ex},
                      {0, k * s, -k * c, -kap * ex}};
  for (int r = 0; r < 4; ++r)
    for (int cc = 0; cc < 4; ++cc)
      EXPECT_NEAR(to_double(full(r, cc)), ref[r][cc], 1e-14) << r << "," << cc;
}

TEST_F(MatcherTest, FirstEntryIsOutsideAmplitudeAtWall) {
  Params p = Params::make(1.01, 5000);
  Real mu = 0.9;
  for (int L : {1, 2, 4})
    EXPECT_EQ(assemble_even(mu, p, L).entries(0, 0), exp(-rho_of_mu(mu, p)));
}

TEST_F(MatcherTest, FullMatrixZeroBlocks) {
  Params p = Params::make(0.71, 200);
  const int L = 2;
  auto m = assemble_full(Real(1.7), p, L).entries;
  const std::size_t k = 2 * L + 1, rows = 4 * L + 2;
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < k; ++c) {
      EXPECT_EQ(m(rows + r, c), 0);          // block (2,1)
      EXPECT_EQ(m(r, 3 * k + c), 0);         // block (1,4)
    }
}

TEST_F(MatcherTest, FactorizationIdentity) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> ub(0.05, 5), uv(1, 1000), uf(0.02, 0.98);
  for (int L = 0; L <= 3; ++L) {
    for (int i = 0; i < 10; ++i) {
      Params p = Params::make(ub(rng), uv(rng));
      Real mu = mu_max<Real>(p) * Real(uf(rng));
      auto full = scaled_det(assemble_full(mu, p, L));
      auto prod = full_det_factor<Real>(L) * scaled_det(assemble_even(mu, p, L)) *
                  scaled_det(assemble_odd(mu, p, L));
      EXPECT_LT(to_double(relative_difference(full, prod)), 1e-20) << "L=" << L;
    }
  }
  EXPECT_EQ(full_det_factor<Real>(0).value(), Real(-2));
  EXPECT_EQ(full_det_factor<Real>(3).value(), Real(-128));
}

TEST_F(MatcherTest, EquilibrationKeepsRootLocations) {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> ub(0.3, 3), uv(5, 300);
  for (int cfg = 0; cfg < 20; ++cfg) {
    Params p = Params::make(ub(rng), uv(rng));
    const int L = cfg % 3;
    for (int i = 1; i <= 40; ++i) {
      Real mu = mu_max<Real>(p) * Real(i) / 41;
      for (Parity par : {Parity::even, Parity::odd}) {
        auto m = assemble_sector(par, mu, p, L);
        auto on = scaled_det(m, {true, Pivoting::partial});
        auto off = scaled_det(m, {false, Pivoting::partial});
        EXPECT_EQ(on.sign, off.sign);
        EXPECT_LT(to_double(relative_difference(on, off)), 1e-40);
      }
    }
  }
}

TEST_F(MatcherTest, OrderZeroRootsApproachStandardWell) {
  Params p = Params::make(1e-3, 50);
  ScanConfig cfg;
  cfg.L = 0;
  auto table = spectrum(p, cfg);
  auto qm = qm::qm_spectrum(50);
  ASSERT_EQ(table.states.size(), qm.size());
  for (std::size_t i = 0; i < qm.size(); ++i) {
    EXPECT_LT(std::abs(table.states[i].mu - qm[i].k), 1e-3);
    EXPECT_EQ(table.states[i].parity, qm[i].parity);
  }
}

TEST_F(MatcherTest, AsymptoticFormVanishesAtStandardRoots) {
  const double v0 = 10;
  for (double k : qm::qm_even_roots(v0))
    EXPECT_NEAR(to_double(asymptotic_leading_det<Real>(1, Parity::even, Real(k), v0, 1.0)),
                0.0, 1e-10 * std::pow(2 * pi<double>(), 12) * 32);
  for (double k : qm::qm_odd_roots(v0))
    EXPECT_NEAR(to_double(asymptotic_leading_det<Real>(1, Parity::odd, Real(k), v0, 1.0)),
                0.0, 1e-10 * std::pow(2 * pi<double>(), 12) * 32);
  EXPECT_THROW(asymptotic_leading_det<Real>(1, Parity::even, Real(5), v0, 0.1),
               DomainError);
  EXPECT_THROW(asymptotic_leading_det<Real>(3, Parity::even, Real(1), v0, 0.1),
               std::invalid_argument);
}

// The sector determinants approach the closed form times 2^(-2L)
// (even) and -2^(-2L) (odd) as beta -> 0 at fixed E.
TEST_F(MatcherTest, AsymptoticRatioLimit) {
  const double v0 = 10, E = 1.0;
  const double k = std::sqrt(2 * E);
  for (int L : {1, 2}) {
    for (Parity par : {Parity::even, Parity::odd}) {
      double target = std::ldexp(par == Parity::even ? 1.0 : -1.0, -2 * L);
      double prev_err = 1e300;
      for (double beta : {1e-1, 1e-2, 1e-3}) {
        Params p = Params::make(beta, v0);
        Real mu = mu_of_energy(Real(E), p);
        auto det = scaled_det(assemble_sector(par, mu, p, L));
        auto ref = ScaledValue<Real>::from(
            asymptotic_leading_det<Real>(L, par, Real(k), v0, beta));
        double ratio = to_double(times_pow2(Real(det.mantissa / ref.mantissa),
                                            det.exponent - ref.exponent)) *
                       det.sign * ref.sign;
        double err = std::abs(ratio - target);
        EXPECT_LT(err, prev_err) << "L=" << L << " beta=" << beta;
        prev_err = err;
      }
      EXPECT_LT(prev_err, 1e-3 * std::abs(std::ldexp(1.0, -2 * L)) * 10)
          << "L=" << L << " " << to_string(par);
    }
  }
}
