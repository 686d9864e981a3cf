#include <neqm/core.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace neqm;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST(Params, RejectsBadInput) {
  EXPECT_THROW(Params::make(0, 1), std::invalid_argument);
  EXPECT_THROW(Params::make(-1, 1), std::invalid_argument);
  EXPECT_THROW(Params::make(1, -1), std::invalid_argument);
  EXPECT_THROW(Params::make(NAN, 1), std::invalid_argument);
  EXPECT_NO_THROW(Params::make(1, 0));
}

TEST(EnergyUpperBound, Examples) {
  EXPECT_EQ(energy_upper_bound(Params::make(1, 0)), 0.0);
  EXPECT_LT(rel(energy_upper_bound(Params::make(1e-6, 1)), 1.0), 1e-6);
  EXPECT_LT(rel(energy_upper_bound(Params::make(1, 5000)), std::sqrt(10001.0) - 1),
            1e-14);
  EXPECT_NEAR(energy_upper_bound(Params::make(1, 5000)), 99.005, 1e-3);
}

TEST(EnergyUpperBound, ExtendedPrecision) {
  PrecisionScope prec(256);
  Real b = energy_upper_bound<Real>(Params::make(1, 5000));
  Real ref = sqrt(Real(10001)) - 1;
  EXPECT_LT(to_double(Real(abs(b - ref) / ref)), 1e-70);
}

TEST(MuMax, Examples) {
  EXPECT_EQ(mu_max(Params::make(1, 0)), 0.0);
  EXPECT_LT(rel(mu_max(Params::make(1e-6, 2)), 2.0), 1e-6);
  EXPECT_LT(rel(mu_max(Params::make(1, 5000)),
                std::log(std::sqrt(10001.0) + 100.0)),
            1e-14);
  EXPECT_NEAR(mu_max(Params::make(1, 5000)), 5.2983, 1e-4);
}

TEST(MuMax, EnergyRoundTripIsUpperBound) {
  for (double beta : {0.01, 0.71, 1.01, 50.01}) {
    for (double v0 : {1.0, 200.0, 5000.0}) {
      Params p = Params::make(beta, v0);
      EXPECT_LT(rel(energy_of_mu(mu_max(p), p), energy_upper_bound(p)), 1e-12)
          << beta << " " << v0;
      EXPECT_LT(rel(mu_of_energy(energy_upper_bound(p), p), mu_max(p)), 1e-12);
    }
  }
}

TEST(RhoOfMu, ZeroAtMuMax) {
  PrecisionScope prec(256);
  for (double beta : {0.01, 0.71, 5.01}) {
    Params p = Params::make(beta, 5000);
    // double rounding of mu_max leaves rho of order sqrt(eps)
    EXPECT_LT(rho_of_mu(mu_max<double>(p), p), 1e-6);
    Real r = rho_of_mu(mu_max<Real>(p), p);
    EXPECT_LT(to_double(r), 1e-30);
  }
}

TEST(RhoOfMu, SmallBetaLimitIsKappa) {
  Params p = Params::make(1e-4, 10);
  EXPECT_LT(rel(rho_of_mu(1.0, p), std::sqrt(19.0)), 1e-6);
}

TEST(RhoOfMu, ValueAtZero) {
  Params p = Params::make(0.71, 200);
  double s = std::sqrt(1 + 2 * 0.71 * 0.71 * 200);
  EXPECT_LT(rel(rho_of_mu(0.0, p), std::acos(1 / s) / 0.71), 1e-13);
  EXPECT_GT(rho_of_mu(0.0, p), 0.0);
}

TEST(RhoOfMu, OutOfRangeThrows) {
  Params p = Params::make(0.71, 200);
  EXPECT_THROW(rho_of_mu(mu_max(p) * 1.001, p), DomainError);
  EXPECT_THROW(rho_of_mu(-0.1, p), DomainError);
}

TEST(RhoOfMu, RangeWithinPiOverBeta) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ub(0.01, 60), uv(0, 5000), uf(0, 1);
  for (int i = 0; i < 1000; ++i) {
    Params p = Params::make(ub(rng), uv(rng));
    double mu = mu_max(p) * uf(rng);
    double r = rho_of_mu(mu, p);
    EXPECT_GE(r, 0.0);
    EXPECT_LE(r, pi<double>() / p.beta * (1 + 1e-15));
    double s = std::sqrt(1 + 2 * p.beta * p.beta * p.v0);
    EXPECT_LE(std::cosh(p.beta * mu), s * (1 + 1e-12));
  }
}

TEST(EnergyOfMu, Examples) {
  Params p = Params::make(1e-6, 1);
  EXPECT_EQ(energy_of_mu(0.0, p), 0.0);
  EXPECT_LT(rel(energy_of_mu(3.0, p), 4.5), 1e-6);
}

TEST(EnergyOfMu, StrictlyIncreasing) {
  Params p = Params::make(1.01, 5000);
  double prev = -1, top = mu_max(p);
  for (int i = 0; i <= 1000; ++i) {
    double e = energy_of_mu(top * i / 1000, p);
    EXPECT_GT(e, prev);
    prev = e;
  }
}

TEST(MuOfEnergy, Examples) {
  Params p = Params::make(0.71, 200);
  EXPECT_EQ(mu_of_energy(0.0, p), 0.0);
  EXPECT_THROW(mu_of_energy(-1e-9, p), DomainError);
  EXPECT_LT(rel(energy_of_mu(mu_of_energy(3.0593, p), p), 3.0593), 1e-12);
  double mu = 1.234;
  EXPECT_LT(rel(mu_of_energy(energy_of_mu(mu, p), p), mu), 1e-13);
}

TEST(MuOfEnergy, RoundTripExtendedPrecision) {
  PrecisionScope prec(256);
  Params p = Params::make(0.71, 200);
  Real e("3.0593");
  Real back = energy_of_mu(mu_of_energy(e, p), p);
  EXPECT_LT(to_double(Real(abs(back - e) / e)), 1e-70);
}

// Deviations from the standard-well relations are O(beta^2): halving beta
// divides them by about four.
TEST(SmallBeta, ErrorsScaleQuadratically) {
  const double v0 = 10, mu = 1.3;
  auto e_err = [&](double beta) {
    PrecisionScope prec(256);
    Params p = Params::make(beta, v0);
    return to_double(Real(abs(energy_of_mu(Real(mu), p) - Real(mu * mu / 2))));
  };
  auto r_err = [&](double beta) {
    PrecisionScope prec(256);
    Params p = Params::make(beta, v0);
    return to_double(
        Real(abs(rho_of_mu(Real(mu), p) - sqrt(Real(2 * v0 - mu * mu)))));
  };
  for (double beta : {1e-2, 1e-3}) {
    EXPECT_NEAR(e_err(beta) / e_err(beta / 2), 4.0, 0.01);
    EXPECT_NEAR(r_err(beta) / r_err(beta / 2), 4.0, 0.01);
  }
}

TEST(ClassifyCase, Examples) {
  const double beta = 0.71, v0 = 200;
  auto c0 = classify_case(0.0, v0, beta);
  EXPECT_EQ(c0.case_id, 2);
  double bound = energy_upper_bound(Params::make(beta, 0.0));
  auto c3 = classify_case(bound + 1, 0.0, beta);
  EXPECT_EQ(c3.case_id, 3);
  EXPECT_EQ(c3.gamma_r, 0.0);
  double s = std::sqrt(1 + 2 * beta * beta * v0);
  auto c1 = classify_case(-2 / (beta * beta) - 2 * s / (beta * beta), v0, beta);
  EXPECT_EQ(c1.case_id, 1);
  EXPECT_DOUBLE_EQ(c1.gamma_r, pi<double>() / beta);
}

TEST(ClassifyCase, BoundariesGoToHigherCase) {
  const double beta = 0.5, v = 3;
  double s = std::sqrt(1 + 2 * beta * beta * v);
  EXPECT_EQ(classify_case((-s - 1) / (beta * beta), v, beta).case_id, 2);
  EXPECT_EQ(classify_case(2 * v / (s + 1), v, beta).case_id, 3);
}

TEST(ClassifyCase, IntervalsPartitionTheLine) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ue(-500, 500), uv(0, 100), ub(0.05, 3);
  for (int i = 0; i < 2000; ++i) {
    double e = ue(rng), v = uv(rng), b = ub(rng);
    auto c = classify_case(e, v, b);
    EXPECT_LE(c.valid_from, e);
    if (c.case_id == 3) {
      EXPECT_LE(c.valid_from, e);
    } else {
      EXPECT_LT(e, c.valid_to);
    }
    if (c.case_id == 2) {
      EXPECT_EQ(c.gamma_i[0], 0.0);
      EXPECT_EQ(c.gamma_i[1], 0.0);
    }
  }
}

TEST(Parity, Names) {
  EXPECT_STREQ(to_string(Parity::even), "even");
  EXPECT_STREQ(to_string(Parity::odd), "odd");
}
