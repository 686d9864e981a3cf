#pragma once

// Invariant suite behind the `selfcheck` command. Each check returns a
// named pass/fail with a one-line detail.

#include <neqm/basis.hpp>
#include <neqm/core.hpp>
#include <neqm/matcher.hpp>
#include <neqm/qm_oracle.hpp>
#include <neqm/real.hpp>
#include <neqm/solver.hpp>
#include <neqm/wavefunction.hpp>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace neqm {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0;
};

struct SelfcheckOptions {
  unsigned mantissa_bits = kDefaultMantissaBits;
  /// Flip the sign pattern of the -sinh cos family in Q_o (a cosh-like,
  /// even term) to show that the reflection check catches it.
  bool inject_qo_sign_flip = false;
  // precision-doubling configuration
  double precision_beta = 0.01;
  double precision_v0 = 5000;
  int precision_L = 6;
  int precision_samples = 200;
};

namespace detail {

template <class F>
CheckResult timed(const std::string& name, F&& body) {
  auto t0 = std::chrono::steady_clock::now();
  CheckResult r;
  r.name = name;
  try {
    body(r);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                  .count();
  return r;
}

inline std::string sci(double x) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << x;
  return os.str();
}

// half the mantissa: identities that hold exactly in exact arithmetic
inline double identity_tol(unsigned bits) {
  return std::ldexp(1.0, -static_cast<int>(bits / 2));
}

inline BasisRow<Real> qo_row(const Params& p, int L, const Real& mu,
                             bool inject) {
  auto row = make_Qo(p, L, mu);
  if (inject) {
    for (auto& t : row.terms) {
      if (t.branch != -1) continue;
      // {-q, -q, q, q} -> {-q, -q, -q, -q}: -cosh(c x) cos(mu x)
      t.components[2].amplitude = t.components[0].amplitude;
      t.components[3].amplitude = t.components[0].amplitude;
    }
  }
  return row;
}

// max over terms and orders of |f^(n)(-x) - sign (-1)^n f^(n)(x)| relative
// to the larger side
inline double reflection_defect(const BasisRow<Real>& row, const Real& x,
                                int nmax, int sign) {
  auto at_minus = derivative_stack(row, Real(-x), nmax, false);
  auto at_plus = derivative_stack(row, x, nmax, true);
  double worst = 0;
  for (std::size_t n = 0; n < at_minus.rows(); ++n) {
    for (std::size_t j = 0; j < at_minus.cols(); ++j) {
      Real a = at_minus(n, j), b = at_plus(n, j) * sign;
      Real scale = std::max<Real>(abs(a), abs(b));
      if (scale == 0) continue;
      worst = std::max(worst, to_double(Real(abs(a - b) / scale)));
    }
  }
  return worst;
}

}  // namespace detail

/// Q_e terms are even and Q_o terms odd: f^(n)(-x) = +/-(-1)^n f^(n)(x).
inline CheckResult check_reflection(const SelfcheckOptions& o = {}) {
  return detail::timed("reflection identities", [&](CheckResult& r) {
    PrecisionScope prec(o.mantissa_bits);
    double worst = 0;
    for (double beta : {0.71, 1.01}) {
      Params p = Params::make(beta, 200);
      for (double mu : {0.3, 1.7, 4.2}) {
        for (int L : {1, 3}) {
          Real m(mu);
          for (double x : {0.25, 1.0}) {
            worst = std::max(worst, detail::reflection_defect(
                                        make_Qe(p, L, m), Real(x), 4 * L + 1, +1));
            worst = std::max(
                worst, detail::reflection_defect(
                           detail::qo_row(p, L, m, o.inject_qo_sign_flip),
                           Real(x), 4 * L + 1, -1));
          }
        }
      }
    }
    r.passed = worst < detail::identity_tol(o.mantissa_bits);
    r.detail = "max relative defect " + detail::sci(worst);
  });
}

/// Outside terms are eigenfunctions at the well depth and inside terms at
/// zero potential, both with eigenvalue E(mu).
inline CheckResult check_region_eigenfunctions(const SelfcheckOptions& o = {}) {
  return detail::timed("region eigenfunction round trips", [&](CheckResult& r) {
    PrecisionScope prec(o.mantissa_bits);
    double worst = 0;
    for (double beta : {0.01, 0.71, 5.01}) {
      Params p = Params::make(beta, 200);
      Real top = mu_max<Real>(p);
      for (double frac : {0.1, 0.5, 0.9}) {
        Real mu = top * Real(frac);
        Real e = energy_of_mu(mu, p);
        Real rho = rho_of_mu(mu, p);
        auto check = [&](const BasisRow<Real>& row, const Real& vc) {
          for (const auto& t : row.terms) {
            Real ev = apply_region_hamiltonian(t, vc, p);
            worst = std::max(worst, to_double(Real(abs(ev - e) / e)));
          }
        };
        check(make_P(p, 2, rho), Real(p.v0));
        check(make_Qe(p, 2, mu), Real(0));
        check(make_Qo(p, 2, mu), Real(0));
      }
    }
    r.passed = worst < detail::identity_tol(o.mantissa_bits);
    r.detail = "max relative eigenvalue error " + detail::sci(worst);
  });
}

/// Doubling the mu samples leaves the state count unchanged and the
/// energies equal to the refinement tolerance.
inline CheckResult check_grid_doubling(const SelfcheckOptions& o = {}) {
  return detail::timed("grid-doubling stability", [&](CheckResult& r) {
    Params p = Params::make(0.71, 200);
    ScanConfig a;
    a.L = 2;
    a.mantissa_bits = o.mantissa_bits;
    ScanConfig b = a;
    b.samples = 2 * a.samples;
    auto ta = spectrum(p, a), tb = spectrum(p, b);
    if (ta.states.size() != tb.states.size()) {
      r.passed = false;
      r.detail = "state counts " + std::to_string(ta.states.size()) + " vs " +
                 std::to_string(tb.states.size());
      return;
    }
    double worst = 0;
    for (std::size_t i = 0; i < ta.states.size(); ++i)
      worst = std::max(worst, std::abs(ta.states[i].energy - tb.states[i].energy) /
                                  tb.states[i].energy);
    r.passed = worst < 1e-8 && !ta.states.empty();
    r.detail = std::to_string(ta.states.size()) + " states; max relative shift " +
               detail::sci(worst);
  });
}

/// Determinant signs on the scan grid agree between b and 2b bits.
inline CheckResult check_precision_doubling(const SelfcheckOptions& o = {}) {
  return detail::timed("precision-doubling sign stability", [&](CheckResult& r) {
    Params p = Params::make(o.precision_beta, o.precision_v0);
    ScanConfig lo;
    lo.L = o.precision_L;
    lo.samples = o.precision_samples;
    lo.mantissa_bits = o.mantissa_bits;
    ScanConfig hi = lo;
    hi.mantissa_bits = 2 * o.mantissa_bits;
    int mismatches = 0, total = 0;
    for (Parity par : {Parity::even, Parity::odd}) {
      auto a = scan_sector(par, p, lo), b = scan_sector(par, p, hi);
      for (std::size_t i = 0; i < a.signs.size(); ++i) {
        ++total;
        if (a.signs[i] != b.signs[i]) ++mismatches;
      }
    }
    r.passed = mismatches == 0;
    r.detail = std::to_string(mismatches) + " of " + std::to_string(total) +
               " signs differ between " + std::to_string(lo.mantissa_bits) +
               " and " + std::to_string(hi.mantissa_bits) + " bits";
  });
}

/// Numerical quadrature of |psi|^2, region by region.
inline double quadrature_norm(const WavefunctionCoefficients& w) {
  using boost::math::quadrature::exp_sinh;
  using boost::math::quadrature::gauss_kronrod;
  PrecisionScope prec(kDefaultMantissaBits);
  auto sq = [&](double x) {
    double v = eval_psi(x, w);
    return v * v;
  };
  exp_sinh<double> tail;
  double left = tail.integrate(sq, -std::numeric_limits<double>::infinity(), -1.0);
  double right = tail.integrate(sq, 1.0, std::numeric_limits<double>::infinity());
  double inside = gauss_kronrod<double, 61>::integrate(sq, -1.0, 1.0, 15, 1e-13);
  return left + inside + right;
}

/// The closed-form norm of every Table-like state against quadrature.
inline CheckResult check_normalization_quadrature(const SelfcheckOptions& o = {}) {
  return detail::timed("normalization quadrature cross-check", [&](CheckResult& r) {
    double worst = 0;
    int count = 0;
    struct Case {
      double beta, v0;
      int L;
    };
    for (Case c : {Case{0.71, 200, 3}, Case{1e-3, 50, 0}, Case{1.01, 50, 1}}) {
      Params p = Params::make(c.beta, c.v0);
      ScanConfig cfg;
      cfg.L = c.L;
      cfg.mantissa_bits = o.mantissa_bits;
      ExtractionOptions ex;
      ex.mantissa_bits = o.mantissa_bits;
      for (const auto& st : spectrum(p, cfg).states) {
        auto w = coefficients_at_root(st, ex);
        worst = std::max(worst, std::abs(quadrature_norm(w) - 1));
        ++count;
      }
    }
    r.passed = worst < 1e-8 && count > 0;
    r.detail = std::to_string(count) + " states; max |quadrature - 1| " +
               detail::sci(worst);
  });
}

/// det M = -2^(2L+1) det M(e) det M(o) at random points, L <= 2.
inline CheckResult check_factorization(const SelfcheckOptions& o = {}) {
  return detail::timed("full/sector determinant factorization", [&](CheckResult& r) {
    PrecisionScope prec(o.mantissa_bits);
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> ub(0.05, 3.0), uv(1, 300), uf(0.05, 0.95);
    double worst = 0;
    for (int L = 0; L <= 2; ++L) {
      for (int i = 0; i < 5; ++i) {
        Params p = Params::make(ub(rng), uv(rng));
        Real mu = mu_max<Real>(p) * Real(uf(rng));
        auto full = scaled_det(assemble_full(mu, p, L));
        auto prod = full_det_factor<Real>(L);
        prod *= scaled_det(assemble_even(mu, p, L));
        prod *= scaled_det(assemble_odd(mu, p, L));
        worst = std::max(worst, to_double(relative_difference(full, prod)));
      }
    }
    r.passed = worst < detail::identity_tol(o.mantissa_bits);
    r.detail = "max relative difference " + detail::sci(worst);
  });
}

/// The standard well: 4x4 determinant against its parity factors, and state
/// counts against the number of half-periods in sqrt(2 v0).
inline CheckResult check_qm_oracle(const SelfcheckOptions& = {}) {
  return detail::timed("standard-well oracle", [&](CheckResult& r) {
    double worst = 0;
    bool counts_ok = true;
    for (double v0 : {1.0, 50.0, 300.0, 4000.0}) {
      auto states = qm::qm_spectrum(v0);
      int expected = static_cast<int>(std::ceil(std::sqrt(2 * v0) / (pi<double>() / 2)));
      if (static_cast<int>(states.size()) != expected) counts_ok = false;
      double kmax = std::sqrt(2 * v0);
      for (double f : {0.13, 0.5, 0.77}) {
        auto d = qm::qm_det_check(f * kmax, v0);
        double ref = -2 * d.even * d.odd;
        worst = std::max(worst, std::abs(d.full - ref) / std::max(1e-300, std::abs(ref)));
      }
    }
    r.passed = counts_ok && worst < 1e-10;
    r.detail = std::string(counts_ok ? "counts ok" : "count mismatch") +
               "; max factorization error " + detail::sci(worst);
  });
}

inline std::vector<CheckResult> run_selfcheck(const SelfcheckOptions& o = {}) {
  return {check_reflection(o),
          check_region_eigenfunctions(o),
          check_grid_doubling(o),
          check_precision_doubling(o),
          check_normalization_quadrature(o),
          check_factorization(o),
          check_qm_oracle(o)};
}

}  // namespace neqm
