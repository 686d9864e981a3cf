#pragma once

// Wavefunctions at a bound-state root: coefficient extraction from the
// singular sector matrix, closed-form normalization, pointwise evaluation
// and the per-order matching residuals at x = -1.
//
//   psi_I(x)   = P(x) A                     x < -1
//   psi_II(x)  = Q_e(x) B  (even)  or  Q_o(x) B  (odd)
//   psi_III(x) = +/- P(-x) A                x > 1   (+ even, - odd)

#include <neqm/basis.hpp>
#include <neqm/core.hpp>
#include <neqm/linalg.hpp>
#include <neqm/matcher.hpp>
#include <neqm/real.hpp>
#include <neqm/solver.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace neqm {

class AmbiguousNullspace : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct WavefunctionCoefficients {
  std::vector<Real> A;  // outside amplitudes, length 2L+1
  std::vector<Real> B;  // inside amplitudes (B_e or B_o), length 2L+1
  Parity parity = Parity::even;
  double mu = 0;
  Params params{};
  int L = 0;
};

namespace detail {

inline BasisRow<Real> inside_row(const WavefunctionCoefficients& w) {
  return w.parity == Parity::even ? make_Qe(w.params, w.L, Real(w.mu))
                                  : make_Qo(w.params, w.L, Real(w.mu));
}

inline BasisRow<Real> outside_row(const WavefunctionCoefficients& w) {
  return make_P(w.params, w.L, rho_of_mu(Real(w.mu), w.params));
}

inline Real dot(const std::vector<Real>& c, const Matrix<Real>& stack,
                std::size_t row) {
  Real s = 0;
  for (std::size_t j = 0; j < c.size(); ++j) s += c[j] * stack(row, j);
  return s;
}

// Pivot magnitudes (equilibrated) of the square sector matrix in ascending
// order; used to decide whether the nullspace is one-dimensional.
inline std::vector<Real> sorted_pivots(Matrix<Real> m) {
  equilibrate(m);
  auto f = lu_factorize(std::move(m), Pivoting::partial);
  std::vector<Real> piv;
  for (std::size_t k = 0; k < f.lu.rows(); ++k) piv.push_back(abs(f.pivot(k)));
  std::sort(piv.begin(), piv.end());
  return piv;
}

}  // namespace detail

/// Ratio of the smallest to the second-smallest pivot of the sector matrix
/// at mu; close to zero at a simple root.
inline double pivot_separation(Parity parity, double mu, const Params& p,
                               int L, unsigned bits = kDefaultMantissaBits) {
  PrecisionScope prec(bits);
  auto piv = detail::sorted_pivots(
      assemble_sector(parity, Real(mu), p, L).entries);
  if (piv.size() < 2) return 0;
  if (piv[1] == 0) return 1;
  return to_double(Real(piv[0] / piv[1]));
}

/// Nullspace direction of the sector matrix without its order-0 row: the
/// remaining 2(2L+1)-1 conditions are solved exactly by complete-pivoting
/// elimination, with the one column never chosen as pivot set to 1. Any
/// mismatch from an imperfect root therefore shows up in the order-0
/// (continuity) residual only. Requires an active PrecisionScope.
inline std::vector<Real> sector_null_vector(const Matrix<Real>& full) {
  const std::size_t n = full.cols();
  Matrix<Real> sub(n - 1, n);
  for (std::size_t r = 1; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) sub(r - 1, c) = full(r, c);
  Equilibration<Real> eq = equilibrate(sub);
  auto f = lu_factorize(std::move(sub), Pivoting::full);
  if (f.singular)
    throw AmbiguousNullspace("sector matrix has rank below 2(2L+1) - 1");
  // columns in factorized order; slot n-1 is free
  std::vector<Real> y(n, Real(0));
  y[n - 1] = 1;
  for (std::size_t k = n - 1; k-- > 0;) {
    Real s = 0;
    for (std::size_t c = k + 1; c < n; ++c) s += f.lu(k, c) * y[c];
    y[k] = -s / f.lu(k, k);
  }
  std::vector<Real> v(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t col = f.col_perm[k];
    v[col] = times_pow2(y[k], -eq.col_exp[col]);
  }
  return v;
}

struct ExtractionOptions {
  unsigned mantissa_bits = kDefaultMantissaBits;
  /// Reject roots whose smallest pivot is not this much below the next.
  double max_pivot_separation = 1e-4;
  bool check_separation = true;
};

/// Closed-form integral of |psi|^2 over the real line (a = 1).
inline Real norm_squared(const WavefunctionCoefficients& w) {
  using C = Complex<Real>;
  auto P = detail::outside_row(w);
  auto Q = detail::inside_row(w);

  // outside: 2 * sum_jk A_j A_k e^{-(g_j + g_k)} / (g_j + g_k) over x < -1,
  // the x > 1 piece being its mirror image
  Real outside = 0;
  for (std::size_t j = 0; j < P.size(); ++j) {
    for (std::size_t k = 0; k < P.size(); ++k) {
      const Real& gj = P.terms[j].components[0].exponent.re;
      const Real& gk = P.terms[k].components[0].exponent.re;
      Real g = gj + gk;
      if (!(g > 0))
        throw DomainError("normalize: non-decaying outside term (rho = 0)");
      outside += w.A[j] * w.A[k] * exp(-g) / g;
    }
  }
  // inside: sum over component pairs of a_p a_q int_{-1}^{1} e^{(s_p+s_q) x}
  C inside(Real(0), Real(0));
  for (std::size_t j = 0; j < Q.size(); ++j) {
    for (std::size_t k = 0; k < Q.size(); ++k) {
      C pair(Real(0), Real(0));
      for (const auto& a : Q.terms[j].components) {
        for (const auto& b : Q.terms[k].components) {
          C s = a.exponent + b.exponent;
          C integral;
          if (s.re == 0 && s.im == 0) {
            integral = C(Real(2), Real(0));
          } else {
            integral = (cexp(s) - cexp(-s)) / s;
          }
          pair += a.amplitude * b.amplitude * integral;
        }
      }
      inside += pair * Real(w.B[j] * w.B[k]);
    }
  }
  return 2 * outside + inside.re;
}

/// Psi(0) for even states, psi'(0) for odd states.
inline Real center_value(const WavefunctionCoefficients& w) {
  auto Q = detail::inside_row(w);
  Real s = 0;
  const int n = w.parity == Parity::even ? 0 : 1;
  for (std::size_t j = 0; j < Q.size(); ++j)
    s += w.B[j] * Q.terms[j].derivative(Real(0), n);
  return s;
}

/// Unit norm, with psi(0) > 0 (even) or psi'(0) > 0 (odd).
inline WavefunctionCoefficients normalize(WavefunctionCoefficients w) {
  Real n2 = norm_squared(w);
  if (!(n2 > 0)) throw DomainError("normalize: zero wavefunction");
  Real scale = 1 / sqrt(n2);
  if (center_value(w) < 0) scale = -scale;
  for (auto& a : w.A) a *= scale;
  for (auto& b : w.B) b *= scale;
  return w;
}

/// Coefficients of the normalized bound state at a refined sector root.
inline WavefunctionCoefficients coefficients_at_root(
    double mu_star, Parity parity, const Params& p, int L,
    const ExtractionOptions& opts = {}) {
  if (opts.check_separation) {
    double sep = pivot_separation(parity, mu_star, p, L, opts.mantissa_bits);
    if (sep > opts.max_pivot_separation)
      throw AmbiguousNullspace(
          "smallest pivot not separated from the next (ratio " +
          std::to_string(sep) + "); refine the root with a tighter refine_tol");
  }
  PrecisionScope prec(opts.mantissa_bits);
  auto m = assemble_sector(parity, Real(mu_star), p, L);
  std::vector<Real> v = sector_null_vector(m.entries);
  WavefunctionCoefficients w;
  const std::size_t half = v.size() / 2;
  w.A.assign(v.begin(), v.begin() + half);
  w.B.assign(v.begin() + half, v.end());
  w.parity = parity;
  w.mu = mu_star;
  w.params = p;
  w.L = L;
  return normalize(std::move(w));
}

/// Convenience overload for a solved state.
inline WavefunctionCoefficients coefficients_at_root(
    const BoundState& st, const ExtractionOptions& opts = {}) {
  return coefficients_at_root(st.mu, st.parity, st.params, st.L, opts);
}

/// ||M v||_inf / (||v||_inf * max_i ||M_i||_1) for the sector matrix at the
/// state's mu and v = (A, B).
inline double nullspace_residual(const WavefunctionCoefficients& w,
                                 unsigned bits = kDefaultMantissaBits) {
  PrecisionScope prec(bits);
  auto m = assemble_sector(w.parity, Real(w.mu), w.params, w.L).entries;
  std::vector<Real> v = w.A;
  v.insert(v.end(), w.B.begin(), w.B.end());
  Real mv = 0, vmax = 0, rowmax = 0;
  for (const auto& x : v) vmax = std::max<Real>(vmax, abs(x));
  for (std::size_t r = 0; r < m.rows(); ++r) {
    Real s = 0, rn = 0;
    for (std::size_t c = 0; c < m.cols(); ++c) {
      s += m(r, c) * v[c];
      rn += abs(m(r, c));
    }
    mv = std::max<Real>(mv, abs(s));
    rowmax = std::max<Real>(rowmax, rn);
  }
  if (vmax == 0 || rowmax == 0) return 0;
  return to_double(Real(mv / (vmax * rowmax)));
}

/// psi(x), dispatching on the region.
inline Real eval_psi(const Real& x, const WavefunctionCoefficients& w) {
  if (x < -1) {
    auto P = detail::outside_row(w);
    Real s = 0;
    for (std::size_t j = 0; j < P.size(); ++j) s += w.A[j] * P.terms[j].value(x);
    return s;
  }
  if (x > 1) {
    auto P = detail::outside_row(w);
    Real s = 0;
    Real mx = -x;
    for (std::size_t j = 0; j < P.size(); ++j) s += w.A[j] * P.terms[j].value(mx);
    return w.parity == Parity::even ? s : Real(-s);
  }
  auto Q = detail::inside_row(w);
  Real s = 0;
  for (std::size_t j = 0; j < Q.size(); ++j) s += w.B[j] * Q.terms[j].value(x);
  return s;
}

inline double eval_psi(double x, const WavefunctionCoefficients& w) {
  return to_double(eval_psi(Real(x), w));
}

enum class ResidualVariant {
  inside,          // psi_I^(n)(-1) - psi_II^(n)(-1)
  mirror_outside,  // psi_I^(n)(-1) - psi_III^(n)(-1), continued past its region
};

struct ResidualOptions {
  /// Mantissa width the coefficients are rounded to before evaluation, as
  /// when they are reported in IEEE double. 0 keeps working precision.
  unsigned coefficient_bits = 53;
  ResidualVariant variant = ResidualVariant::inside;
  unsigned mantissa_bits = kDefaultMantissaBits;
};

struct Residual {
  int order = 0;
  double value = 0;  // times a^n sqrt(a), i.e. unchanged for a = 1
};

/// Matching residuals for n = 0..4L+2; order 4L+2 is not imposed by the
/// truncated system and is included for comparison.
inline std::vector<Residual> matching_residuals(
    const WavefunctionCoefficients& w, const ResidualOptions& opts = {}) {
  PrecisionScope prec(opts.mantissa_bits);
  auto rounded = [&](const std::vector<Real>& c) {
    if (opts.coefficient_bits == 0) return c;
    std::vector<Real> r;
    for (const auto& x : c) r.push_back(round_to_bits(x, opts.coefficient_bits));
    return r;
  };
  const std::vector<Real> A = rounded(w.A);
  const std::vector<Real> B = rounded(w.B);
  const int nmax = matching_orders(w.L) + 1;
  const Real wall = -1;
  Matrix<Real> dP = derivative_stack(detail::outside_row(w), wall, nmax, false);
  Matrix<Real> other;
  std::vector<Real> other_coeffs;
  if (opts.variant == ResidualVariant::inside) {
    other = derivative_stack(detail::inside_row(w), wall, nmax, false);
    other_coeffs = B;
  } else {
    // psi_III^(n)(-1) = +/- (-1)^n P^(n)(1) A
    other = derivative_stack(detail::outside_row(w), Real(1), nmax, true);
    other_coeffs = A;
    if (w.parity == Parity::odd)
      for (auto& c : other_coeffs) c = -c;
  }
  std::vector<Residual> out;
  for (int n = 0; n <= nmax; ++n) {
    Real r = detail::dot(A, dP, n) - detail::dot(other_coeffs, other, n);
    out.push_back({n, to_double(r)});
  }
  return out;
}

}  // namespace neqm
