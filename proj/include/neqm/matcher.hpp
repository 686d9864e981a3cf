#pragma once

// Matching matrices at the well walls. Conditions psi_I^(n)(-1) =
// psi_II^(n)(-1) and psi_III^(n)(1) = psi_II^(n)(1) for n = 0..4L+1, with
// psi_I = P(x) A, psi_II = Q_e(x) B_e + Q_o(x) B_o and psi_III = P(-x) C.

#include <neqm/basis.hpp>
#include <neqm/core.hpp>
#include <neqm/linalg.hpp>
#include <neqm/real.hpp>

#include <cmath>
#include <stdexcept>

namespace neqm {

enum class Sector { even, odd, full };

template <class T>
struct MatchMatrix {
  Matrix<T> entries;
  Sector sector = Sector::even;
  int order = 0;  // L

  std::size_t dim() const { return entries.rows(); }
};

inline int matching_orders(int L) { return 4 * L + 1; }
inline std::size_t sector_dim(int L) { return 2 * (2 * static_cast<std::size_t>(L) + 1); }

namespace detail {

template <class T>
MatchMatrix<T> assemble_sector(const T& mu, const Params& p, int L,
                               Sector sector) {
  T rho = rho_of_mu(mu, p);
  const T wall = -1;
  const int nmax = matching_orders(L);
  Matrix<T> dp = derivative_stack(make_P(p, L, rho), wall, nmax, false);
  Matrix<T> dq = derivative_stack(
      sector == Sector::even ? make_Qe(p, L, mu) : make_Qo(p, L, mu), wall,
      nmax, false);
  const std::size_t m = dp.cols();
  MatchMatrix<T> out;
  out.sector = sector;
  out.order = L;
  out.entries = Matrix<T>(2 * m, 2 * m);
  out.entries.set_block(0, 0, dp);
  out.entries.set_block(0, m, dq, -1);
  return out;
}

}  // namespace detail

/// (D P(-1), -D Q_e(-1)) acting on (A, B_e); C = A, B_o = 0.
template <class T>
MatchMatrix<T> assemble_even(const T& mu, const Params& p, int L) {
  return detail::assemble_sector(mu, p, L, Sector::even);
}

/// (D P(-1), -D Q_o(-1)) acting on (A, B_o); C = -A, B_e = 0.
template <class T>
MatchMatrix<T> assemble_odd(const T& mu, const Params& p, int L) {
  return detail::assemble_sector(mu, p, L, Sector::odd);
}

template <class T>
MatchMatrix<T> assemble_sector(Parity parity, const T& mu, const Params& p,
                               int L) {
  return parity == Parity::even ? assemble_even(mu, p, L)
                                : assemble_odd(mu, p, L);
}

/// Full 4(2L+1) system on (A, B_e, B_o, C):
///   [ D P(-1)  -D Q_e(-1)   -D Q_o(-1)  0        ]
///   [ 0        -D* Q_e(-1)   D* Q_o(-1) D* P(-1) ]
/// where D* flips the sign of odd-order rows.
template <class T>
MatchMatrix<T> assemble_full(const T& mu, const Params& p, int L) {
  T rho = rho_of_mu(mu, p);
  const T wall = -1;
  const int nmax = matching_orders(L);
  auto P = make_P(p, L, rho);
  auto Qe = make_Qe(p, L, mu);
  auto Qo = make_Qo(p, L, mu);
  Matrix<T> dp = derivative_stack(P, wall, nmax, false);
  Matrix<T> dqe = derivative_stack(Qe, wall, nmax, false);
  Matrix<T> dqo = derivative_stack(Qo, wall, nmax, false);
  Matrix<T> sp = derivative_stack(P, wall, nmax, true);
  Matrix<T> sqe = derivative_stack(Qe, wall, nmax, true);
  Matrix<T> sqo = derivative_stack(Qo, wall, nmax, true);
  const std::size_t m = dp.cols();
  const std::size_t rows = dp.rows();
  MatchMatrix<T> out;
  out.sector = Sector::full;
  out.order = L;
  out.entries = Matrix<T>(2 * rows, 4 * m);
  out.entries.set_block(0, 0, dp);
  out.entries.set_block(0, m, dqe, -1);
  out.entries.set_block(0, 2 * m, dqo, -1);
  out.entries.set_block(rows, m, sqe, -1);
  out.entries.set_block(rows, 2 * m, sqo);
  out.entries.set_block(rows, 3 * m, sp);
  return out;
}

/// Determinant of the matching matrix itself (not of its equilibrated
/// image): the power-of-two equilibration factors are folded back into the
/// exponent, so sign and zeros are those of the true determinant.
template <class T>
ScaledValue<T> scaled_det(const MatchMatrix<T>& m, DetOptions opts = {}) {
  return determinant(m.entries, opts);
}

/// det M = factor * det M(e) * det M(o) for the full system of order L.
/// The factor is -2 at L = 0 and -2^(2L+1) in general.
template <class T>
ScaledValue<T> full_det_factor(int L) {
  ScaledValue<T> f = ScaledValue<T>::from(T(-1));
  f.scale_pow2(2 * L + 1);
  return f;
}

/// Leading small-beta behaviour of the sector determinants for L = 1, 2:
///   L = 1: (2 pi / beta)^12 2^5 e^{-kappa} k kappa f(k)
///   L = 2: (2 pi / beta)^40 2^22 3^8 e^{-kappa} k^2 kappa^2 f(k)
/// with f = kappa cos k - k sin k (even) or kappa sin k + k cos k (odd),
/// kappa = sqrt(2 v0 - k^2).
template <class T>
T asymptotic_leading_det(int L, Parity parity, const T& k, double v0,
                         double beta) {
  using std::cos;
  using std::exp;
  using std::pow;
  using std::sin;
  using std::sqrt;
  if (L != 1 && L != 2)
    throw std::invalid_argument("asymptotic_leading_det: L must be 1 or 2");
  T k2 = k * k;
  T two_v0 = 2 * T(v0);
  if (k2 > two_v0) throw DomainError("asymptotic_leading_det: k^2 > 2 v0");
  T kappa = sqrt(two_v0 - k2);
  T f = parity == Parity::even ? T(kappa * cos(k) - k * sin(k))
                               : T(kappa * sin(k) + k * cos(k));
  T rate = 2 * pi<T>() / T(beta);
  if (L == 1) {
    return pow(rate, 12) * 32 * exp(-kappa) * k * kappa * f;
  }
  return pow(rate, 40) * T(4194304) * T(6561) * exp(-kappa) * k2 * kappa *
         kappa * f;
}

}  // namespace neqm
