#pragma once

// Truncated region bases. Every basis function is stored as a finite sum of
// complex exponentials amp * exp(gamma x), so its n-th derivative is the exact
// sum amp * gamma^n * exp(gamma x) for any n.
//
// Column order for truncation order L, with c_l = 2 pi l / beta:
//   P   : e^{rho x}, e^{(c_l + rho) x} (l = 1..L), e^{(c_l - rho) x} (l = 1..L)
//   Q_e : cos(mu x), cosh(c_l x) cos(mu x) (l = 1..L),
//         sinh(c_l x) sin(mu x) (l = 1..L)
//   Q_o : sin(mu x), cosh(c_l x) sin(mu x) (l = 1..L),
//         -sinh(c_l x) cos(mu x) (l = 1..L)

#include <neqm/core.hpp>
#include <neqm/linalg.hpp>
#include <neqm/real.hpp>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace neqm {

enum class Region { outside_left, inside };
enum class RowKind { P, Qe, Qo };

template <class T>
struct ExpComponent {
  Complex<T> amplitude;
  Complex<T> exponent;
};

template <class T>
struct BasisTerm {
  std::vector<ExpComponent<T>> components;
  Region region = Region::inside;
  int mode = 0;    // l
  int branch = 0;  // +1 / -1 for the two P families and cosh / sinh families

  /// n-th derivative at x.
  T derivative(const T& x, int n) const {
    Complex<T> sum(T(0), T(0));
    for (const auto& comp : components) {
      Complex<T> w = comp.amplitude * cexp(comp.exponent * x);
      for (int k = 0; k < n; ++k) w *= comp.exponent;
      sum += w;
    }
    return sum.re;
  }
  T value(const T& x) const { return derivative(x, 0); }
};

template <class T>
struct BasisRow {
  RowKind kind = RowKind::P;
  int order = 0;  // L
  std::vector<BasisTerm<T>> terms;

  std::size_t size() const { return terms.size(); }
};

namespace detail {

template <class T>
T mode_rate(const Params& p, int l) {
  return 2 * pi<T>() * l / T(p.beta);
}

template <class T>
BasisTerm<T> make_term(Region region, int mode, int branch,
                       std::vector<ExpComponent<T>> comps) {
  BasisTerm<T> t;
  t.components = std::move(comps);
  t.region = region;
  t.mode = mode;
  t.branch = branch;
  return t;
}

inline void check_order(int L) {
  if (L < 0) throw std::invalid_argument("truncation order L must be >= 0");
}

}  // namespace detail

template <class T>
BasisRow<T> make_P(const Params& p, int L, const T& rho) {
  detail::check_order(L);
  if (rho < 0) throw DomainError("make_P: rho must be non-negative");
  using C = Complex<T>;
  BasisRow<T> row;
  row.kind = RowKind::P;
  row.order = L;
  const C one(T(1), T(0));
  row.terms.push_back(detail::make_term<T>(Region::outside_left, 0, +1,
                                           {{one, C(rho, T(0))}}));
  for (int l = 1; l <= L; ++l) {
    T c = detail::mode_rate<T>(p, l);
    row.terms.push_back(detail::make_term<T>(Region::outside_left, l, +1,
                                             {{one, C(T(c + rho), T(0))}}));
  }
  for (int l = 1; l <= L; ++l) {
    T c = detail::mode_rate<T>(p, l);
    row.terms.push_back(detail::make_term<T>(Region::outside_left, l, -1,
                                             {{one, C(T(c - rho), T(0))}}));
  }
  return row;
}

namespace detail {

// Amplitudes for the four exponents (c + i mu), (c - i mu), (-c + i mu),
// (-c - i mu), in that order.
template <class T>
BasisTerm<T> four_exp_term(int mode, int branch, const T& c, const T& mu,
                           const Complex<T> (&amp)[4]) {
  using C = Complex<T>;
  return make_term<T>(Region::inside, mode, branch,
                      {{amp[0], C(c, mu)},
                       {amp[1], C(c, T(-mu))},
                       {amp[2], C(T(-c), mu)},
                       {amp[3], C(T(-c), T(-mu))}});
}

}  // namespace detail

template <class T>
BasisRow<T> make_Qe(const Params& p, int L, const T& mu) {
  detail::check_order(L);
  using C = Complex<T>;
  const T q = T(1) / 4, h = T(1) / 2;
  BasisRow<T> row;
  row.kind = RowKind::Qe;
  row.order = L;
  // cos(mu x)
  row.terms.push_back(detail::make_term<T>(
      Region::inside, 0, +1, {{C(h, T(0)), C(T(0), mu)}, {C(h, T(0)), C(T(0), T(-mu))}}));
  // cosh(c x) cos(mu x)
  for (int l = 1; l <= L; ++l) {
    const C amp[4] = {C(q, T(0)), C(q, T(0)), C(q, T(0)), C(q, T(0))};
    row.terms.push_back(
        detail::four_exp_term<T>(l, +1, detail::mode_rate<T>(p, l), mu, amp));
  }
  // sinh(c x) sin(mu x)
  for (int l = 1; l <= L; ++l) {
    const C amp[4] = {C(T(0), T(-q)), C(T(0), q), C(T(0), q), C(T(0), T(-q))};
    row.terms.push_back(
        detail::four_exp_term<T>(l, -1, detail::mode_rate<T>(p, l), mu, amp));
  }
  return row;
}

template <class T>
BasisRow<T> make_Qo(const Params& p, int L, const T& mu) {
  detail::check_order(L);
  using C = Complex<T>;
  const T q = T(1) / 4, h = T(1) / 2;
  BasisRow<T> row;
  row.kind = RowKind::Qo;
  row.order = L;
  // sin(mu x)
  row.terms.push_back(detail::make_term<T>(
      Region::inside, 0, +1,
      {{C(T(0), T(-h)), C(T(0), mu)}, {C(T(0), h), C(T(0), T(-mu))}}));
  // cosh(c x) sin(mu x)
  for (int l = 1; l <= L; ++l) {
    const C amp[4] = {C(T(0), T(-q)), C(T(0), q), C(T(0), T(-q)), C(T(0), q)};
    row.terms.push_back(
        detail::four_exp_term<T>(l, +1, detail::mode_rate<T>(p, l), mu, amp));
  }
  // -sinh(c x) cos(mu x)
  for (int l = 1; l <= L; ++l) {
    const C amp[4] = {C(T(-q), T(0)), C(T(-q), T(0)), C(q, T(0)), C(q, T(0))};
    row.terms.push_back(
        detail::four_exp_term<T>(l, -1, detail::mode_rate<T>(p, l), mu, amp));
  }
  return row;
}

/// (n_max + 1) x size block whose row n holds the n-th derivatives of the
/// row's terms at x, times (-1)^n when alternate_signs is set.
template <class T>
Matrix<T> derivative_stack(const BasisRow<T>& row, const T& x, int n_max,
                           bool alternate_signs) {
  if (n_max < 0) throw std::invalid_argument("derivative_stack: n_max < 0");
  Matrix<T> out(static_cast<std::size_t>(n_max) + 1, row.size());
  std::vector<Complex<T>> acc(static_cast<std::size_t>(n_max) + 1);
  for (std::size_t j = 0; j < row.size(); ++j) {
    for (auto& a : acc) a = Complex<T>(T(0), T(0));
    for (const auto& comp : row.terms[j].components) {
      Complex<T> w = comp.amplitude * cexp(comp.exponent * x);
      for (int n = 0; n <= n_max; ++n) {
        acc[n] += w;
        if (n < n_max) w *= comp.exponent;
      }
    }
    for (int n = 0; n <= n_max; ++n) {
      bool flip = alternate_signs && (n % 2 == 1);
      out(n, j) = flip ? T(-acc[n].re) : acc[n].re;
    }
  }
  return out;
}

/// Eigenvalue of the constant-potential operator
///   (s/(2 beta^2)) (e^{-i beta d/dx} + e^{i beta d/dx}) - 1/beta^2,
///   s = sqrt(1 + 2 beta^2 v_c),
/// on the term. Each exponential e^{gamma x} maps to (s cos(beta gamma) - 1) /
/// beta^2; all components must agree or the term is not an eigenfunction.
template <class T>
T apply_region_hamiltonian(const BasisTerm<T>& term, const T& v_c,
                           const Params& p) {
  using std::abs;
  T beta = p.beta;
  T s = detail::well_scale(beta, v_c);
  T first{};
  bool have = false;
  for (const auto& comp : term.components) {
    Complex<T> arg = comp.exponent * beta;
    Complex<T> cs = ccos(arg);
    T ev = (s * cs.re - 1) / (beta * beta);
    T tol = T(1e-8) * (abs(ev) + 1 / (beta * beta));
    if (abs(cs.im) * s / (beta * beta) > tol)
      throw DomainError("apply_region_hamiltonian: complex eigenvalue");
    if (!have) {
      first = ev;
      have = true;
    } else if (abs(ev - first) > tol) {
      throw DomainError(
          "apply_region_hamiltonian: components have different eigenvalues");
    }
  }
  return first;
}

}  // namespace neqm
