#pragma once

// Dimensionless conventions (hbar = m = a = 1) and the dispersion relations
// linking the inside wavenumber mu, the outside decay rate rho and the energy.

#include <neqm/real.hpp>

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace neqm {

/// Raised when an input lies outside the domain of a dispersion map.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when a documented precondition between arguments is violated.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Physical configuration: beta in units a/hbar, v0 in units hbar^2/(m a^2).
struct Params {
  double beta = 1.0;
  double v0 = 0.0;

  static Params make(double beta, double v0) {
    if (!(beta > 0.0) || !std::isfinite(beta))
      throw std::invalid_argument("beta must be positive and finite, got " +
                                  std::to_string(beta));
    if (!(v0 >= 0.0) || !std::isfinite(v0))
      throw std::invalid_argument("v0 must be non-negative and finite, got " +
                                  std::to_string(v0));
    return Params{beta, v0};
  }
};

enum class Parity { even, odd };

inline const char* to_string(Parity p) {
  return p == Parity::even ? "even" : "odd";
}

namespace detail {

// sqrt(1 + 2 beta^2 v)
template <class T>
T well_scale(const T& beta, const T& v) {
  using std::sqrt;
  return sqrt(1 + 2 * beta * beta * v);
}

}  // namespace detail

/// (sqrt(1 + 2 beta^2 v0) - 1) / beta^2, written as 2 v0 / (s + 1).
template <class T = double>
T energy_upper_bound(const Params& p) {
  T beta = p.beta;
  T v0 = p.v0;
  T s = detail::well_scale(beta, v0);
  return 2 * v0 / (s + 1);
}

/// Upper end of the mu scan: log(s + sqrt(2 beta^2 v0)) / beta
/// = asinh(beta sqrt(2 v0)) / beta.
template <class T = double>
T mu_max(const Params& p) {
  using std::asinh;
  using std::sqrt;
  T beta = p.beta;
  T v0 = p.v0;
  return asinh(beta * sqrt(2 * v0)) / beta;
}

/// E = (cosh(beta mu) - 1) / beta^2 = 2 sinh^2(beta mu / 2) / beta^2.
template <class T>
T energy_of_mu(const T& mu, const Params& p) {
  using std::sinh;
  T beta = p.beta;
  T h = sinh(beta * mu / 2);
  return 2 * h * h / (beta * beta);
}

/// Inverse of energy_of_mu on E >= 0.
template <class T>
T mu_of_energy(const T& energy, const Params& p) {
  using std::log1p;
  using std::sqrt;
  if (energy < 0)
    throw DomainError("mu_of_energy: energy must be non-negative");
  T beta = p.beta;
  T t = beta * beta * energy;
  return log1p(t + sqrt(t * (2 + t))) / beta;
}

/// Outside decay rate rho = arccos(cosh(beta mu) / s) / beta, evaluated as
/// 2 asin(sqrt((1 - r) / 2)) / beta with 1 - r formed without cancellation.
/// Ratios exceeding 1 by at most 4 ulps are clamped to rho = 0.
template <class T>
T rho_of_mu(const T& mu, const Params& p) {
  using std::asin;
  using std::sinh;
  using std::sqrt;
  if (mu < 0) throw DomainError("rho_of_mu: mu must be non-negative");
  T beta = p.beta;
  T v0 = p.v0;
  T s = detail::well_scale(beta, v0);
  T h = sinh(beta * mu / 2);
  // s - cosh(beta mu)
  T gap = 2 * beta * beta * v0 / (s + 1) - 2 * h * h;
  T one_minus_ratio = gap / s;
  if (one_minus_ratio < 0) {
    if (-one_minus_ratio <= 4 * epsilon<T>()) {
      return T(0);
    }
    throw DomainError("rho_of_mu: mu exceeds mu_max (cosh(beta mu) > s)");
  }
  return 2 * asin(sqrt(one_minus_ratio / 2)) / beta;
}

/// Per-region solution family of the plane-wave ansatz exp((g_r + i g_i) x).
template <class T>
struct CaseInfo {
  int case_id = 2;
  /// Representative real exponent: pi/beta (case 1, n = 0),
  /// arccos(w)/beta (case 2), 0 (case 3, n = 0).
  T gamma_r{};
  /// The two imaginary-rate branches (both zero for case 2).
  std::array<T, 2> gamma_i{};
  /// Closed energy interval on which this case applies.
  T valid_from{};
  T valid_to{};
};

/// Case 1 below (-s-1)/beta^2, case 3 above (s-1)/beta^2, case 2 in between.
/// An energy sitting on a boundary is assigned to the higher case.
template <class T>
CaseInfo<T> classify_case(const T& energy, const T& v_c, const T& beta) {
  using std::acos;
  using std::log;
  using std::sqrt;
  if (!(beta > 0)) throw std::invalid_argument("classify_case: beta <= 0");
  const T inf = std::numeric_limits<T>::infinity();
  T s = detail::well_scale(beta, v_c);
  T b2 = beta * beta;
  T lower = (-s - 1) / b2;
  T upper = 2 * v_c / (s + 1);  // (s - 1) / beta^2
  T w = (1 + b2 * energy) / s;

  CaseInfo<T> info;
  if (energy < lower) {
    info.case_id = 1;
    T root = w * w > 1 ? T(sqrt(w * w - 1)) : T(0);
    info.gamma_r = pi<T>() / beta;
    info.gamma_i = {log(-w + root) / beta, log(-w - root) / beta};
    info.valid_from = -inf;
    info.valid_to = lower;
  } else if (energy < upper) {
    info.case_id = 2;
    if (w > 1) w = 1;
    if (w < -1) w = -1;
    info.gamma_r = acos(w) / beta;
    info.gamma_i = {T(0), T(0)};
    info.valid_from = lower;
    info.valid_to = upper;
  } else {
    info.case_id = 3;
    T root = w * w > 1 ? T(sqrt(w * w - 1)) : T(0);
    info.gamma_r = 0;
    info.gamma_i = {log(w + root) / beta, log(w - root) / beta};
    info.valid_from = upper;
    info.valid_to = inf;
  }
  return info;
}

}  // namespace neqm
