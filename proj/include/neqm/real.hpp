#pragma once

// Extended-precision scalar used by the matching/determinant kernels, plus a
// minimal complex type that works for both double and Real.

#include <boost/multiprecision/mpfr.hpp>

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <string>

namespace neqm {

using Real = boost::multiprecision::mpfr_float;

inline constexpr unsigned kDefaultMantissaBits = 256;

/// Decimal digits that give at least `bits` of binary mantissa in MPFR.
inline unsigned digits10_for_bits(unsigned bits) {
  unsigned d = 1;
  while (boost::multiprecision::detail::digits10_2_2(d) < bits) ++d;
  return d;
}

/// Effective mantissa width, in bits, of newly created Real values.
inline unsigned current_mantissa_bits() {
  Real probe = 1;
  return static_cast<unsigned>(mpfr_get_prec(probe.backend().data()));
}

/// Sets the process-wide Real precision for its lifetime and restores the
/// previous setting on exit. Not thread-safe: Boost 1.74 keeps one global
/// default precision.
class PrecisionScope {
 public:
  explicit PrecisionScope(unsigned mantissa_bits)
      : saved_(Real::default_precision()) {
    Real::default_precision(digits10_for_bits(mantissa_bits));
  }
  ~PrecisionScope() { Real::default_precision(saved_); }
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  unsigned saved_;
};

template <class T>
T pi() {
  if constexpr (std::is_same_v<T, double>) {
    return 3.141592653589793238462643383279502884;
  } else {
    T r = 0;
    mpfr_const_pi(r.backend().data(), MPFR_RNDN);
    return r;
  }
}

/// Machine epsilon at the current working precision.
template <class T>
T epsilon() {
  if constexpr (std::is_same_v<T, double>) {
    return std::numeric_limits<double>::epsilon();
  } else {
    T one = 1;
    T eps = one;
    mpfr_nextabove(eps.backend().data());
    return eps - one;
  }
}

/// x = m * 2^e with 0.5 <= |m| < 1, as an unbounded 64-bit exponent.
template <class T>
std::int64_t binary_exponent(const T& x) {
  if constexpr (std::is_same_v<T, double>) {
    int e = 0;
    std::frexp(x, &e);
    return e;
  } else {
    if (x == 0) return 0;
    return static_cast<std::int64_t>(mpfr_get_exp(x.backend().data()));
  }
}

/// Exact multiplication by 2^e.
template <class T>
T times_pow2(const T& x, std::int64_t e) {
  if constexpr (std::is_same_v<T, double>) {
    return std::ldexp(x, static_cast<int>(e));
  } else {
    T r = x;
    mpfr_mul_2si(r.backend().data(), x.backend().data(), static_cast<long>(e),
                 MPFR_RNDN);
    return r;
  }
}

/// Rounds x to a `bits`-wide mantissa (exponent range untouched).
inline Real round_to_bits(const Real& x, unsigned bits) {
  Real r = x;
  mpfr_prec_round(r.backend().data(), static_cast<mpfr_prec_t>(bits),
                  MPFR_RNDN);
  Real out = 0;  // working precision; the value is exact
  mpfr_set(out.backend().data(), r.backend().data(), MPFR_RNDN);
  return out;
}

template <class T>
double to_double(const T& x) {
  if constexpr (std::is_same_v<T, double>) {
    return x;
  } else {
    return x.template convert_to<double>();
  }
}

/// Decimal scientific rendering with `sig` significant digits and no
/// overflow at any exponent.
inline std::string to_sci_string(const Real& x, int sig) {
  return x.str(sig, std::ios_base::scientific);
}

template <class T>
struct Complex {
  T re{};
  T im{};

  Complex() = default;
  Complex(T r, T i = T(0)) : re(std::move(r)), im(std::move(i)) {}

  friend Complex operator+(const Complex& a, const Complex& b) {
    return {a.re + b.re, a.im + b.im};
  }
  friend Complex operator-(const Complex& a, const Complex& b) {
    return {a.re - b.re, a.im - b.im};
  }
  friend Complex operator*(const Complex& a, const Complex& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend Complex operator*(const Complex& a, const T& s) {
    return {a.re * s, a.im * s};
  }
  friend Complex operator/(const Complex& a, const Complex& b) {
    T den = b.re * b.re + b.im * b.im;
    return {(a.re * b.re + a.im * b.im) / den,
            (a.im * b.re - a.re * b.im) / den};
  }
  Complex operator-() const { return {-re, -im}; }
  Complex& operator+=(const Complex& b) {
    re += b.re;
    im += b.im;
    return *this;
  }
  Complex& operator*=(const Complex& b) { return *this = *this * b; }
  Complex conj() const { return {re, -im}; }
};

template <class T>
Complex<T> cexp(const Complex<T>& z) {
  using std::cos;
  using std::exp;
  using std::sin;
  T m = exp(z.re);
  return {m * cos(z.im), m * sin(z.im)};
}

template <class T>
Complex<T> ccos(const Complex<T>& z) {
  using std::cos;
  using std::cosh;
  using std::sin;
  using std::sinh;
  return {cos(z.re) * cosh(z.im), -sin(z.re) * sinh(z.im)};
}

}  // namespace neqm
