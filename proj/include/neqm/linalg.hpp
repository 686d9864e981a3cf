#pragma once

// Dense matrices over double or Real, LU factorization with partial or full
// pivoting, power-of-two equilibration, and a sign/mantissa/exponent value
// type for determinants far outside the double range.

#include <neqm/real.hpp>

#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace neqm {

template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, T(0)) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  /// Copies `block` into this matrix with its top-left corner at (r0, c0),
  /// multiplied by `factor` (+1 or -1).
  void set_block(std::size_t r0, std::size_t c0, const Matrix& block,
                 int factor = 1) {
    for (std::size_t r = 0; r < block.rows(); ++r)
      for (std::size_t c = 0; c < block.cols(); ++c)
        (*this)(r0 + r, c0 + c) = factor < 0 ? T(-block(r, c)) : block(r, c);
  }

  void swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t c = 0; c < cols_; ++c)
      std::swap((*this)(a, c), (*this)(b, c));
  }
  void swap_cols(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t r = 0; r < rows_; ++r)
      std::swap((*this)(r, a), (*this)(r, b));
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

/// value = sign * mantissa * 2^exponent, mantissa in [1, 2), zero iff sign 0.
template <class T>
struct ScaledValue {
  int sign = 0;
  T mantissa = T(0);
  std::int64_t exponent = 0;

  static ScaledValue zero() { return ScaledValue{}; }

  static ScaledValue from(const T& x) {
    ScaledValue v;
    if (x == 0) return v;
    v.sign = x < 0 ? -1 : 1;
    std::int64_t e = binary_exponent(x);  // |x| = m 2^e, m in [0.5, 1)
    T ax = x < 0 ? T(-x) : x;
    v.mantissa = times_pow2(ax, -(e - 1));
    v.exponent = e - 1;
    return v;
  }

  bool is_zero() const { return sign == 0; }

  ScaledValue& operator*=(const ScaledValue& o) {
    if (sign == 0 || o.sign == 0) return *this = zero();
    T m = mantissa * o.mantissa;  // [1, 4)
    std::int64_t e = exponent + o.exponent;
    if (m >= 2) {
      m = times_pow2(m, -1);
      ++e;
    }
    sign *= o.sign;
    mantissa = m;
    exponent = e;
    return *this;
  }
  friend ScaledValue operator*(ScaledValue a, const ScaledValue& b) {
    return a *= b;
  }

  ScaledValue& scale_pow2(std::int64_t e) {
    if (sign != 0) exponent += e;
    return *this;
  }
  ScaledValue operator-() const {
    ScaledValue r = *this;
    r.sign = -r.sign;
    return r;
  }

  /// log2 |value| (minus infinity for zero).
  double log2_abs() const {
    using std::log2;
    if (sign == 0) return -std::numeric_limits<double>::infinity();
    return static_cast<double>(exponent) + std::log2(to_double(mantissa));
  }

  /// Converts to T; the caller guarantees the exponent is representable.
  T value() const {
    if (sign == 0) return T(0);
    T m = times_pow2(mantissa, exponent);
    return sign < 0 ? T(-m) : m;
  }

  /// |this / other - 1|, or +inf when the two differ by more than 2^60.
  friend T relative_difference(const ScaledValue& a, const ScaledValue& b) {
    const T inf = std::numeric_limits<T>::infinity();
    if (a.sign == 0 && b.sign == 0) return T(0);
    if (a.sign == 0 || b.sign == 0) return inf;
    std::int64_t de = a.exponent - b.exponent;
    if (de > 60 || de < -60) return inf;
    T ratio = times_pow2(T(a.mantissa / b.mantissa), de);
    if (a.sign != b.sign) ratio = -ratio;
    T d = ratio - 1;
    return d < 0 ? T(-d) : d;
  }

  std::string to_string(int digits = 6) const {
    if (sign == 0) return "0";
    std::ostringstream os;
    os << (sign < 0 ? "-" : "");
    os.precision(digits);
    os << to_double(mantissa) << "*2^" << exponent;
    return os.str();
  }
};

enum class Pivoting { partial, full };

/// In-place LU factorization PAQ = LU (unit lower L stored below the
/// diagonal). Q is the identity under partial pivoting.
template <class T>
struct LuFactorization {
  Matrix<T> lu;
  std::vector<std::size_t> row_perm;  // row_perm[k] = original row in slot k
  std::vector<std::size_t> col_perm;  // col_perm[k] = original col in slot k
  int perm_sign = 1;
  bool singular = false;  // an exactly zero pivot column was met

  const T& pivot(std::size_t k) const { return lu(k, k); }
};

namespace detail {

template <class T>
T abs_value(const T& x) {
  return x < 0 ? T(-x) : x;
}

}  // namespace detail

/// Factorizes an m x n matrix, m <= n, eliminating min(m, n) columns.
template <class T>
LuFactorization<T> lu_factorize(Matrix<T> a, Pivoting pivoting) {
  using detail::abs_value;
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  LuFactorization<T> f;
  f.row_perm.resize(m);
  f.col_perm.resize(n);
  std::iota(f.row_perm.begin(), f.row_perm.end(), std::size_t{0});
  std::iota(f.col_perm.begin(), f.col_perm.end(), std::size_t{0});

  const std::size_t steps = std::min(m, n);
  T best, mag, factor;
  for (std::size_t k = 0; k < steps; ++k) {
    std::size_t pr = k, pc = k;
    best = abs_value(a(k, k));
    const std::size_t c_end = pivoting == Pivoting::full ? n : k + 1;
    for (std::size_t c = k; c < c_end; ++c) {
      for (std::size_t r = k; r < m; ++r) {
        mag = abs_value(a(r, c));
        if (mag > best) {
          best = mag;
          pr = r;
          pc = c;
        }
      }
    }
    if (pr != k) {
      a.swap_rows(pr, k);
      std::swap(f.row_perm[pr], f.row_perm[k]);
      f.perm_sign = -f.perm_sign;
    }
    if (pc != k) {
      a.swap_cols(pc, k);
      std::swap(f.col_perm[pc], f.col_perm[k]);
      f.perm_sign = -f.perm_sign;
    }
    if (a(k, k) == 0) {
      f.singular = true;
      continue;
    }
    for (std::size_t r = k + 1; r < m; ++r) {
      if (a(r, k) == 0) continue;
      factor = a(r, k) / a(k, k);
      a(r, k) = factor;
      for (std::size_t c = k + 1; c < n; ++c) a(r, c) -= factor * a(k, c);
    }
  }
  f.lu = std::move(a);
  return f;
}

/// Power-of-two row and column scalings that bring every column, then every
/// row, to a largest entry in [0.5, 1). Applying them never changes signs or
/// rounds any entry.
template <class T>
struct Equilibration {
  std::vector<std::int64_t> row_exp;  // entry (r, c) was multiplied by
  std::vector<std::int64_t> col_exp;  // 2^-(row_exp[r] + col_exp[c])

  std::int64_t total_exponent() const {
    std::int64_t s = 0;
    for (auto e : row_exp) s += e;
    for (auto e : col_exp) s += e;
    return s;
  }
};

template <class T>
Equilibration<T> equilibrate(Matrix<T>& a) {
  using detail::abs_value;
  Equilibration<T> eq;
  eq.row_exp.assign(a.rows(), 0);
  eq.col_exp.assign(a.cols(), 0);
  T mag;
  for (std::size_t c = 0; c < a.cols(); ++c) {
    T best = 0;
    for (std::size_t r = 0; r < a.rows(); ++r) {
      mag = abs_value(a(r, c));
      if (mag > best) best = mag;
    }
    if (best == 0) continue;
    std::int64_t e = binary_exponent(best);
    eq.col_exp[c] = e;
    for (std::size_t r = 0; r < a.rows(); ++r) a(r, c) = times_pow2(a(r, c), -e);
  }
  for (std::size_t r = 0; r < a.rows(); ++r) {
    T best = 0;
    for (std::size_t c = 0; c < a.cols(); ++c) {
      mag = abs_value(a(r, c));
      if (mag > best) best = mag;
    }
    if (best == 0) continue;
    std::int64_t e = binary_exponent(best);
    eq.row_exp[r] = e;
    for (std::size_t c = 0; c < a.cols(); ++c) a(r, c) = times_pow2(a(r, c), -e);
  }
  return eq;
}

struct DetOptions {
  bool equilibrate = true;
  Pivoting pivoting = Pivoting::partial;
};

/// Determinant of a square matrix as a ScaledValue, exact-zero pivots
/// reported as sign 0.
template <class T>
ScaledValue<T> determinant(Matrix<T> a, DetOptions opts = {}) {
  if (a.rows() != a.cols())
    throw std::invalid_argument("determinant: matrix is not square");
  std::int64_t shift = 0;
  if (opts.equilibrate) shift = equilibrate(a).total_exponent();
  LuFactorization<T> f = lu_factorize(std::move(a), opts.pivoting);
  if (f.singular) return ScaledValue<T>::zero();
  ScaledValue<T> det = ScaledValue<T>::from(T(f.perm_sign));
  for (std::size_t k = 0; k < f.lu.rows(); ++k)
    det *= ScaledValue<T>::from(f.pivot(k));
  det.scale_pow2(shift);
  return det;
}

}  // namespace neqm
