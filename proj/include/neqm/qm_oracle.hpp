#pragma once

// Standard quantum finite square well (hbar = m = a = 1, |x| < 1 inside).
// Serves as the beta -> 0 reference for the Newton-equivalent solver.

#include <neqm/core.hpp>
#include <neqm/linalg.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

namespace neqm::qm {

struct QmState {
  double k = 0;
  double kappa = 0;
  double energy = 0;
  Parity parity = Parity::even;
};

namespace detail {

inline double kappa_of(double k, double v0) {
  double d = 2 * v0 - k * k;
  return d > 0 ? std::sqrt(d) : 0.0;
}

// Zeros of these coincide with kappa = k tan k and kappa = -k cot k
// respectively, and neither has poles.
inline double even_condition(double k, double v0) {
  return kappa_of(k, v0) * std::cos(k) - k * std::sin(k);
}
inline double odd_condition(double k, double v0) {
  return kappa_of(k, v0) * std::sin(k) + k * std::cos(k);
}

template <class F>
double bisect(F&& f, double lo, double hi) {
  double flo = f(lo);
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (hi - lo <= 1e-15 * hi) break;
    double fm = f(mid);
    if (fm == 0) return mid;
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// One root per branch: even roots live in (n pi, n pi + pi/2), odd roots in
// (n pi + pi/2, (n + 1) pi), each clipped to k < sqrt(2 v0).
inline std::vector<double> branch_roots(double v0, double offset,
                                        double (*cond)(double, double)) {
  std::vector<double> roots;
  if (!(v0 > 0)) return roots;
  const double kmax = std::sqrt(2 * v0);
  const double half_pi = 0.5 * pi<double>();
  for (int n = 0;; ++n) {
    double lo = n * pi<double>() + offset;
    if (lo >= kmax) break;
    double hi = std::min(lo + half_pi, kmax);
    auto f = [&](double k) { return cond(k, v0); };
    double flo = f(lo), fhi = f(hi);
    if (flo == 0 && lo > 0) {
      roots.push_back(lo);
      continue;
    }
    if ((flo < 0) == (fhi < 0)) continue;
    double r = bisect(f, lo, hi);
    if (r > 0) roots.push_back(r);
  }
  return roots;
}

}  // namespace detail

/// All even-parity k in (0, sqrt(2 v0)), ascending.
inline std::vector<double> qm_even_roots(double v0) {
  return detail::branch_roots(v0, 0.0, &detail::even_condition);
}

/// All odd-parity k in (0, sqrt(2 v0)), ascending; empty for v0 < pi^2/8.
inline std::vector<double> qm_odd_roots(double v0) {
  return detail::branch_roots(v0, 0.5 * pi<double>(), &detail::odd_condition);
}

/// Even and odd states merged by energy. Parities alternate from even.
inline std::vector<QmState> qm_spectrum(double v0) {
  std::vector<QmState> out;
  for (double k : qm_even_roots(v0))
    out.push_back({k, detail::kappa_of(k, v0), 0.5 * k * k, Parity::even});
  for (double k : qm_odd_roots(v0))
    out.push_back({k, detail::kappa_of(k, v0), 0.5 * k * k, Parity::odd});
  std::sort(out.begin(), out.end(),
            [](const QmState& a, const QmState& b) { return a.k < b.k; });
  return out;
}

struct QmDeterminants {
  double full = 0;
  double even = 0;
  double odd = 0;
};

/// The 4x4 matching matrix for unknowns (A, B1, B2, C).
inline Matrix<double> qm_matching_matrix(double k, double v0) {
  double kap = detail::kappa_of(k, v0);
  double e = std::exp(-kap), c = std::cos(k), s = std::sin(k);
  Matrix<double> m(4, 4);
  m(0, 0) = e;       m(0, 1) = -c;     m(0, 2) = s;      m(0, 3) = 0;
  m(1, 0) = kap * e; m(1, 1) = -k * s; m(1, 2) = -k * c; m(1, 3) = 0;
  m(2, 0) = 0;       m(2, 1) = -c;     m(2, 2) = -s;     m(2, 3) = e;
  m(3, 0) = 0;       m(3, 1) = k * s;  m(3, 2) = -k * c; m(3, 3) = -kap * e;
  return m;
}

/// det M together with the 2x2 parity-sector determinants.
inline QmDeterminants qm_det_check(double k, double v0) {
  if (!(k > 0) || !(k * k < 2 * v0))
    throw DomainError("qm_det_check: need 0 < k < sqrt(2 v0)");
  double kap = detail::kappa_of(k, v0);
  double e = std::exp(-kap), c = std::cos(k), s = std::sin(k);
  QmDeterminants d;
  d.full = determinant(qm_matching_matrix(k, v0), {false, Pivoting::partial})
               .value();
  // M(e) = [[e, -c], [kap e, -k s]],  M(o) = [[e, s], [kap e, -k c]]
  d.even = e * (-k * s) - (-c) * kap * e;
  d.odd = e * (-k * c) - s * kap * e;
  return d;
}

}  // namespace neqm::qm
