#pragma once

// Bessel functions of the first kind and the complete elliptic integral of
// the first kind. Header-only, templated on the floating-point scalar.

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace dynres {

namespace detail {

// Hankel asymptotic expansion for J0 and J1; accurate to machine precision
// once x is a few tens.
template <typename Scalar>
void bessel_j01_asymptotic(Scalar x, Scalar& j0, Scalar& j1) {
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  auto pq = [&](int nu, Scalar& p, Scalar& q) {
    const Scalar mu = Scalar(4 * nu * nu);
    p = Scalar(1);
    q = Scalar(0);
    Scalar term = Scalar(1);
    Scalar prev = std::numeric_limits<Scalar>::max();
    for (int k = 1; k < 200; ++k) {
      const Scalar odd = Scalar(2 * k - 1);
      term *= (mu - odd * odd) / (Scalar(k) * Scalar(8) * x);
      const Scalar mag = std::abs(term);
      if (mag > prev) break;  // series has started to diverge
      prev = mag;
      // a_k / x^k alternates between q (odd k) and p (even k) with signs
      // (-1)^{k/2} for p and (-1)^{(k-1)/2} for q.
      if (k % 2 == 1) {
        q += ((k / 2) % 2 == 0) ? term : -term;
      } else {
        p += ((k / 2) % 2 == 0) ? term : -term;
      }
      if (mag < eps * Scalar(1e-2)) break;
    }
  };
  Scalar p0, q0, p1, q1;
  pq(0, p0, q0);
  pq(1, p1, q1);
  const Scalar s = std::sin(x);
  const Scalar c = std::cos(x);
  const Scalar r2 = std::sqrt(Scalar(2));
  const Scalar amp = std::sqrt(Scalar(2) / (std::numbers::pi_v<Scalar> * x));
  // chi0 = x - pi/4, chi1 = x - 3pi/4, expanded to keep x exact.
  const Scalar cos_chi0 = (c + s) / r2;
  const Scalar sin_chi0 = (s - c) / r2;
  const Scalar cos_chi1 = (s - c) / r2;
  const Scalar sin_chi1 = -(s + c) / r2;
  j0 = amp * (p0 * cos_chi0 - q0 * sin_chi0);
  j1 = amp * (p1 * cos_chi1 - q1 * sin_chi1);
}

// Miller's downward recurrence normalised by J0 + 2 sum J_2k = 1.
template <typename Scalar>
Scalar bessel_j_miller(int n, Scalar x) {
  const Scalar top = std::max(Scalar(n), x);
  int start = static_cast<int>(top + Scalar(40) + Scalar(4) * std::sqrt(top));
  start += start % 2;
  const Scalar big = std::sqrt(std::numeric_limits<Scalar>::max());
  const Scalar small = Scalar(1) / big;

  Scalar j_above = Scalar(0);
  Scalar j_here = small;
  Scalar sum = Scalar(0);
  Scalar result = Scalar(0);
  const Scalar two_over_x = Scalar(2) / x;
  for (int k = start; k > 0; --k) {
    const Scalar j_below = Scalar(k) * two_over_x * j_here - j_above;
    j_above = j_here;
    j_here = j_below;  // now J_{k-1}
    if (std::abs(j_here) > big) {
      j_here *= small;
      j_above *= small;
      sum *= small;
      result *= small;
    }
    const int order = k - 1;
    if (order == n) result = j_here;
    if (order > 0 && order % 2 == 0) sum += Scalar(2) * j_here;
  }
  sum += j_here;
  return result / sum;
}

}  // namespace detail

/// Bessel function of the first kind J_n(x) for integer order.
///
/// Miller's normalised downward recurrence covers x < 25 and every n > x;
/// for larger x the Hankel expansion seeds an upward recurrence, which is
/// stable while the order stays below the argument.
template <typename Scalar>
Scalar bessel_j(int n, Scalar x) {
  if (n < 0) {
    const Scalar v = bessel_j<Scalar>(-n, x);
    return (n % 2 == 0) ? v : -v;
  }
  if (x < Scalar(0)) {
    const Scalar v = bessel_j<Scalar>(n, -x);
    return (n % 2 == 0) ? v : -v;
  }
  if (x == Scalar(0)) return n == 0 ? Scalar(1) : Scalar(0);

  if (x >= Scalar(25) && Scalar(n) <= x) {
    Scalar j0, j1;
    detail::bessel_j01_asymptotic(x, j0, j1);
    if (n == 0) return j0;
    Scalar prev = j0;
    Scalar cur = j1;
    for (int k = 1; k < n; ++k) {
      const Scalar next = Scalar(2 * k) / x * cur - prev;
      prev = cur;
      cur = next;
    }
    return cur;
  }
  return detail::bessel_j_miller(n, x);
}

/// Complete elliptic integral of the first kind in the parameter
/// convention, K(m) = int_0^{pi/2} dtheta / sqrt(1 - m sin^2 theta),
/// via the arithmetic-geometric mean.
template <typename Scalar>
Scalar elliptic_k(Scalar m) {
  if (!(m < Scalar(1))) {
    throw std::domain_error("elliptic_k: parameter m must be < 1");
  }
  Scalar a = Scalar(1);
  Scalar b = std::sqrt(Scalar(1) - m);
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  for (int it = 0; it < 64 && std::abs(a - b) > eps * a; ++it) {
    const Scalar next_a = (a + b) / Scalar(2);
    b = std::sqrt(a * b);
    a = next_a;
  }
  return std::numbers::pi_v<Scalar> / (Scalar(2) * a);
}

/// Number of AGM iterations elliptic_k performs for parameter m.
template <typename Scalar>
int elliptic_k_iterations(Scalar m) {
  Scalar a = Scalar(1);
  Scalar b = std::sqrt(Scalar(1) - m);
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  int it = 0;
  for (; it < 64 && std::abs(a - b) > eps * a; ++it) {
    const Scalar next_a = (a + b) / Scalar(2);
    b = std::sqrt(a * b);
    a = next_a;
  }
  return it;
}

}  // namespace dynres
