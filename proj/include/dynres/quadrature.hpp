#pragma once

// Quadrature rules shared by the analytic modules.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace dynres {

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PeriodicTrapezoidOptions {
  std::size_t initial_points = 64;
  std::size_t max_points = std::size_t{1} << 18;
  double rel_tol = 1e-10;
  double abs_tol = 0.0;
};

/// Periodic trapezoid rule over [0, period) for a bank of integrands.
///
/// `sample(t, out)` writes the integrand values at t into `out` (size
/// `count`). The point count doubles, reusing previous samples, until every
/// component changes by less than rel_tol * |value| + abs_tol.
template <typename Sampler>
std::vector<std::complex<double>> periodic_trapezoid(
    Sampler&& sample, std::size_t count, double period,
    const PeriodicTrapezoidOptions& opt = {}) {
  using cplx = std::complex<double>;
  std::vector<cplx> sums(count, cplx{});
  std::vector<cplx> buf(count);
  std::size_t points = opt.initial_points;
  for (std::size_t i = 0; i < points; ++i) {
    sample(period * static_cast<double>(i) / static_cast<double>(points), buf);
    for (std::size_t c = 0; c < count; ++c) sums[c] += buf[c];
  }
  std::vector<cplx> estimate(count);
  for (std::size_t c = 0; c < count; ++c) {
    estimate[c] = sums[c] * (period / static_cast<double>(points));
  }
  while (points < opt.max_points) {
    // New nodes sit halfway between the existing ones.
    for (std::size_t i = 0; i < points; ++i) {
      const double t = period * (static_cast<double>(i) + 0.5) /
                       static_cast<double>(points);
      sample(t, buf);
      for (std::size_t c = 0; c < count; ++c) sums[c] += buf[c];
    }
    points *= 2;
    bool converged = true;
    for (std::size_t c = 0; c < count; ++c) {
      const cplx next = sums[c] * (period / static_cast<double>(points));
      if (std::abs(next - estimate[c]) >
          opt.rel_tol * std::abs(next) + opt.abs_tol) {
        converged = false;
      }
      estimate[c] = next;
    }
    if (converged) return estimate;
  }
  throw ConvergenceError("periodic trapezoid did not converge within " +
                         std::to_string(opt.max_points) + " points");
}

namespace detail {

// 7-point Gauss / 15-point Kronrod nodes and weights on [-1, 1].
inline constexpr std::array<double, 8> kronrod_nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kronrod_weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> gauss_weights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename F>
std::complex<double> gk15(F& f, double a, double b, double& err) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  const std::complex<double> fc = f(mid);
  std::complex<double> kron = fc * kronrod_weights[7];
  std::complex<double> gauss = fc * gauss_weights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kronrod_nodes[j];
    const std::complex<double> s = f(mid - dx) + f(mid + dx);
    kron += kronrod_weights[j] * s;
    if (j % 2 == 1) gauss += gauss_weights[j / 2] * s;
  }
  err = std::abs((kron - gauss) * half);
  return kron * half;
}

template <typename F>
std::complex<double> adaptive_gk(F& f, double a, double b, double tol,
                                 int depth, int& budget) {
  double err = 0.0;
  const std::complex<double> whole = gk15(f, a, b, err);
  if (err <= tol || depth == 0 || budget <= 0) {
    if (err > tol) budget = -1;  // mark failure
    return whole;
  }
  --budget;
  const double mid = 0.5 * (a + b);
  return adaptive_gk(f, a, mid, 0.5 * tol, depth - 1, budget) +
         adaptive_gk(f, mid, b, 0.5 * tol, depth - 1, budget);
}

}  // namespace detail

/// Adaptive Gauss-Kronrod (G7/K15) quadrature of a complex integrand on
/// [a, b], split initially into `pieces` equal panels.
template <typename F>
std::complex<double> integrate_adaptive(F&& f, double a, double b,
                                        double abs_tol, int pieces = 64,
                                        int max_depth = 30) {
  int budget = 1 << 20;
  std::complex<double> total{};
  const double width = (b - a) / pieces;
  for (int p = 0; p < pieces; ++p) {
    total += detail::adaptive_gk(f, a + p * width, a + (p + 1) * width,
                                 abs_tol / pieces, max_depth, budget);
  }
  if (budget < 0) {
    throw ConvergenceError("adaptive Gauss-Kronrod quadrature failed");
  }
  return total;
}

}  // namespace dynres
