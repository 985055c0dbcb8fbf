#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "dynres/phase.hpp"
#include "dynres/specfun.hpp"
#include "oracles.hpp"

using namespace dynres;

namespace {

ModulationSpec::Table sine_table(int rows, double depth) {
  ModulationSpec::Table t;
  for (int i = 0; i <= rows; ++i) {
    const double s = static_cast<double>(i) / rows;
    t.emplace_back(s, depth * std::sin(2.0 * oracle::pi * s));
  }
  t.back().second = t.front().second;
  return t;
}

}  // namespace

TEST_CASE("sinusoid value, depth and period") {
  const auto m = ModulationSpec::sinusoid(68.0, 20.0);
  CHECK(m.period() == doctest::Approx(2.0 * oracle::pi / 20.0));
  double hi = 0.0;
  for (int i = 0; i < 10000; ++i) hi = std::max(hi, std::abs(modulation_value(m, i * 1e-4 * m.period())));
  CHECK(hi == doctest::Approx(68.0).epsilon(1e-7));
  CHECK(modulation_value(ModulationSpec::none(), 3.0) == 0.0);
  CHECK(ModulationSpec::none().period() == 0.0);
}

TEST_CASE("modulation construction errors") {
  CHECK_THROWS_AS(ModulationSpec::sinusoid(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(ModulationSpec::sinusoid(-1.0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(ModulationSpec::tabulated(1.0, {{0, 0}, {0.5, 1}, {1, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(ModulationSpec::tabulated(1.0, {{0, 0}, {0.3, 1}, {0.6, -1}, {1, 0.5}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(ModulationSpec::tabulated(1.0, {{0.1, 0}, {0.3, 1}, {0.6, -1}, {1, 0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(ModulationSpec::tabulated(1.0, {{0, 0}, {0.6, 1}, {0.3, -1}, {1, 0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(ModulationSpec::none().with_depth(2.0), std::invalid_argument);
}

TEST_CASE("periodic spline interpolates its knots and is periodic") {
  const ModulationSpec::Table table = {{0.0, 1.0}, {0.2, 3.0}, {0.45, -2.0}, {0.7, 0.5}, {1.0, 1.0}};
  const auto m = ModulationSpec::tabulated(3.0, table);
  const PeriodicSpline& s = *m.spline();
  for (const auto& [x, v] : table) CHECK(s.value(x) == doctest::Approx(v).epsilon(1e-13));
  for (double x : {0.05, 0.33, 0.8}) {
    CHECK(s.value(x + 2.0) == doctest::Approx(s.value(x)).epsilon(1e-13));
    CHECK(s.value(x - 1.0) == doctest::Approx(s.value(x)).epsilon(1e-13));
  }
  // The antiderivative agrees with a fine Simpson rule.
  for (double x : {0.13, 0.5, 0.99, 2.37}) {
    const double ref = oracle::simpson([&](double u) { return s.value(u); }, 0.0, x, 20000);
    CHECK(s.integral(x) == doctest::Approx(ref).epsilon(1e-10));
  }
}

TEST_CASE("phase integral of the sinusoid vanishes over a period") {
  const auto m = ModulationSpec::sinusoid(30.0, 7.0);
  for (double t : {0.0, 0.3, 5.1}) CHECK(std::abs(phase_integral(m, t, t + m.period())) < 1e-12);
  CHECK(phase_integral(m, 0.0, m.period() / 2) == doctest::Approx(2.0 * 30.0 / 7.0));
}

TEST_CASE("phase integral equals quadrature of the modulation") {
  const auto table = ModulationSpec::Table{{0.0, 0.0}, {0.3, 2.0}, {0.5, 0.0}, {0.8, -2.5}, {1.0, 0.0}};
  for (const ModulationSpec& m : {ModulationSpec::sinusoid(12.0, 4.0), ModulationSpec::tabulated(4.0, table)}) {
    for (auto [a, b] : {std::pair{0.0, 0.7}, std::pair{0.2, 3.9}, std::pair{-1.0, 1.3}}) {
      const double ref = oracle::simpson([&](double t) { return modulation_value(m, t); }, a, b, 40000);
      CHECK(phase_integral(m, a, b) == doctest::Approx(ref).epsilon(1e-9).scale(1.0));
    }
  }
}

TEST_CASE("phase integral over a period is independent of the start time") {
  const auto m = ModulationSpec::tabulated(2.5, {{0.0, 1.0}, {0.4, 2.0}, {0.7, -0.5}, {1.0, 1.0}});
  const double ref = phase_integral(m, 0.0, m.period());
  for (double t : {0.1, 1.7, 13.2}) {
    CHECK(phase_integral(m, t, t + m.period()) == doctest::Approx(ref).epsilon(1e-12));
  }
  CHECK(ref == doctest::Approx(modulation_mean(m) * m.period()).epsilon(1e-12));
}

TEST_CASE("tabulated copy of a sinusoid tracks the closed-form phase") {
  const double d = 5.0, w = 3.0;
  const auto sine = ModulationSpec::sinusoid(d, w);
  const auto tab = ModulationSpec::tabulated(w, sine_table(2000, d));
  double worst = 0.0;
  for (int i = 0; i <= 4000; ++i) {
    const double t = 10.0 * sine.period() * i / 4000.0;
    worst = std::max(worst, std::abs(accumulated_phase(tab, t) - accumulated_phase(sine, t)));
  }
  CHECK(worst < 1e-8);
  CHECK(tab.depth() == doctest::Approx(d).epsilon(1e-6));
}

TEST_CASE("sinusoid Fourier coefficients are Bessel functions") {
  for (double x : {0.0, 0.4, 3.4, 9.0}) {
    const auto m = ModulationSpec::sinusoid(20.0 * x, 20.0);
    const auto f = fourier_coefficients(m, default_phase_order(m));
    for (int n = -f.n_max; n <= f.n_max; ++n) {
      // exp(-i (d/W)(1 - cos W t)) = sum_n F_n exp(-i n W t) gives
      // F_n = exp(-i x) i^n J_n(x) with x = d / W.
      const std::complex<double> in = std::pow(std::complex<double>(0, 1), n);
      const std::complex<double> ref = std::polar(1.0, -x) * in * bessel_j<double>(n, x);
      CHECK(std::abs(f[n] - ref) < 1e-12);
    }
  }
}

TEST_CASE("Fourier coefficients reconstruct the phase factor") {
  const auto table = ModulationSpec::Table{{0.0, 0.0}, {0.25, 1.0}, {0.5, 0.0}, {0.75, -1.0}, {1.0, 0.0}};
  // A cubic spline has a discontinuous third derivative, so its coefficients
  // decay only algebraically and need a longer series pointwise.
  const std::pair<ModulationSpec, int> cases[] = {
      {ModulationSpec::sinusoid(68.0, 20.0), 0},
      {ModulationSpec::tabulated(5.0, table).with_depth(12.0), 200}};
  for (const auto& [m, extra] : cases) {
    const auto f = fourier_coefficients(m, default_phase_order(m) + extra);
    CHECK(f.parseval_sum() >= 1.0 - 1e-8);
    CHECK(f.parseval_sum() <= 1.0 + 1e-8);
    for (double t : {0.0, 0.011, 0.13, 0.5, 2.0}) {
      const std::complex<double> exact = std::polar(1.0, -accumulated_phase(m, t));
      CHECK(std::abs(f.reconstruct(m.omega_mod(), t) - exact) < 1e-8);
    }
  }
}

TEST_CASE("Fourier coefficients of the unmodulated bath") {
  const auto f = fourier_coefficients(ModulationSpec::none(), 3);
  CHECK(f[0] == std::complex<double>(1.0, 0.0));
  CHECK(f[2] == std::complex<double>(0.0, 0.0));
  CHECK(f[99] == std::complex<double>(0.0, 0.0));
}

TEST_CASE("Fourier truncation below the required order is rejected") {
  const auto m = ModulationSpec::sinusoid(68.0, 20.0);
  CHECK_THROWS_AS(fourier_coefficients(m, 5), std::invalid_argument);
  CHECK_NOTHROW(fourier_coefficients(m, 12));
}

TEST_CASE("nonzero-mean tables are rejected by the sideband expansion") {
  const auto m = ModulationSpec::tabulated(2.0, {{0.0, 1.0}, {0.3, 2.0}, {0.6, 1.5}, {1.0, 1.0}});
  CHECK(modulation_mean(m) > 0.5);
  CHECK_THROWS_AS(fourier_coefficients(m, 20), std::invalid_argument);
}

TEST_CASE("with_depth rescales tabulated values") {
  const auto m = ModulationSpec::tabulated(2.0, sine_table(64, 1.0));
  const auto scaled = m.with_depth(10.0);
  CHECK(scaled.depth() == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(modulation_value(scaled, 0.3) == doctest::Approx(10.0 / m.depth() * modulation_value(m, 0.3)));
  CHECK(m.with_omega_mod(4.0).period() == doctest::Approx(m.period() / 2));
}
