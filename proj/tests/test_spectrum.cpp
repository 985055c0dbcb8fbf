#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "dynres/bath.hpp"
#include "dynres/propagator.hpp"
#include "dynres/rates.hpp"
#include "dynres/spectrum.hpp"

using namespace dynres;

namespace {

// Sum of unit-area Lorentzians of half-width w at n * omega with weights a_n.
Spectrum synthetic(double omega, double w, const std::vector<double>& weights, double step) {
  Spectrum s;
  const int half = static_cast<int>(std::round((omega * (weights.size() - 0.5)) / step));
  s.freqs.resize(2 * half + 1);
  s.values.resize(s.freqs.size());
  for (int i = -half; i <= half; ++i) {
    const double x = i * step;
    double v = 0.0;
    for (std::size_t n = 0; n < weights.size(); ++n) {
      for (int sign : {-1, 1}) {
        if (n == 0 && sign < 0) continue;
        const double c = sign * static_cast<double>(n) * omega;
        v += weights[n] * w / M_PI / ((x - c) * (x - c) + w * w);
      }
    }
    s.freqs(i + half) = x;
    s.values(i + half) = v;
  }
  s.weights = Eigen::ArrayXd::Constant(s.freqs.size(), step);
  s.total = (s.weights * s.values).sum();
  return s;
}

}  // namespace

TEST_CASE("spectrum integration uses half-open intervals") {
  Spectrum s;
  s.freqs = Eigen::ArrayXd::LinSpaced(5, 0.0, 4.0);
  s.values = Eigen::ArrayXd::Ones(5);
  s.weights = Eigen::ArrayXd::Constant(5, 1.0);
  CHECK(s.integrate(1.0, 3.0) == 2.0);
  CHECK(s.integrate(-10.0, 10.0) == 5.0);
  CHECK(s.integrate(4.5, 10.0) == 0.0);
}

TEST_CASE("peak weights of a synthetic line spectrum") {
  const std::vector<double> w = {0.4, 0.2, 0.05};
  const Spectrum s = synthetic(20.0, 0.02, w, 0.01);
  const PeakTable t = peak_weights(s, 20.0, -2, 2);
  REQUIRE(t.rows.size() == 5);
  // Bin masses lose the Lorentzian tails beyond +-Omega/2, about 2 w / (pi Omega / 2).
  CHECK(t.find(0)->weight == doctest::Approx(0.4).epsilon(2e-3));
  CHECK(t.find(1)->weight == doctest::Approx(0.2).epsilon(2e-3));
  CHECK(t.find(-2)->weight == doctest::Approx(t.find(2)->weight).epsilon(1e-5));
  CHECK(t.find(1)->center == 20.0);
  for (const auto& r : t.rows) CHECK(r.half_width == doctest::Approx(0.02).epsilon(1e-3));
  CHECK(std::abs(t.out_of_bin_mass) < 1e-3);
  CHECK(t.weight_sum() + t.out_of_bin_mass == doctest::Approx(s.total));
  CHECK(t.find(7) == nullptr);
}

TEST_CASE("peak weights need a resolved bin") {
  const Spectrum s = synthetic(0.5, 0.02, {1.0}, 0.01);
  CHECK_THROWS_AS(peak_weights(s, 0.5, 0, 0), std::invalid_argument);
  CHECK_THROWS_AS(peak_weights(s, -1.0, 0, 0), std::invalid_argument);
  CHECK_THROWS_AS(peak_weights(s, 2.0, 1, 0), std::invalid_argument);
}

TEST_CASE("Lorentzian fit recovers centre, width and height") {
  const Spectrum s = synthetic(20.0, 0.05, {1.0}, 0.005);
  const LorentzianFit f = fit_lorentzian(s, 0.0, 2.0);
  CHECK(f.converged);
  CHECK_FALSE(f.flagged);
  CHECK(f.half_width == doctest::Approx(0.05).epsilon(1e-6));
  CHECK(std::abs(f.center) < 1e-8);
  CHECK(f.height == doctest::Approx(1.0 / (M_PI * 0.05)).epsilon(1e-6));
}

TEST_CASE("Lorentzian fit flags a Gaussian line") {
  Spectrum s;
  s.freqs = Eigen::ArrayXd::LinSpaced(801, -2.0, 2.0);
  s.values = (-s.freqs.square() / (2 * 0.1 * 0.1)).exp();
  s.weights = Eigen::ArrayXd::Constant(801, 0.005);
  const LorentzianFit f = fit_lorentzian(s, 0.0, 2.0);
  CHECK(f.flagged);
  CHECK_THROWS_AS(fit_lorentzian(s, 10.0, 0.001), std::invalid_argument);
}

TEST_CASE("unmodulated analytic spectrum integrates to one") {
  const ReservoirSpec res{1.0, 1.0, 0.1};
  const Eigen::ArrayXd grid = Eigen::ArrayXd::LinSpaced(400001, -200.0, 200.0);
  const Spectrum s = analytic_spectrum(res, ModulationSpec::none(), grid, res.static_rate());
  // Integral of the Lorentzian product: gamma / (gamma + Gamma / 2), less the
  // tails beyond the grid.
  CHECK(s.total == doctest::Approx(1.0 / 1.01).epsilon(2e-4));
  CHECK(s.values(200000) == doctest::Approx(res.weight * res.weight / M_PI / 0.0001).epsilon(1e-6));
  CHECK_THROWS_AS(analytic_spectrum(res, ModulationSpec::none(), grid, 0.0), std::invalid_argument);
}

TEST_CASE("analytic spectrum bins carry the sideband rate fractions") {
  const ReservoirSpec res{1.0, 1.0, 1.0};
  const auto mod = ModulationSpec::sinusoid(30.0, 20.0);
  const RateBreakdown rates = total_rate(res, mod);
  const Eigen::ArrayXd grid = Eigen::ArrayXd::LinSpaced(20001, -50.0, 50.0);
  const Spectrum s = analytic_spectrum(res, mod, grid, rates.gamma_total);
  const PeakTable t = peak_weights(s, 20.0, -2, 2);
  for (const auto& r : t.rows) {
    const double expected = rates.at(r.n) / rates.gamma_total;
    if (expected > 0.01) CHECK(r.weight == doctest::Approx(expected).epsilon(0.02));
  }
}

TEST_CASE("occupation spectrum conserves the emitted population") {
  const ReservoirSpec res{1.0, 1.0, 0.5};
  const auto mod = ModulationSpec::sinusoid(20.0, 20.0);
  const auto bath = build_bath(res, mod, GridSpec{40.0, 0.05});
  const SimResult r = propagate(bath, default_sim_config(bath, 3.0));
  const Spectrum s = occupation_spectrum(r, bath);
  CHECK(s.total + s.residual_population == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(s.incomplete_decay);
  CHECK(s.freqs.size() == static_cast<Eigen::Index>(bath.size()));
  const auto other = build_bath(res, mod, GridSpec{30.0, 0.05});
  CHECK_THROWS_AS(occupation_spectrum(r, other), std::invalid_argument);
}
