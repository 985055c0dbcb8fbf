#include "dynres/phase.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "dynres/quadrature.hpp"

namespace dynres {

double PhaseCoefficients::parseval_sum() const {
  double sum = 0.0;
  for (const auto& c : coeffs) sum += std::norm(c);
  return sum;
}

std::complex<double> PhaseCoefficients::reconstruct(double omega_mod,
                                                    double t) const {
  std::complex<double> sum{};
  for (int n = -n_max; n <= n_max; ++n) {
    sum += (*this)[n] * std::polar(1.0, -n * omega_mod * t);
  }
  return sum;
}

double modulation_value(const ModulationSpec& spec, double t) {
  switch (spec.shape()) {
    case ModulationShape::None:
      return 0.0;
    case ModulationShape::Sinusoid:
      return spec.depth() * std::sin(spec.omega_mod() * t);
    case ModulationShape::Tabulated:
      return spec.spline()->value(t / spec.period());
  }
  return 0.0;
}

double phase_integral(const ModulationSpec& spec, double t1, double t2) {
  switch (spec.shape()) {
    case ModulationShape::None:
      return 0.0;
    case ModulationShape::Sinusoid: {
      const double w = spec.omega_mod();
      return spec.depth() / w * (std::cos(w * t1) - std::cos(w * t2));
    }
    case ModulationShape::Tabulated: {
      const double p = spec.period();
      return p * (spec.spline()->integral(t2 / p) -
                  spec.spline()->integral(t1 / p));
    }
  }
  return 0.0;
}

double modulation_mean(const ModulationSpec& spec) {
  if (spec.shape() != ModulationShape::Tabulated) return 0.0;
  return spec.spline()->integral_per_period();
}

void require_zero_mean(const ModulationSpec& spec, const char* who) {
  const double mean = modulation_mean(spec);
  if (std::abs(mean) > 1e-12 * std::max(spec.depth(), 1.0)) {
    throw std::invalid_argument(std::string(who) +
                                ": modulation must have zero period mean (mean = " +
                                std::to_string(mean) + ")");
  }
}

int default_phase_order(const ModulationSpec& spec) {
  if (spec.shape() == ModulationShape::None) return 12;
  return static_cast<int>(std::ceil(spec.depth() / spec.omega_mod())) + 12;
}

PhaseCoefficients fourier_coefficients(const ModulationSpec& spec, int n_max) {
  PhaseCoefficients out;
  out.n_max = n_max;
  const auto count = static_cast<std::size_t>(2 * n_max + 1);
  out.coeffs.assign(count, {});
  if (spec.shape() == ModulationShape::None) {
    out.coeffs[static_cast<std::size_t>(n_max)] = 1.0;
    return out;
  }
  require_zero_mean(spec, "fourier_coefficients");
  const int required =
      static_cast<int>(std::ceil(spec.depth() / spec.omega_mod())) + 8;
  if (n_max < required) {
    throw std::invalid_argument("fourier_coefficients: n_max must be >= " +
                                std::to_string(required));
  }
  const double w = spec.omega_mod();
  const double period = spec.period();
  auto sample = [&](double t, std::vector<std::complex<double>>& buf) {
    const std::complex<double> base =
        std::polar(1.0, -accumulated_phase(spec, t));
    for (int n = -n_max; n <= n_max; ++n) {
      buf[static_cast<std::size_t>(n + n_max)] =
          base * std::polar(1.0, n * w * t);
    }
  };
  PeriodicTrapezoidOptions opt;
  opt.rel_tol = 0.0;
  opt.abs_tol = 1e-12 * period;
  auto integrals = periodic_trapezoid(sample, count, period, opt);
  for (std::size_t i = 0; i < count; ++i) {
    out.coeffs[i] = integrals[i] / period;
  }
  return out;
}

}  // namespace dynres
