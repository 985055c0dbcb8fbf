#pragma once

// Modulation value, running phase integral and the Fourier sideband
// coefficients of the accumulated phase factor exp(-i int_0^t f).

#include <complex>
#include <vector>

#include "dynres/modulation.hpp"

namespace dynres {

/// Fourier coefficients F_n, n in [-n_max, n_max], of
/// exp(-i int_0^t f) = sum_n F_n exp(-i n Omega t).
struct PhaseCoefficients {
  int n_max = 0;
  std::vector<std::complex<double>> coeffs;  // index n + n_max

  std::complex<double> operator[](int n) const {
    return (n < -n_max || n > n_max) ? std::complex<double>{}
                                     : coeffs[static_cast<std::size_t>(n + n_max)];
  }
  /// sum_n |F_n|^2
  double parseval_sum() const;
  /// sum_n F_n exp(-i n Omega t)
  std::complex<double> reconstruct(double omega_mod, double t) const;
};

double modulation_value(const ModulationSpec& spec, double t);

/// int_{t1}^{t2} f(tau) dtau, closed form for every shape.
double phase_integral(const ModulationSpec& spec, double t1, double t2);

/// int_0^t f(tau) dtau.
inline double accumulated_phase(const ModulationSpec& spec, double t) {
  return phase_integral(spec, 0.0, t);
}

/// Period average of f; zero for the sinusoid.
double modulation_mean(const ModulationSpec& spec);

/// Throws std::invalid_argument unless f averages to zero over a period,
/// which the sideband expansion needs for exp(-i int f) to be periodic.
void require_zero_mean(const ModulationSpec& spec, const char* who);

/// Default truncation ceil(d / Omega) + 12.
int default_phase_order(const ModulationSpec& spec);

PhaseCoefficients fourier_coefficients(const ModulationSpec& spec, int n_max);

}  // namespace dynres
