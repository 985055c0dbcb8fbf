#pragma once

// Final reservoir occupation spectrum (simulated and analytic), sideband
// peak weights and Lorentzian peak fits.

#include <vector>

#include <Eigen/Dense>

#include "dynres/bath.hpp"
#include "dynres/propagator.hpp"

namespace dynres {

struct Spectrum {
  Eigen::ArrayXd freqs;    // initial-frequency detuning omega - omega0
  Eigen::ArrayXd values;   // S(omega)
  Eigen::ArrayXd weights;  // quadrature weight of each sample
  double total = 0.0;      // sum weights * values
  double residual_population = 0.0;  // |c_a(t_final)|^2 (simulated only)
  bool incomplete_decay = false;     // residual above 1e-2

  double integrate(double lo, double hi) const;
};

struct PeakRow {
  int n = 0;
  double center = 0.0;      // n Omega, relative to omega0
  double weight = 0.0;      // S_n
  double half_width = 0.0;  // fitted; NaN when the fit was not possible
};

struct PeakTable {
  std::vector<PeakRow> rows;
  double out_of_bin_mass = 0.0;  // total minus the sum of all bins

  double weight_sum() const;
  const PeakRow* find(int n) const;
};

struct LorentzianFit {
  double half_width = 0.0;
  double height = 0.0;
  double center = 0.0;
  double residual = 0.0;  // rms misfit relative to the peak height
  int iterations = 0;
  bool converged = false;
  bool flagged = false;   // misfit above kLorentzianResidualLimit or no convergence
};

inline constexpr double kLorentzianResidualLimit = 0.02;

/// S_k = rho |c_k(t_final)|^2 on the bath grid; every sample weighs Delta omega,
/// so the total equals sum_k |c_k|^2.
Spectrum occupation_spectrum(const SimResult& result, const DiscreteBath& bath);

/// Bin masses over the half-open bins [(n - 1/2) Omega, (n + 1/2) Omega),
/// with Lorentzian half-widths fitted on +-fit_window about each centre.
PeakTable peak_weights(const Spectrum& spec, double omega_mod, int n_min,
                       int n_max, double fit_window = 0.0);

/// Long-time spectrum from the Markovian amplitude c_a = exp(-Gamma t / 2):
/// S = (D^2 gamma / pi) |int_0^T dt exp(i delta t + i Phi(t) - Gamma t / 2)
///     / sqrt(gamma^2 + (delta + f(t))^2)|^2, T = 40 / Gamma.
Spectrum analytic_spectrum(const ReservoirSpec& res, const ModulationSpec& mod,
                           const Eigen::ArrayXd& freq_grid, double gamma_total,
                           int threads = 1);

/// Gauss-Newton (Levenberg damped) fit of A / ((omega - c)^2 + w^2) to the
/// samples within +-window of `center`.
LorentzianFit fit_lorentzian(const Spectrum& spec, double center, double window);

}  // namespace dynres
