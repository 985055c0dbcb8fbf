#pragma once

// Analytic decay rates: per-sideband rates, their sum, the ultrafast closed
// form, the variable-detuning comparison model and Markov-validity checks.

#include <complex>
#include <map>
#include <optional>
#include <string_view>

#include "dynres/bath.hpp"
#include "dynres/modulation.hpp"

namespace dynres {

enum class RateMethod { Quadrature, BesselSum, Ultrafast };
enum class Validity { WeakCoupling, FastModulation, Both, Invalid };

std::string_view to_string(RateMethod m);
std::string_view to_string(Validity v);

/// "<<" thresholds for the two Markov conditions: D <= ratio * gamma and
/// d * Omega >= factor * max(gamma^2, D^2).
struct ValidityThresholds {
  double weak_coupling_ratio = 0.2;
  double fast_modulation_factor = 25.0;
};

struct RateBreakdown {
  std::map<int, double> gamma_n;
  double gamma_total = 0.0;
  RateMethod method = RateMethod::Quadrature;
  Validity validity = Validity::Invalid;
  int n_max = 0;

  double at(int n) const {
    auto it = gamma_n.find(n);
    return it == gamma_n.end() ? 0.0 : it->second;
  }
};

struct DetuningRates {
  std::map<int, double> gamma_n_prime;
  double gamma_total_prime = 0.0;
};

/// Decay rate into sideband n from a single-period quadrature of the
/// sideband coupling times its accumulated phase.
double sideband_rate(const ReservoirSpec& res, const ModulationSpec& mod, int n);

/// Same quantity for f(t) = d sin(Omega t), through the Bessel expansion of
/// the phase factor.
double bessel_sum_rate(const ReservoirSpec& res, double depth, double omega_mod,
                       int n);

/// Default sideband truncation ceil(d / Omega) + 12.
int default_rate_order(const ModulationSpec& mod);

RateBreakdown total_rate(const ReservoirSpec& res, const ModulationSpec& mod,
                         std::optional<int> n_max = std::nullopt,
                         const ValidityThresholds& thresholds = {});

/// Leading n = m = 0 term for Omega >> d, gamma, D:
/// (2D^2/gamma) [2 gamma J0(d/Omega) K(m)]^2 / (pi^2 (gamma^2 + d^2)),
/// m = d^2 / (gamma^2 + d^2).
double ultrafast_rate(const ReservoirSpec& res, double depth, double omega_mod);

DetuningRates detuning_rates(const ReservoirSpec& res, double depth,
                             double omega_mod, int n_max);

/// (2D^2/gamma) J0(d/Omega)^2
double detuning_ultrafast_rate(const ReservoirSpec& res, double depth,
                               double omega_mod);

/// Ultrafast ratio of the two models as a function of x = d / gamma.
double suppression_ratio(double x);

Validity markov_validity(const ReservoirSpec& res, const ModulationSpec& mod,
                         const ValidityThresholds& thresholds = {});

/// Two-time memory kernel K(t, t') in the continuum limit. The Lorentzian
/// part of the detuning integral is done in closed form; the remainder,
/// which falls off as 1/delta^4, is integrated numerically on
/// [-1000 gamma, 1000 gamma].
std::complex<double> memory_kernel(const ReservoirSpec& res,
                                   const ModulationSpec& mod, double t,
                                   double t_prime);

}  // namespace dynres
