#include "dynres/rates.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "dynres/phase.hpp"
#include "dynres/quadrature.hpp"
#include "dynres/specfun.hpp"

namespace dynres {

namespace {

constexpr double pi = std::numbers::pi;

PeriodicTrapezoidOptions rate_quadrature(double rel_tol, double abs_tol) {
  PeriodicTrapezoidOptions opt;
  opt.initial_points = 64;
  opt.rel_tol = rel_tol;
  opt.abs_tol = abs_tol;
  return opt;
}

}  // namespace

std::string_view to_string(RateMethod m) {
  switch (m) {
    case RateMethod::Quadrature: return "quadrature";
    case RateMethod::BesselSum: return "bessel_sum";
    case RateMethod::Ultrafast: return "ultrafast";
  }
  return "?";
}

std::string_view to_string(Validity v) {
  switch (v) {
    case Validity::WeakCoupling: return "weak_coupling";
    case Validity::FastModulation: return "fast_modulation";
    case Validity::Both: return "both";
    case Validity::Invalid: return "invalid";
  }
  return "?";
}

double sideband_rate(const ReservoirSpec& res, const ModulationSpec& mod, int n) {
  res.validate();
  if (mod.shape() == ModulationShape::None) {
    return n == 0 ? res.static_rate() : 0.0;
  }
  require_zero_mean(mod, "sideband_rate");
  const double w = mod.omega_mod();
  const double period = mod.period();
  const double g2 = res.gamma * res.gamma;
  const double amp = std::sqrt(res.weight * res.weight * res.gamma / pi);
  auto sample = [&](double t, std::vector<std::complex<double>>& buf) {
    const double shift = n * w + modulation_value(mod, t);
    const double coupling = amp / std::sqrt(g2 + shift * shift);
    const double phase = n * w * t + accumulated_phase(mod, t);
    buf[0] = std::polar(coupling, -phase);
  };
  const double scale = period * amp / res.gamma;
  const auto integral =
      periodic_trapezoid(sample, 1, period, rate_quadrature(1e-10, 1e-14 * scale));
  return w * w / (2.0 * pi) * std::norm(integral[0]);
}

double bessel_sum_rate(const ReservoirSpec& res, double depth, double omega_mod,
                       int n) {
  res.validate();
  if (!(omega_mod > 0.0)) {
    throw std::invalid_argument("bessel_sum_rate: omega_mod must be > 0");
  }
  const double x = depth / omega_mod;
  // J_m(x) falls below 1e-17 within roughly 6 x^(1/3) + 20 orders past x.
  const int m_max = static_cast<int>(std::ceil(x + 6.0 * std::cbrt(x))) + 20;
  const auto count = static_cast<std::size_t>(2 * m_max + 1);
  const double period = 2.0 * pi / omega_mod;
  const double g2 = res.gamma * res.gamma;
  auto sample = [&](double t, std::vector<std::complex<double>>& buf) {
    const double shift = n * omega_mod + depth * std::sin(omega_mod * t);
    const double env = 1.0 / std::sqrt(g2 + shift * shift);
    for (int m = -m_max; m <= m_max; ++m) {
      buf[static_cast<std::size_t>(m + m_max)] =
          std::polar(env, -(n - m) * omega_mod * t);
    }
  };
  const double scale = period / res.gamma;
  const auto integrals =
      periodic_trapezoid(sample, count, period, rate_quadrature(1e-12, 1e-15 * scale));
  // i^m J_m(x), accumulated in ascending m.
  std::complex<double> sum{};
  const std::complex<double> unit_powers[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  for (int m = -m_max; m <= m_max; ++m) {
    const auto ip = unit_powers[((m % 4) + 4) % 4];
    sum += ip * bessel_j<double>(m, x) * integrals[static_cast<std::size_t>(m + m_max)];
  }
  const double D2 = res.weight * res.weight;
  return D2 * omega_mod * omega_mod * res.gamma / (2.0 * pi * pi) * std::norm(sum);
}

int default_rate_order(const ModulationSpec& mod) {
  if (mod.shape() == ModulationShape::None) return 0;
  return static_cast<int>(std::ceil(mod.depth() / mod.omega_mod())) + 12;
}

RateBreakdown total_rate(const ReservoirSpec& res, const ModulationSpec& mod,
                         std::optional<int> n_max,
                         const ValidityThresholds& thresholds) {
  RateBreakdown out;
  out.method = RateMethod::Quadrature;
  out.n_max = n_max.value_or(default_rate_order(mod));
  if (out.n_max < 0) throw std::invalid_argument("total_rate: n_max must be >= 0");
  for (int n = -out.n_max; n <= out.n_max; ++n) {
    out.gamma_n[n] = sideband_rate(res, mod, n);
  }
  for (const auto& [n, rate] : out.gamma_n) out.gamma_total += rate;
  out.validity = markov_validity(res, mod, thresholds);
  return out;
}

double ultrafast_rate(const ReservoirSpec& res, double depth, double omega_mod) {
  res.validate();
  const double g2 = res.gamma * res.gamma;
  const double d2 = depth * depth;
  const double j0 = depth == 0.0 ? 1.0 : bessel_j<double>(0, depth / omega_mod);
  const double k = elliptic_k<double>(d2 / (g2 + d2));
  const double bracket = 2.0 * res.gamma * j0 * k;
  return res.static_rate() * bracket * bracket / (pi * pi * (g2 + d2));
}

DetuningRates detuning_rates(const ReservoirSpec& res, double depth,
                             double omega_mod, int n_max) {
  res.validate();
  DetuningRates out;
  const double x = depth == 0.0 ? 0.0 : depth / omega_mod;
  const double g2 = res.gamma * res.gamma;
  for (int n = -n_max; n <= n_max; ++n) {
    const double j = bessel_j<double>(n, x);
    const double nw = n * omega_mod;
    out.gamma_n_prime[n] = res.static_rate() * j * j * g2 / (g2 + nw * nw);
  }
  for (const auto& [n, rate] : out.gamma_n_prime) out.gamma_total_prime += rate;
  return out;
}

double detuning_ultrafast_rate(const ReservoirSpec& res, double depth,
                               double omega_mod) {
  const double j0 = depth == 0.0 ? 1.0 : bessel_j<double>(0, depth / omega_mod);
  return res.static_rate() * j0 * j0;
}

double suppression_ratio(double x) {
  if (!(x >= 0.0)) throw std::invalid_argument("suppression_ratio: x must be >= 0");
  const double x2 = x * x;
  const double k = elliptic_k<double>(x2 / (1.0 + x2));
  return 4.0 * k * k / (pi * pi * (1.0 + x2));
}

Validity markov_validity(const ReservoirSpec& res, const ModulationSpec& mod,
                         const ValidityThresholds& thresholds) {
  const bool weak = res.weight <= thresholds.weak_coupling_ratio * res.gamma;
  const double sweep = mod.shape() == ModulationShape::None
                           ? 0.0
                           : mod.depth() * mod.omega_mod();
  const double scale = std::max(res.gamma * res.gamma, res.weight * res.weight);
  const bool fast = sweep >= thresholds.fast_modulation_factor * scale;
  if (weak && fast) return Validity::Both;
  if (weak) return Validity::WeakCoupling;
  if (fast) return Validity::FastModulation;
  return Validity::Invalid;
}

std::complex<double> memory_kernel(const ReservoirSpec& res,
                                   const ModulationSpec& mod, double t,
                                   double t_prime) {
  res.validate();
  if (t < t_prime) throw std::invalid_argument("memory_kernel: requires t >= t'");
  const double tau = t - t_prime;
  const double a = modulation_value(mod, t);
  const double b = modulation_value(mod, t_prime);
  const double c = 0.5 * (a + b);
  const double g = res.gamma;
  const double g2 = g * g;

  // Fourier transform of the reference Lorentzian 1 / (gamma^2 + (delta + c)^2).
  std::complex<double> integral =
      std::polar(pi / g * std::exp(-g * tau), tau * c);

  if (a != b) {
    auto remainder = [&](double delta) {
      const double ua = delta + a;
      const double ub = delta + b;
      const double uc = delta + c;
      const double product = std::sqrt((g2 + ua * ua) * (g2 + ub * ub));
      const double diff = 1.0 / product - 1.0 / (g2 + uc * uc);
      return std::polar(diff, -delta * tau);
    };
    const double half = 1000.0 * g + std::abs(a) + std::abs(b);
    integral += integrate_adaptive(remainder, -half, half, 1e-10 * pi / g, 256);
  }
  const double drift = phase_integral(mod, t_prime, t);
  return res.weight * res.weight * g / pi * integral * std::polar(1.0, -drift);
}

}  // namespace dynres
