#include "dynres/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "dynres/phase.hpp"
#include "dynres/quadrature.hpp"

namespace dynres {

double Spectrum::integrate(double lo, double hi) const {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < freqs.size(); ++i) {
    if (freqs(i) >= lo && freqs(i) < hi) sum += weights(i) * values(i);
  }
  return sum;
}

double PeakTable::weight_sum() const {
  double sum = 0.0;
  for (const auto& r : rows) sum += r.weight;
  return sum;
}

const PeakRow* PeakTable::find(int n) const {
  for (const auto& r : rows) {
    if (r.n == n) return &r;
  }
  return nullptr;
}

Spectrum occupation_spectrum(const SimResult& result, const DiscreteBath& bath) {
  if (static_cast<std::size_t>(result.final_ck.size()) != bath.size()) {
    throw std::invalid_argument("occupation_spectrum: result does not match bath");
  }
  Spectrum s;
  s.freqs = bath.detunings();
  s.values = result.final_ck.array().abs2() * bath.density();
  s.weights = Eigen::ArrayXd::Constant(s.freqs.size(), bath.spacing());
  s.total = (s.weights * s.values).sum();
  s.residual_population = std::norm(result.c_a(result.c_a.size() - 1));
  s.incomplete_decay = s.residual_population > 1e-2;
  return s;
}

PeakTable peak_weights(const Spectrum& spec, double omega_mod, int n_min,
                       int n_max, double fit_window) {
  if (!(omega_mod > 0.0)) throw std::invalid_argument("peak_weights: omega_mod must be > 0");
  if (n_min > n_max) throw std::invalid_argument("peak_weights: empty n range");
  if (spec.freqs.size() >= 2) {
    const double step = (spec.freqs(spec.freqs.size() - 1) - spec.freqs(0)) /
                        static_cast<double>(spec.freqs.size() - 1);
    if (omega_mod / step < 100.0 * (1.0 - 1e-9)) {
      throw std::invalid_argument("peak_weights: Omega must span >= 100 grid spacings");
    }
  }
  if (fit_window <= 0.0) fit_window = 0.25 * omega_mod;

  PeakTable table;
  for (int n = n_min; n <= n_max; ++n) {
    PeakRow row;
    row.n = n;
    row.center = n * omega_mod;
    row.weight = spec.integrate((n - 0.5) * omega_mod, (n + 0.5) * omega_mod);
    row.half_width = std::numeric_limits<double>::quiet_NaN();
    try {
      const LorentzianFit fit = fit_lorentzian(spec, row.center, fit_window);
      if (fit.converged) row.half_width = fit.half_width;
    } catch (const std::invalid_argument&) {
      // too few samples or no peak in this bin
    }
    table.rows.push_back(row);
  }
  table.out_of_bin_mass = spec.total - table.weight_sum();
  return table;
}

Spectrum analytic_spectrum(const ReservoirSpec& res, const ModulationSpec& mod,
                           const Eigen::ArrayXd& freq_grid, double gamma_total,
                           int threads) {
  res.validate();
  if (!(gamma_total > 0.0)) {
    throw std::invalid_argument("analytic_spectrum: gamma_total must be > 0");
  }
  const double g2 = res.gamma * res.gamma;
  const double prefactor = res.weight * res.weight * res.gamma / std::numbers::pi;
  const double horizon = 40.0 / gamma_total;
  const double half_rate = 0.5 * gamma_total;

  Spectrum s;
  s.freqs = freq_grid;
  s.values.resize(freq_grid.size());

  if (mod.shape() == ModulationShape::None) {
    const double trunc = 1.0 - std::exp(-half_rate * horizon);
    for (Eigen::Index i = 0; i < freq_grid.size(); ++i) {
      const double x = freq_grid(i);
      s.values(i) = prefactor * trunc * trunc / (g2 + x * x) /
                    (x * x + half_rate * half_rate);
    }
  } else {
    require_zero_mean(mod, "analytic_spectrum");
    const double period = mod.period();
    const auto periods = static_cast<long>(std::ceil(horizon / period));
    const double envelope_scale = period / res.gamma;
    // |z^J| is independent of the detuning.
    if (std::exp(-half_rate * period * static_cast<double>(periods)) > 1e-8) {
      throw ConvergenceError("analytic_spectrum: time integral tail above 1e-8");
    }
#pragma omp parallel for schedule(static) num_threads(std::max(threads, 1)) if (threads > 1)
    for (Eigen::Index i = 0; i < freq_grid.size(); ++i) {
      const double x = freq_grid(i);
      const std::complex<double> rate{-half_rate, x};
      // One period of the integrand; later periods repeat it up to the
      // factor z = exp((i x - Gamma/2) P) per period.
      auto integrand = [&](double t) {
        const double shift = x + modulation_value(mod, t);
        return std::exp(rate * t) * std::polar(1.0, accumulated_phase(mod, t)) /
               std::sqrt(g2 + shift * shift);
      };
      const std::complex<double> one_period =
          integrate_adaptive(integrand, 0.0, period, 1e-12 * envelope_scale, 8);
      const std::complex<double> z = std::exp(rate * period);
      const std::complex<double> zj = std::pow(z, static_cast<double>(periods));
      const std::complex<double> total = one_period * (1.0 - zj) / (1.0 - z);
      s.values(i) = prefactor * std::norm(total);
    }
  }

  // Trapezoid weights on the supplied grid.
  const Eigen::Index n = freq_grid.size();
  s.weights = Eigen::ArrayXd::Zero(n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const double h = 0.5 * (freq_grid(i + 1) - freq_grid(i));
    s.weights(i) += h;
    s.weights(i + 1) += h;
  }
  s.total = (s.weights * s.values).sum();
  return s;
}

LorentzianFit fit_lorentzian(const Spectrum& spec, double center, double window) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (Eigen::Index i = 0; i < spec.freqs.size(); ++i) {
    if (std::abs(spec.freqs(i) - center) <= window) {
      xs.push_back(spec.freqs(i));
      ys.push_back(spec.values(i));
    }
  }
  if (xs.size() < 5) throw std::invalid_argument("fit_lorentzian: fewer than 5 samples");
  const auto m = static_cast<Eigen::Index>(xs.size());
  const Eigen::Map<const Eigen::ArrayXd> x(xs.data(), m);
  const Eigen::Map<const Eigen::ArrayXd> y(ys.data(), m);

  Eigen::Index peak = 0;
  const double y_max = y.maxCoeff(&peak);
  if (!(y_max > 0.0)) throw std::invalid_argument("fit_lorentzian: no peak in window");

  // Starting half-width from the half-maximum crossings.
  Eigen::Index lo = peak;
  Eigen::Index hi = peak;
  while (lo > 0 && y(lo) > 0.5 * y_max) --lo;
  while (hi + 1 < m && y(hi) > 0.5 * y_max) ++hi;
  double w = 0.5 * (x(hi) - x(lo));
  if (!(w > 0.0)) w = window / 10.0;
  Eigen::Vector3d p(y_max * w * w, x(peak), w);  // A, c, w

  auto residuals = [&](const Eigen::Vector3d& q) {
    return (q(0) / ((x - q(1)).square() + q(2) * q(2)) - y).eval();
  };

  LorentzianFit fit;
  double lambda = 1e-3;
  Eigen::ArrayXd r = residuals(p);
  double cost = r.square().sum();
  for (int it = 0; it < 200; ++it) {
    fit.iterations = it + 1;
    const Eigen::ArrayXd den = (x - p(1)).square() + p(2) * p(2);
    Eigen::MatrixX3d jac(m, 3);
    jac.col(0) = (1.0 / den).matrix();
    jac.col(1) = (2.0 * p(0) * (x - p(1)) / den.square()).matrix();
    jac.col(2) = (-2.0 * p(0) * p(2) / den.square()).matrix();
    const Eigen::Matrix3d jtj = jac.transpose() * jac;
    const Eigen::Vector3d jtr = jac.transpose() * r.matrix();
    bool improved = false;
    for (int tries = 0; tries < 30 && !improved; ++tries) {
      Eigen::Matrix3d damped = jtj;
      damped.diagonal() *= (1.0 + lambda);
      const Eigen::Vector3d delta = damped.ldlt().solve(-jtr);
      const Eigen::Vector3d trial = p + delta;
      const Eigen::ArrayXd r_trial = residuals(trial);
      const double c_trial = r_trial.square().sum();
      if (std::isfinite(c_trial) && c_trial <= cost) {
        // The centre moves on the scale of the width, not of its own value.
        const double width = std::abs(p(2));
        const double step = std::max({std::abs(delta(0) / p(0)), std::abs(delta(1)) / width,
                                      std::abs(delta(2)) / width});
        p = trial;
        r = r_trial;
        cost = c_trial;
        lambda = std::max(lambda * 0.1, 1e-12);
        improved = true;
        if (step < 1e-13) fit.converged = true;
      } else {
        lambda *= 10.0;
      }
    }
    if (!improved) {
      // No descent direction left: at a minimum to working precision.
      fit.converged = true;
    }
    if (fit.converged) break;
  }
  fit.center = p(1);
  fit.half_width = std::abs(p(2));
  fit.height = p(0) / (p(2) * p(2));
  fit.residual = std::sqrt(cost / static_cast<double>(m)) / y_max;
  fit.flagged = !fit.converged || fit.residual > kLorentzianResidualLimit;
  return fit;
}

}  // namespace dynres
