#pragma once

#include <cstddef>
#include <optional>
#include <span>

namespace dynres {

struct FitWindow {
  double t_start = 0.0;
  double t_end = 0.0;
};

struct DecayFit {
  double rate = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;  // of ln(population)
  FitWindow window;
  std::size_t points = 0;
};

/// Least-squares line through ln(population) on the window; rate = -slope.
///
/// Without an explicit window the fit starts three modulation periods in
/// (or, unmodulated, once the population has fallen to 0.9) and ends where
/// the population reaches 1e-3 or the series ends. A window shorter than
/// five modulation periods is rejected.
DecayFit fit_decay_rate(std::span<const double> times,
                        std::span<const double> population,
                        std::optional<FitWindow> window = std::nullopt,
                        std::optional<double> modulation_period = std::nullopt);

}  // namespace dynres
