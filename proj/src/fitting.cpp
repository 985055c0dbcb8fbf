#include "dynres/fitting.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dynres {

DecayFit fit_decay_rate(std::span<const double> times,
                        std::span<const double> population,
                        std::optional<FitWindow> window,
                        std::optional<double> modulation_period) {
  if (times.size() != population.size() || times.size() < 3) {
    throw std::invalid_argument("fit_decay_rate: need >= 3 matching samples");
  }
  FitWindow w;
  if (window) {
    w = *window;
  } else {
    if (modulation_period && *modulation_period > 0.0) {
      w.t_start = times.front() + 3.0 * *modulation_period;
    } else {
      w.t_start = times.back();
      for (std::size_t i = 0; i < times.size(); ++i) {
        if (population[i] <= 0.9) {
          w.t_start = times[i];
          break;
        }
      }
    }
    w.t_end = times.back();
    for (std::size_t i = 0; i < times.size(); ++i) {
      if (times[i] >= w.t_start && population[i] <= 1e-3) {
        w.t_end = times[i];
        break;
      }
    }
  }
  if (modulation_period && *modulation_period > 0.0 &&
      w.t_end - w.t_start < 5.0 * *modulation_period) {
    throw std::invalid_argument(
        "fit_decay_rate: window shorter than 5 modulation periods");
  }

  std::size_t n = 0;
  double st = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < w.t_start || times[i] > w.t_end) continue;
    if (!(population[i] > 0.0)) {
      throw std::invalid_argument("fit_decay_rate: non-positive population at t = " +
                                  std::to_string(times[i]));
    }
    ++n;
    st += times[i];
    sy += std::log(population[i]);
  }
  if (n < 3) throw std::invalid_argument("fit_decay_rate: fewer than 3 points in window");
  // Centred normal equations.
  const double mt = st / static_cast<double>(n);
  const double my = sy / static_cast<double>(n);
  double stt = 0.0, sty = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < w.t_start || times[i] > w.t_end) continue;
    const double dt = times[i] - mt;
    stt += dt * dt;
    sty += dt * (std::log(population[i]) - my);
  }
  if (!(stt > 0.0)) throw std::invalid_argument("fit_decay_rate: degenerate window");
  const double slope = sty / stt;
  DecayFit fit;
  fit.rate = -slope;
  fit.intercept = my - slope * mt;
  fit.window = w;
  fit.points = n;
  double ss = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < w.t_start || times[i] > w.t_end) continue;
    const double r = std::log(population[i]) - (fit.intercept + slope * times[i]);
    ss += r * r;
  }
  fit.rms_residual = std::sqrt(ss / static_cast<double>(n));
  return fit;
}

}  // namespace dynres
