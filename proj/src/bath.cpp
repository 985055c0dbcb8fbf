#include "dynres/bath.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "dynres/phase.hpp"

namespace dynres {

void ReservoirSpec::validate() const {
  if (!(gamma > 0.0)) throw std::invalid_argument("reservoir: gamma must be > 0");
  if (!(weight > 0.0)) throw std::invalid_argument("reservoir: weight must be > 0");
  if (!(omega0 > 0.0)) throw std::invalid_argument("reservoir: omega0 must be > 0");
}

double ReservoirSpec::structure(double delta) const {
  return weight * weight * gamma / std::numbers::pi / (gamma * gamma + delta * delta);
}

void GridSpec::validate() const {
  if (!(spacing > 0.0)) throw std::invalid_argument("grid: spacing must be > 0");
  if (!(half_window >= spacing)) {
    throw std::invalid_argument("grid: half_window must be >= spacing");
  }
}

std::size_t GridSpec::modes_per_side() const {
  // Guard against W / spacing landing a hair below an integer.
  return static_cast<std::size_t>(std::floor(half_window / spacing + 1e-9));
}

GridSpec default_grid(const ReservoirSpec& reservoir,
                      const ModulationSpec& modulation) {
  GridSpec grid;
  grid.spacing = reservoir.gamma / 100.0;
  const double d = modulation.depth();
  double sidebands = 0.0;
  if (modulation.shape() != ModulationShape::None && d > 0.0) {
    const double w = modulation.omega_mod();
    sidebands = 3.0 * w * std::ceil(d / w);
  }
  grid.half_window = d + 10.0 * reservoir.gamma + sidebands;
  return grid;
}

double DiscreteBath::recurrence_time() const {
  return 2.0 * std::numbers::pi / grid_.spacing;
}

double DiscreteBath::max_rotating_frequency() const {
  return detunings_.abs().maxCoeff() + modulation_.depth();
}

Eigen::ArrayXd DiscreteBath::couplings_for_shift(double shift) const {
  if (envelope_ == Envelope::Flat) {
    return Eigen::ArrayXd::Constant(detunings_.size(), amplitude_);
  }
  const double g2 = reservoir_.gamma * reservoir_.gamma;
  return amplitude_ / ((detunings_ + shift).square() + g2).sqrt();
}

Eigen::ArrayXd DiscreteBath::couplings(double t) const {
  return couplings_for_shift(modulation_value(modulation_, t));
}

namespace {

Eigen::ArrayXd uniform_detunings(const GridSpec& grid) {
  const auto side = static_cast<Eigen::Index>(grid.modes_per_side());
  Eigen::ArrayXd out(2 * side + 1);
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    out(i) = static_cast<double>(i - side) * grid.spacing;
  }
  return out;
}

}  // namespace

DiscreteBath build_bath(const ReservoirSpec& reservoir,
                        const ModulationSpec& modulation, const GridSpec& grid) {
  reservoir.validate();
  grid.validate();
  if (!(grid.spacing < reservoir.gamma)) {
    throw std::invalid_argument(
        "grid: spacing must be < gamma (Lorentzian envelope unresolved)");
  }
  const double margin = modulation.depth() + 10.0 * reservoir.gamma;
  if (grid.half_window < margin) {
    throw std::invalid_argument(
        "grid: half_window " + std::to_string(grid.half_window) +
        " < depth + 10 gamma = " + std::to_string(margin) +
        " (resonance would sweep off the grid)");
  }
  DiscreteBath bath;
  bath.reservoir_ = reservoir;
  bath.modulation_ = modulation;
  bath.grid_ = grid;
  bath.envelope_ = Envelope::Lorentzian;
  bath.amplitude_ = std::sqrt(reservoir.weight * reservoir.weight *
                              reservoir.gamma * grid.spacing / std::numbers::pi);
  bath.detunings_ = uniform_detunings(grid);
  return bath;
}

DiscreteBath build_flat_bath(double level, const ModulationSpec& modulation,
                             const GridSpec& grid, double omega0) {
  grid.validate();
  if (!(level > 0.0)) throw std::invalid_argument("flat bath: level must be > 0");
  if (!(grid.half_window > modulation.depth())) {
    throw std::invalid_argument("flat bath: half_window must exceed the depth");
  }
  DiscreteBath bath;
  bath.reservoir_ = ReservoirSpec{omega0, 1.0, std::sqrt(level)};
  bath.modulation_ = modulation;
  bath.grid_ = grid;
  bath.envelope_ = Envelope::Flat;
  bath.flat_level_ = level;
  bath.amplitude_ = std::sqrt(level * grid.spacing);
  bath.detunings_ = uniform_detunings(grid);
  return bath;
}

double coupling_at(const DiscreteBath& bath, std::size_t k, double t) {
  if (k >= bath.size()) {
    throw std::out_of_range("coupling_at: mode index " + std::to_string(k) +
                            " out of range");
  }
  if (bath.envelope() == Envelope::Flat) return bath.coupling_amplitude();
  const double g = bath.reservoir().gamma;
  const double x = bath.detunings()(static_cast<Eigen::Index>(k)) +
                   modulation_value(bath.modulation(), t);
  return bath.coupling_amplitude() / std::sqrt(g * g + x * x);
}

}  // namespace dynres
