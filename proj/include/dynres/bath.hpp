#pragma once

// Atom-reservoir domain types and the discretised bath with a static
// Lorentzian envelope and time-dependent couplings.

#include <cstddef>

#include <Eigen/Dense>

#include "dynres/modulation.hpp"

namespace dynres {

/// Lorentzian reservoir structure: rho g^2 = (D^2 gamma / pi) / (gamma^2 + delta^2).
struct ReservoirSpec {
  double omega0 = 1.0;  // atomic transition, spectral origin only
  double gamma = 1.0;   // Lorentzian half-width
  double weight = 1.0;  // D, with sum_k g_k^2 = D^2

  void validate() const;
  /// Static golden-rule rate 2 D^2 / gamma.
  double static_rate() const { return 2.0 * weight * weight / gamma; }
  /// Lorentzian structure function at detuning delta.
  double structure(double delta) const;
};

struct GridSpec {
  double half_window = 0.0;  // W: initial detunings span [-W, W]
  double spacing = 0.0;      // mode spacing

  void validate() const;
  /// Modes per side of the centre, floor(W / spacing).
  std::size_t modes_per_side() const;
  std::size_t mode_count() const { return 2 * modes_per_side() + 1; }
};

/// Spacing gamma/100 and W = d + 10 gamma + 3 Omega ceil(d / Omega).
GridSpec default_grid(const ReservoirSpec& reservoir,
                      const ModulationSpec& modulation);

enum class Envelope {
  Lorentzian,
  /// Structureless reservoir, rho g^2 constant; reference case for the
  /// modulation-invariance check of the golden rule.
  Flat,
};

class DiscreteBath {
 public:
  const ReservoirSpec& reservoir() const { return reservoir_; }
  const ModulationSpec& modulation() const { return modulation_; }
  const GridSpec& grid() const { return grid_; }
  Envelope envelope() const { return envelope_; }
  /// rho g^2 of the flat envelope (zero for the Lorentzian one).
  double flat_level() const { return flat_level_; }

  std::size_t size() const { return static_cast<std::size_t>(detunings_.size()); }
  /// omega_k(0) - omega0, strictly increasing and uniformly spaced.
  const Eigen::ArrayXd& detunings() const { return detunings_; }
  /// omega_k(0) in absolute units.
  Eigen::ArrayXd initial_freqs() const { return detunings_ + reservoir_.omega0; }
  double spacing() const { return grid_.spacing; }
  double density() const { return 1.0 / grid_.spacing; }
  /// Revival time 2 pi / spacing of the uniformly discretised bath.
  double recurrence_time() const;
  /// Largest |omega_k(t) - omega0| reachable on the grid.
  double max_rotating_frequency() const;

  /// Couplings of every mode at time t.
  Eigen::ArrayXd couplings(double t) const;
  /// Couplings for a given instantaneous frequency shift f(t).
  Eigen::ArrayXd couplings_for_shift(double shift) const;
  /// g_k = amplitude / sqrt(gamma^2 + x^2) for the Lorentzian, amplitude for flat.
  double coupling_amplitude() const { return amplitude_; }

 private:
  friend DiscreteBath build_bath(const ReservoirSpec&, const ModulationSpec&,
                                 const GridSpec&);
  friend DiscreteBath build_flat_bath(double, const ModulationSpec&,
                                      const GridSpec&, double);

  ReservoirSpec reservoir_;
  ModulationSpec modulation_;
  GridSpec grid_;
  Envelope envelope_ = Envelope::Lorentzian;
  double flat_level_ = 0.0;
  double amplitude_ = 0.0;
  Eigen::ArrayXd detunings_;
};

/// Builds the Lorentzian bath. Rejects a window narrower than
/// depth + 10 gamma and a spacing that does not resolve gamma.
DiscreteBath build_bath(const ReservoirSpec& reservoir,
                        const ModulationSpec& modulation, const GridSpec& grid);

/// Flat bath with rho g^2 = level for every mode at all times.
DiscreteBath build_flat_bath(double level, const ModulationSpec& modulation,
                             const GridSpec& grid, double omega0 = 1.0);

/// g_k(t); throws std::out_of_range for k outside the grid.
double coupling_at(const DiscreteBath& bath, std::size_t k, double t);

}  // namespace dynres
