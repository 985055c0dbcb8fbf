#pragma once

// Subcommand implementations behind the dynres executable. Each writes its
// CSV and JSON files into the output directory and returns an exit code.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "dynres/config.hpp"
#include "dynres/fitting.hpp"
#include "dynres/spectrum.hpp"

namespace dynres {

struct SimulationOutcome {
  DiscreteBath bath;
  SimResult result;
  std::optional<DecayFit> fit;
  std::string fit_error;  // set when the decay fit was rejected
  Spectrum spectrum;
  std::optional<PeakTable> peaks;  // modulated runs only
  RateBreakdown rates;             // analytic reference for this config
};

/// Analytic rate of the configured bath: the sideband sum for the
/// Lorentzian envelope, 2 pi rho g^2 for the flat one.
RateBreakdown analytic_rate(const RunConfig& cfg);

/// Propagation, decay fit, final spectrum and peak table for one config.
SimulationOutcome run_simulation(const RunConfig& cfg);

/// Full-precision scientific notation used in every CSV file.
std::string format_number(double v);

int cmd_simulate(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& log);
int cmd_rates(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& log);
int cmd_sweep(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& log);

}  // namespace dynres
