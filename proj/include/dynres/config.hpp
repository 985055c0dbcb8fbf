#pragma once

// Run configuration for the command-line tool: a JSON document with one
// section per domain module, dotted-path overrides and the sweep section.
// Frequencies are in units of gamma; gamma itself is fixed at 1.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dynres/bath.hpp"
#include "dynres/modulation.hpp"
#include "dynres/propagator.hpp"
#include "dynres/rates.hpp"

namespace dynres {

/// Invalid configuration; the CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SimSection {
  double t_final = 0.0;
  std::optional<double> dt;
  std::optional<std::size_t> store_stride;
  std::size_t stored_points = 4000;
  int threads = 1;
};

struct FitSection {
  std::optional<double> t_start;
  std::optional<double> t_end;
};

struct SpectrumSection {
  std::optional<int> n_min;
  std::optional<int> n_max;
  double fit_window = 0.0;  // 0: a quarter of Omega
  bool analytic = false;    // add the Markovian spectrum as a column
};

struct SweepSection {
  std::string parameter;  // dotted path of a numeric leaf, e.g. modulation.depth
  double start = 0.0;
  double stop = 0.0;
  int count = 0;
  bool simulate = false;
  bool peaks = false;  // S_n columns (requires simulate)

  std::vector<double> values() const;
};

struct RunConfig {
  ReservoirSpec reservoir;
  Envelope envelope = Envelope::Lorentzian;
  double flat_level = 0.0;
  ModulationSpec modulation;
  GridSpec grid;  // filled from default_grid when the section omits it
  bool grid_is_default = true;
  SimSection sim;
  FitSection fit;
  std::optional<int> rate_order;
  ValidityThresholds thresholds;
  SpectrumSection spectrum;
  std::optional<SweepSection> sweep;
  std::string output_dir = "out";
  int workers = 1;

  nlohmann::json source;  // the document after overrides

  DiscreteBath make_bath() const;
  SimConfig make_sim(const DiscreteBath& bath) const;
  /// Sideband range for peaks and S_n columns.
  std::pair<int, int> peak_range() const;
};

/// Applies "a.b.c=value" to the document. The value is parsed as JSON and
/// falls back to a plain string.
void apply_override(nlohmann::json& doc, const std::string& assignment);

/// Parses and validates; every module-level invariant is checked here, so a
/// returned config can be run. Throws ConfigError.
RunConfig parse_config(const nlohmann::json& doc);

RunConfig load_config(const std::string& path,
                      const std::vector<std::string>& overrides = {});

/// Copy of `doc` with the dotted numeric leaf set to `value`.
nlohmann::json with_parameter(const nlohmann::json& doc, const std::string& path,
                              double value);

}  // namespace dynres
