#include "dynres/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

namespace dynres {

using nlohmann::json;

namespace {

void check_keys(const json& section, const std::string& name,
                const std::set<std::string>& allowed) {
  if (!section.is_object()) throw ConfigError(name + ": expected an object");
  for (const auto& [key, value] : section.items()) {
    if (!allowed.count(key)) throw ConfigError(name + ": unknown key '" + key + "'");
  }
}

template <class T>
std::optional<T> get_opt(const json& section, const std::string& name,
                         const std::string& key) {
  auto it = section.find(key);
  if (it == section.end() || it->is_null()) return std::nullopt;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(name + "." + key + ": wrong type");
  }
}

template <class T>
T get_or(const json& section, const std::string& name, const std::string& key,
         T fallback) {
  return get_opt<T>(section, name, key).value_or(fallback);
}

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::size_t begin = 0;
  while (true) {
    const std::size_t dot = path.find('.', begin);
    parts.push_back(path.substr(begin, dot - begin));
    if (dot == std::string::npos) break;
    begin = dot + 1;
  }
  for (const auto& p : parts) {
    if (p.empty()) throw ConfigError("malformed path '" + path + "'");
  }
  return parts;
}

const std::set<std::string> kSweepable = {
    "reservoir.omega0",    "reservoir.weight",  "reservoir.flat_level",
    "modulation.depth",    "modulation.omega_mod", "grid.half_window",
    "grid.spacing",        "sim.t_final",       "sim.dt",
};

ModulationSpec parse_modulation(const json& m) {
  check_keys(m, "modulation", {"shape", "depth", "omega_mod", "table"});
  const auto shape = get_or<std::string>(m, "modulation", "shape", "none");
  if (shape == "none") {
    if (get_or<double>(m, "modulation", "depth", 0.0) != 0.0) {
      throw ConfigError("modulation: shape none requires depth 0");
    }
    return ModulationSpec::none();
  }
  const auto omega = get_opt<double>(m, "modulation", "omega_mod");
  if (!omega) throw ConfigError("modulation.omega_mod: required for shape " + shape);
  if (shape == "sinusoid") {
    const auto depth = get_opt<double>(m, "modulation", "depth");
    if (!depth) throw ConfigError("modulation.depth: required for shape sinusoid");
    return ModulationSpec::sinusoid(*depth, *omega);
  }
  if (shape == "tabulated") {
    const auto rows = get_opt<std::vector<std::pair<double, double>>>(m, "modulation", "table");
    if (!rows) throw ConfigError("modulation.table: required for shape tabulated");
    ModulationSpec spec = ModulationSpec::tabulated(*omega, *rows);
    if (const auto depth = get_opt<double>(m, "modulation", "depth")) {
      spec = spec.with_depth(*depth);
    }
    return spec;
  }
  throw ConfigError("modulation.shape: unknown shape '" + shape + "'");
}

}  // namespace

std::vector<double> SweepSection::values() const {
  std::vector<double> out(static_cast<std::size_t>(count));
  const double lo = std::min(start, stop);
  const double hi = std::max(start, stop);
  for (int i = 0; i < count; ++i) {
    out[static_cast<std::size_t>(i)] =
        i == count - 1 ? hi : lo + (hi - lo) * i / static_cast<double>(count - 1);
  }
  return out;
}

DiscreteBath RunConfig::make_bath() const {
  if (envelope == Envelope::Flat) {
    return build_flat_bath(flat_level, modulation, grid, reservoir.omega0);
  }
  return build_bath(reservoir, modulation, grid);
}

SimConfig RunConfig::make_sim(const DiscreteBath& bath) const {
  if (!(sim.t_final > 0.0)) throw ConfigError("sim.t_final: required and > 0");
  SimConfig cfg = default_sim_config(bath, sim.t_final, sim.stored_points);
  if (sim.dt) {
    cfg.dt = *sim.dt;
    const auto steps = static_cast<std::size_t>(std::ceil(cfg.t_final / cfg.dt));
    cfg.store_stride =
        std::max<std::size_t>(1, steps / std::max<std::size_t>(sim.stored_points, 1));
  }
  if (sim.store_stride) cfg.store_stride = *sim.store_stride;
  cfg.threads = sim.threads;
  cfg.validate(bath);
  return cfg;
}

std::pair<int, int> RunConfig::peak_range() const {
  if (modulation.shape() == ModulationShape::None) return {0, 0};
  const double omega = modulation.omega_mod();
  const int reach = static_cast<int>(std::ceil(modulation.depth() / omega)) + 2;
  // Keep every bin inside the grid.
  const int fit = static_cast<int>(std::floor(grid.half_window / omega - 0.5));
  const int lo = spectrum.n_min.value_or(-std::min(reach, fit));
  const int hi = spectrum.n_max.value_or(std::min(reach, fit));
  return {lo, hi};
}

void apply_override(json& doc, const std::string& assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("--set expects key=value, got '" + assignment + "'");
  }
  const auto parts = split_path(assignment.substr(0, eq));
  const std::string text = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error&) {
    value = text;
  }
  json* node = &doc;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    json& next = (*node)[parts[i]];
    if (next.is_null()) next = json::object();
    if (!next.is_object()) {
      throw ConfigError("--set: '" + parts[i] + "' is not a section");
    }
    node = &next;
  }
  (*node)[parts.back()] = value;
}

json with_parameter(const json& doc, const std::string& path, double value) {
  json out = doc;
  json* node = &out;
  for (const auto& p : split_path(path)) {
    if (!node->is_object() || !node->contains(p)) {
      throw ConfigError("sweep.parameter: '" + path + "' is not set in the config");
    }
    node = &(*node)[p];
  }
  if (!node->is_number()) throw ConfigError("sweep.parameter: '" + path + "' is not numeric");
  *node = value;
  return out;
}

RunConfig parse_config(const json& doc) {
  RunConfig cfg;
  cfg.source = doc;
  try {
    check_keys(doc, "config", {"reservoir", "modulation", "grid", "sim", "fit", "rates",
                               "spectrum", "sweep", "output_dir", "workers"});

    const json res = doc.value("reservoir", json::object());
    check_keys(res, "reservoir", {"omega0", "gamma", "weight", "envelope", "flat_level"});
    if (get_or<double>(res, "reservoir", "gamma", 1.0) != 1.0) {
      throw ConfigError("reservoir.gamma: frequencies are in units of gamma, so gamma must be 1");
    }
    cfg.reservoir.omega0 = get_or<double>(res, "reservoir", "omega0", 1000.0);
    cfg.reservoir.weight = get_or<double>(res, "reservoir", "weight", 1.0);
    cfg.reservoir.validate();
    const auto env = get_or<std::string>(res, "reservoir", "envelope", "lorentzian");
    if (env == "flat") {
      cfg.envelope = Envelope::Flat;
      const auto level = get_opt<double>(res, "reservoir", "flat_level");
      if (!level) throw ConfigError("reservoir.flat_level: required for envelope flat");
      cfg.flat_level = *level;
    } else if (env != "lorentzian") {
      throw ConfigError("reservoir.envelope: unknown envelope '" + env + "'");
    }

    cfg.modulation = parse_modulation(doc.value("modulation", json::object()));

    cfg.grid = default_grid(cfg.reservoir, cfg.modulation);
    if (doc.contains("grid")) {
      const json& g = doc["grid"];
      check_keys(g, "grid", {"half_window", "spacing"});
      if (const auto w = get_opt<double>(g, "grid", "half_window")) {
        cfg.grid.half_window = *w;
        cfg.grid_is_default = false;
      }
      if (const auto s = get_opt<double>(g, "grid", "spacing")) {
        cfg.grid.spacing = *s;
        cfg.grid_is_default = false;
      }
    }
    cfg.grid.validate();
    const DiscreteBath bath = cfg.make_bath();

    if (doc.contains("sim")) {
      const json& s = doc["sim"];
      check_keys(s, "sim", {"t_final", "dt", "store_stride", "stored_points", "threads"});
      cfg.sim.t_final = get_or<double>(s, "sim", "t_final", 0.0);
      cfg.sim.dt = get_opt<double>(s, "sim", "dt");
      cfg.sim.store_stride = get_opt<std::size_t>(s, "sim", "store_stride");
      cfg.sim.stored_points = get_or<std::size_t>(s, "sim", "stored_points", 4000);
      cfg.sim.threads = get_or<int>(s, "sim", "threads", 1);
    }
    // t_final may be omitted by rates-only configs, but a given value must be usable.
    if (doc.contains("sim") && (doc["sim"].contains("t_final") || cfg.sim.dt)) cfg.make_sim(bath);

    if (doc.contains("fit")) {
      const json& f = doc["fit"];
      check_keys(f, "fit", {"t_start", "t_end"});
      cfg.fit.t_start = get_opt<double>(f, "fit", "t_start");
      cfg.fit.t_end = get_opt<double>(f, "fit", "t_end");
      if (cfg.fit.t_start.has_value() != cfg.fit.t_end.has_value()) {
        throw ConfigError("fit: t_start and t_end must be given together");
      }
      if (cfg.fit.t_start && !(*cfg.fit.t_end > *cfg.fit.t_start)) {
        throw ConfigError("fit: t_end must exceed t_start");
      }
    }

    if (doc.contains("rates")) {
      const json& r = doc["rates"];
      check_keys(r, "rates", {"n_max", "weak_coupling_ratio", "fast_modulation_factor"});
      cfg.rate_order = get_opt<int>(r, "rates", "n_max");
      if (cfg.rate_order && *cfg.rate_order < 0) throw ConfigError("rates.n_max: must be >= 0");
      cfg.thresholds.weak_coupling_ratio =
          get_or<double>(r, "rates", "weak_coupling_ratio", cfg.thresholds.weak_coupling_ratio);
      cfg.thresholds.fast_modulation_factor = get_or<double>(
          r, "rates", "fast_modulation_factor", cfg.thresholds.fast_modulation_factor);
      if (!(cfg.thresholds.weak_coupling_ratio > 0.0) ||
          !(cfg.thresholds.fast_modulation_factor > 0.0)) {
        throw ConfigError("rates: validity thresholds must be > 0");
      }
    }

    if (doc.contains("spectrum")) {
      const json& s = doc["spectrum"];
      check_keys(s, "spectrum", {"n_min", "n_max", "fit_window", "analytic"});
      cfg.spectrum.n_min = get_opt<int>(s, "spectrum", "n_min");
      cfg.spectrum.n_max = get_opt<int>(s, "spectrum", "n_max");
      cfg.spectrum.fit_window = get_or<double>(s, "spectrum", "fit_window", 0.0);
      cfg.spectrum.analytic = get_or<bool>(s, "spectrum", "analytic", false);
    }
    const auto [n_lo, n_hi] = cfg.peak_range();
    if (n_lo > n_hi) throw ConfigError("spectrum: n_min exceeds n_max");

    if (doc.contains("sweep")) {
      const json& s = doc["sweep"];
      check_keys(s, "sweep", {"parameter", "start", "stop", "count", "simulate", "peaks"});
      SweepSection sw;
      sw.parameter = get_or<std::string>(s, "sweep", "parameter", "");
      if (!kSweepable.count(sw.parameter)) {
        throw ConfigError("sweep.parameter: '" + sw.parameter + "' is not a sweepable parameter");
      }
      const auto start = get_opt<double>(s, "sweep", "start");
      const auto stop = get_opt<double>(s, "sweep", "stop");
      if (!start || !stop) throw ConfigError("sweep: start and stop are required");
      sw.start = *start;
      sw.stop = *stop;
      sw.count = get_or<int>(s, "sweep", "count", 0);
      if (sw.count < 2) throw ConfigError("sweep.count: must be >= 2");
      if (sw.start == sw.stop) throw ConfigError("sweep: empty range (start == stop)");
      sw.simulate = get_or<bool>(s, "sweep", "simulate", false);
      sw.peaks = get_or<bool>(s, "sweep", "peaks", false);
      if (sw.peaks && !sw.simulate) throw ConfigError("sweep.peaks: requires sweep.simulate");
      cfg.sweep = sw;
    }

    cfg.output_dir = get_or<std::string>(doc, "config", "output_dir", "out");
    cfg.workers = get_or<int>(doc, "config", "workers", 1);
    if (cfg.workers < 1) throw ConfigError("workers: must be >= 1");
    if (cfg.sim.threads < 1) throw ConfigError("sim.threads: must be >= 1");
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  if (cfg.sweep) {
    // Every point must be runnable before any work starts.
    json base = doc;
    base.erase("sweep");
    for (double v : cfg.sweep->values()) {
      const RunConfig point = parse_config(with_parameter(base, cfg.sweep->parameter, v));
      try {
        if (cfg.sweep->simulate) point.make_sim(point.make_bath());
      } catch (const std::invalid_argument& e) {
        throw ConfigError("sweep point " + cfg.sweep->parameter + " = " +
                          std::to_string(v) + ": " + e.what());
      }
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  json doc;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError("config '" + path + "': " + e.what());
    }
  } else {
    doc = json::object();
  }
  for (const auto& o : overrides) apply_override(doc, o);
  return parse_config(doc);
}

}  // namespace dynres
