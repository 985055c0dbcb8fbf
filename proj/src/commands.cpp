#include "dynres/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <thread>
#include <vector>

namespace dynres {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr const char* kUnits =
    "frequencies and rates in units of gamma (gamma = 1), times in units of 1/gamma";

bool sinusoidal(const ModulationSpec& m) { return m.shape() == ModulationShape::Sinusoid; }

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void write_json(const fs::path& path, const json& doc) {
  auto out = open_out(path);
  out << doc.dump(2) << '\n';
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

struct Comparison {
  double gamma_prime = kNaN;
  double ultrafast = kNaN;
  double ultrafast_prime = kNaN;
  std::map<int, double> gamma_n_prime;
};

// The oscillating-detuning model and the ultrafast forms exist for the
// sinusoid and the static bath only.
Comparison comparison_rates(const RunConfig& cfg, int n_max) {
  Comparison c;
  if (cfg.envelope == Envelope::Flat) return c;
  const ReservoirSpec& res = cfg.reservoir;
  if (cfg.modulation.shape() == ModulationShape::None) {
    c.gamma_prime = c.ultrafast = c.ultrafast_prime = res.static_rate();
    c.gamma_n_prime[0] = res.static_rate();
    return c;
  }
  if (!sinusoidal(cfg.modulation)) return c;
  const double d = cfg.modulation.depth();
  const double w = cfg.modulation.omega_mod();
  const DetuningRates dr = detuning_rates(res, d, w, n_max);
  c.gamma_prime = dr.gamma_total_prime;
  c.gamma_n_prime = dr.gamma_n_prime;
  c.ultrafast = ultrafast_rate(res, d, w);
  c.ultrafast_prime = detuning_ultrafast_rate(res, d, w);
  return c;
}

std::optional<double> fit_period(const RunConfig& cfg) {
  // A zero-depth sinusoid is an unmodulated bath; its period sets no transient.
  if (cfg.modulation.shape() == ModulationShape::None || cfg.modulation.depth() == 0.0) {
    return std::nullopt;
  }
  return cfg.modulation.period();
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

RateBreakdown analytic_rate(const RunConfig& cfg) {
  if (cfg.envelope == Envelope::Flat) {
    RateBreakdown r;
    r.gamma_total = 2.0 * std::numbers::pi * cfg.flat_level;
    r.gamma_n[0] = r.gamma_total;
    r.validity = markov_validity(cfg.reservoir, cfg.modulation, cfg.thresholds);
    return r;
  }
  return total_rate(cfg.reservoir, cfg.modulation, cfg.rate_order, cfg.thresholds);
}

SimulationOutcome run_simulation(const RunConfig& cfg) {
  SimulationOutcome out;
  out.bath = cfg.make_bath();
  out.rates = analytic_rate(cfg);
  const SimConfig sim = cfg.make_sim(out.bath);
  out.result = propagate(out.bath, sim);

  std::vector<double> ts;
  std::vector<double> ps;
  for (const auto& [t, p] : excited_population(out.result)) {
    ts.push_back(t);
    ps.push_back(p);
  }
  std::optional<FitWindow> window;
  if (cfg.fit.t_start) window = FitWindow{*cfg.fit.t_start, *cfg.fit.t_end};
  try {
    out.fit = fit_decay_rate(ts, ps, window, fit_period(cfg));
  } catch (const std::invalid_argument& e) {
    out.fit_error = e.what();
  }

  out.spectrum = occupation_spectrum(out.result, out.bath);
  if (cfg.modulation.shape() != ModulationShape::None) {
    const auto [lo, hi] = cfg.peak_range();
    out.peaks = peak_weights(out.spectrum, cfg.modulation.omega_mod(), lo, hi,
                             cfg.spectrum.fit_window);
  }
  return out;
}

int cmd_simulate(const RunConfig& cfg, const fs::path& out_dir, std::ostream& log) {
  fs::create_directories(out_dir);
  const SimulationOutcome sim = run_simulation(cfg);
  log << "simulate: " << sim.bath.size() << " modes, " << sim.result.steps
      << " steps, norm drift " << sim.result.norm_drift << '\n';

  {
    auto f = open_out(out_dir / "trajectory.csv");
    f << "t,re_ca,im_ca,population\n";
    for (Eigen::Index i = 0; i < sim.result.times.size(); ++i) {
      const auto c = sim.result.c_a(i);
      f << format_number(sim.result.times(i)) << ',' << format_number(c.real()) << ','
        << format_number(c.imag()) << ',' << format_number(std::norm(c)) << '\n';
    }
  }

  std::optional<Spectrum> analytic;
  if (cfg.spectrum.analytic && cfg.envelope == Envelope::Lorentzian) {
    analytic = analytic_spectrum(cfg.reservoir, cfg.modulation, sim.spectrum.freqs,
                                 sim.rates.gamma_total, cfg.sim.threads);
  }
  {
    auto f = open_out(out_dir / "spectrum.csv");
    f << "detuning,S" << (analytic ? ",S_analytic" : "") << '\n';
    for (Eigen::Index i = 0; i < sim.spectrum.freqs.size(); ++i) {
      f << format_number(sim.spectrum.freqs(i)) << ',' << format_number(sim.spectrum.values(i));
      if (analytic) f << ',' << format_number(analytic->values(i));
      f << '\n';
    }
  }

  json peaks = json::array();
  {
    auto f = open_out(out_dir / "peaks.csv");
    f << "n,center,weight,half_width,predicted_weight\n";
    if (sim.peaks) {
      for (const auto& row : sim.peaks->rows) {
        const double predicted = sim.rates.at(row.n) / sim.rates.gamma_total;
        f << row.n << ',' << format_number(row.center) << ',' << format_number(row.weight)
          << ',' << format_number(row.half_width) << ',' << format_number(predicted) << '\n';
        peaks.push_back({{"n", row.n},
                         {"weight", row.weight},
                         {"half_width", number_or_null(row.half_width)},
                         {"predicted_weight", predicted}});
      }
    }
  }

  json summary;
  summary["units"] = kUnits;
  summary["fitted_rate"] = sim.fit ? json(sim.fit->rate) : json(nullptr);
  if (sim.fit) {
    summary["fit"] = {{"t_start", sim.fit->window.t_start},
                      {"t_end", sim.fit->window.t_end},
                      {"points", sim.fit->points},
                      {"rms_residual", sim.fit->rms_residual}};
  } else {
    summary["fit_error"] = sim.fit_error;
  }
  summary["gamma_inf_analytic"] = sim.rates.gamma_total;
  summary["validity"] = std::string(to_string(sim.rates.validity));
  summary["norm_drift"] = sim.result.norm_drift;
  summary["steps"] = sim.result.steps;
  summary["dt"] = sim.result.dt;
  summary["modes"] = sim.bath.size();
  summary["grid"] = {{"half_window", cfg.grid.half_window},
                     {"spacing", cfg.grid.spacing},
                     {"default", cfg.grid_is_default}};
  summary["residual_population"] = sim.spectrum.residual_population;
  summary["incomplete_decay"] = sim.spectrum.incomplete_decay;
  summary["spectrum_total"] = sim.spectrum.total;
  if (sim.peaks) {
    summary["peak_weight_sum"] = sim.peaks->weight_sum();
    summary["out_of_bin_mass"] = sim.peaks->out_of_bin_mass;
  }
  summary["peaks"] = peaks;
  summary["config"] = cfg.source;
  write_json(out_dir / "summary.json", summary);

  if (!sim.fit) {
    log << "simulate: decay fit failed: " << sim.fit_error << '\n';
    return 1;
  }
  log << "simulate: fitted rate " << sim.fit->rate << ", analytic "
      << sim.rates.gamma_total << '\n';
  return 0;
}

int cmd_rates(const RunConfig& cfg, const fs::path& out_dir, std::ostream& log) {
  fs::create_directories(out_dir);
  const RateBreakdown rates = analytic_rate(cfg);
  const Comparison cmp = comparison_rates(cfg, std::max(rates.n_max, 0));
  {
    auto f = open_out(out_dir / "rates.csv");
    f << "n,gamma_n,gamma_n_prime\n";
    for (const auto& [n, g] : rates.gamma_n) {
      const auto it = cmp.gamma_n_prime.find(n);
      f << n << ',' << format_number(g) << ','
        << format_number(it == cmp.gamma_n_prime.end() ? kNaN : it->second) << '\n';
    }
  }
  json summary;
  summary["units"] = kUnits;
  summary["gamma_inf"] = rates.gamma_total;
  summary["gamma_inf_prime"] = number_or_null(cmp.gamma_prime);
  summary["ultrafast_rate"] = number_or_null(cmp.ultrafast);
  summary["ultrafast_rate_prime"] = number_or_null(cmp.ultrafast_prime);
  const double x = cfg.modulation.shape() == ModulationShape::None ? 0.0
                                                                   : cfg.modulation.depth();
  summary["suppression_ratio"] =
      number_or_null(sinusoidal(cfg.modulation) || x == 0.0 ? suppression_ratio(x) : kNaN);
  summary["static_rate"] = cfg.reservoir.static_rate();
  summary["n_max"] = rates.n_max;
  summary["validity"] = std::string(to_string(rates.validity));
  summary["config"] = cfg.source;
  write_json(out_dir / "summary.json", summary);
  log << "rates: gamma_inf " << rates.gamma_total << ", gamma_inf_prime "
      << cmp.gamma_prime << '\n';
  return 0;
}

int cmd_sweep(const RunConfig& cfg, const fs::path& out_dir, std::ostream& log) {
  if (!cfg.sweep) throw ConfigError("sweep: config has no sweep section");
  fs::create_directories(out_dir);
  const SweepSection& sw = *cfg.sweep;
  const std::vector<double> values = sw.values();
  const int n_lo = cfg.spectrum.n_min.value_or(0);
  const int n_hi = cfg.spectrum.n_max.value_or(3);

  struct Row {
    double gamma = kNaN, gamma_prime = kNaN, ultrafast = kNaN, ultrafast_prime = kNaN;
    double simulated = kNaN, drift = kNaN;
    std::string validity;
    std::vector<double> sn;
    std::string status = "ok";
  };
  std::vector<Row> rows(values.size());
  json base = cfg.source;
  base.erase("sweep");

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < values.size(); i = next++) {
      Row& row = rows[i];
      row.sn.assign(static_cast<std::size_t>(n_hi - n_lo + 1), kNaN);
      try {
        const RunConfig point = parse_config(with_parameter(base, sw.parameter, values[i]));
        const RateBreakdown rates = analytic_rate(point);
        const Comparison cmp = comparison_rates(point, rates.n_max);
        row.gamma = rates.gamma_total;
        row.gamma_prime = cmp.gamma_prime;
        row.ultrafast = cmp.ultrafast;
        row.ultrafast_prime = cmp.ultrafast_prime;
        row.validity = to_string(rates.validity);
        if (sw.simulate) {
          const SimulationOutcome sim = run_simulation(point);
          row.drift = sim.result.norm_drift;
          if (sim.fit) {
            row.simulated = sim.fit->rate;
          } else {
            row.status = "failed: " + sim.fit_error;
          }
          if (sw.peaks && point.modulation.shape() != ModulationShape::None) {
            const PeakTable t = peak_weights(sim.spectrum, point.modulation.omega_mod(),
                                             n_lo, n_hi, point.spectrum.fit_window);
            for (const auto& r : t.rows) {
              row.sn[static_cast<std::size_t>(r.n - n_lo)] = r.weight;
            }
          } else if (sw.peaks) {
            // Unmodulated: the whole spectrum is the n = 0 line.
            if (n_lo <= 0 && 0 <= n_hi) row.sn[static_cast<std::size_t>(-n_lo)] = sim.spectrum.total;
          }
        }
      } catch (const std::exception& e) {
        row.status = std::string("failed: ") + e.what();
      }
    }
  };
  const int workers = std::max(1, std::min<int>(cfg.workers, static_cast<int>(values.size())));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  int failures = 0;
  {
    auto f = open_out(out_dir / "sweep.csv");
    f << sw.parameter << ",gamma_inf,gamma_inf_prime,ultrafast_rate,ultrafast_rate_prime,validity";
    if (sw.simulate) f << ",simulated_rate,norm_drift";
    if (sw.peaks) {
      for (int n = n_lo; n <= n_hi; ++n) f << ",S_" << n;
    }
    f << ",status\n";
    for (std::size_t i = 0; i < values.size(); ++i) {
      const Row& r = rows[i];
      if (r.status != "ok") ++failures;
      f << format_number(values[i]) << ',' << format_number(r.gamma) << ','
        << format_number(r.gamma_prime) << ',' << format_number(r.ultrafast) << ','
        << format_number(r.ultrafast_prime) << ',' << r.validity;
      if (sw.simulate) f << ',' << format_number(r.simulated) << ',' << format_number(r.drift);
      if (sw.peaks) {
        for (double s : r.sn) f << ',' << format_number(s);
      }
      std::string status = r.status;
      std::replace(status.begin(), status.end(), ',', ';');
      std::replace(status.begin(), status.end(), '\n', ' ');
      f << ',' << status << '\n';
    }
  }
  json summary;
  summary["units"] = kUnits;
  summary["parameter"] = sw.parameter;
  summary["points"] = values.size();
  summary["failed_points"] = failures;
  summary["workers"] = workers;
  summary["config"] = cfg.source;
  write_json(out_dir / "summary.json", summary);
  log << "sweep: " << values.size() << " points, " << failures << " failed\n";
  return failures == 0 ? 0 : 1;
}

}  // namespace dynres
