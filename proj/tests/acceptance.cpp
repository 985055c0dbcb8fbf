// Acceptance suite: one PASS/FAIL line per criterion, followed by the
// measured numbers. Long-running: about 25 minutes on one core.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "dynres/commands.hpp"
#include "dynres/config.hpp"
#include "dynres/phase.hpp"
#include "dynres/rates.hpp"
#include "dynres/specfun.hpp"
#include "oracles.hpp"

using namespace dynres;
using nlohmann::json;

namespace {

struct Line {
  std::string name;
  bool passed = false;
  std::vector<std::string> details;
};

std::vector<Line> lines;
double worst_drift = 0.0;

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

json load(const std::string& name) {
  std::ifstream in(std::string(DYNRES_CONFIG_DIR) + "/" + name);
  return json::parse(in);
}

int threads() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

struct Run {
  SimulationOutcome out;
  double seconds = 0.0;
  double fitted = std::nan("");
};

Run simulate(json doc) {
  doc["sim"]["threads"] = threads();
  const RunConfig cfg = parse_config(doc);
  const auto t0 = std::chrono::steady_clock::now();
  Run r{run_simulation(cfg)};
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (r.out.fit) r.fitted = r.out.fit->rate;
  worst_drift = std::max(worst_drift, r.out.result.norm_drift);
  return r;
}

json depth_doc(double depth) {
  json doc = load("depth_sweep.json");
  doc.erase("sweep");
  doc.erase("workers");
  doc["modulation"]["depth"] = depth;
  return doc;
}

void static_limit() {
  Line l{"static limit: fitted rate within 2% of 2 D^2 / gamma, runtime < 1 min"};
  const Run r = simulate(load("static.json"));
  const double expected = r.out.bath.reservoir().static_rate();
  const double e = rel(r.fitted, expected);
  l.passed = e <= 0.02 && r.seconds < 60.0;
  l.details.push_back(fmt("fitted %.6g, 2D^2/gamma %.6g, rel %.3e, %zu modes, %.1f s", r.fitted,
                          expected, e, r.out.bath.size(), r.seconds));
  lines.push_back(l);
}

void golden_rule() {
  Line l{"golden rule: flat bath under modulation within 2% of 2 pi rho g^2 and 0.5% of the unmodulated run"};
  const json doc = load("golden_flat.json");
  const Run mod = simulate(doc);
  json flat = doc;
  flat["modulation"] = {{"shape", "none"}};
  const Run none = simulate(flat);
  const double golden = 2.0 * oracle::pi * doc["reservoir"]["flat_level"].get<double>();
  const double e1 = rel(mod.fitted, golden);
  const double e2 = rel(mod.fitted, none.fitted);
  l.passed = e1 <= 0.02 && e2 <= 0.005;
  l.details.push_back(fmt("modulated %.6g, unmodulated %.6g, 2 pi rho g^2 %.6g", mod.fitted,
                          none.fitted, golden));
  l.details.push_back(fmt("rel to golden rule %.3e (tol 2e-2), rel to unmodulated %.3e (tol 5e-3)",
                          e1, e2));
  lines.push_back(l);
}

void analytic_consistency() {
  Line l{"analytic self-consistency: quadrature vs Bessel sum 1e-8, ultrafast 3%, suppression identity 1e-12"};
  const ReservoirSpec res{1000.0, 1.0, 1.0};
  const double omega = 20.0;
  double worst = 0.0;
  for (int i = 0; i <= 10; ++i) {
    const double x = 0.5 * i;
    const ModulationSpec m = ModulationSpec::sinusoid(x * omega, omega);
    for (int n = -8; n <= 8; ++n) {
      const double a = sideband_rate(res, m, n);
      const double b = bessel_sum_rate(res, x * omega, omega, n);
      worst = std::max(worst, std::abs(a - b) / std::max(std::abs(b), 1e-12 * res.static_rate()));
    }
  }
  const ReservoirSpec weak{1000.0, 1.0, 0.1};
  const double full = total_rate(weak, ModulationSpec::sinusoid(5.0, 200.0)).gamma_total;
  const double fast = ultrafast_rate(weak, 5.0, 200.0);
  const double e_fast = rel(fast, full);
  double worst_identity = 0.0;
  const double big = 1e9;
  for (double d : {0.5, 1.0, 3.41, 20.0, 68.0, 1000.0}) {
    const double j0 = bessel_j<double>(0, d / big);
    const double ratio = ultrafast_rate(weak, d, big) / (weak.static_rate() * j0 * j0);
    worst_identity = std::max(worst_identity, rel(ratio, suppression_ratio(d)));
  }
  l.passed = worst <= 1e-8 && e_fast <= 0.03 && worst_identity <= 1e-12;
  l.details.push_back(fmt("max rel quadrature vs Bessel sum %.3e over d/Omega 0..5, |n| <= 8", worst));
  l.details.push_back(fmt("ultrafast %.6g vs full %.6g at Omega 200, d 5, D 0.1: rel %.3e", fast,
                          full, e_fast));
  l.details.push_back(fmt("suppression identity max rel %.3e", worst_identity));
  lines.push_back(l);
}

void depth_sweep(const Run& sidebands) {
  Line l{"depth sweep: fitted rates within 5% of Gamma_inf at 8 depths, maxima bracketing 20 and 40"};
  bool ok = true;
  double total_seconds = sidebands.seconds;
  for (double d : {0.0, 10.0, 20.0, 30.0, 40.0, 60.0, 68.0, 80.0}) {
    const Run r = d == 68.0 ? sidebands : simulate(depth_doc(d));
    if (d != 68.0) total_seconds += r.seconds;
    const double analytic = r.out.rates.gamma_total;
    const double e = rel(r.fitted, analytic);
    ok = ok && e <= 0.05;
    l.details.push_back(fmt("d %5.1f: fitted %.6g, Gamma_inf %.6g, rel %.3e, validity %s%s", d,
                            r.fitted, analytic, e,
                            std::string(to_string(r.out.rates.validity)).c_str(),
                            r.out.fit_error.empty() ? "" : (", fit: " + r.out.fit_error).c_str()));
  }

  // Local maxima of the analytic curve on a 1 gamma grid.
  const ReservoirSpec res{1000.0, 1.0, 1.0};
  std::vector<double> curve;
  for (int d = 0; d <= 80; ++d) curve.push_back(total_rate(res, ModulationSpec::sinusoid(d, 20.0)).gamma_total);
  std::vector<int> maxima;
  for (int d = 1; d < 80; ++d) {
    if (curve[d] > curve[d - 1] && curve[d] > curve[d + 1]) maxima.push_back(d);
  }
  auto bracketed = [&](int target) {
    return std::any_of(maxima.begin(), maxima.end(), [&](int m) { return std::abs(m - target) <= 1; });
  };
  std::string list;
  for (int m : maxima) list += (list.empty() ? "" : ", ") + std::to_string(m);
  const bool peaks = bracketed(20) && bracketed(40);
  l.details.push_back("analytic local maxima at d = " + list + " (need one within 1 gamma of 20 and of 40)");
  l.details.push_back(fmt("simulation time %.0f s on %d threads", total_seconds, threads()));
  l.passed = ok && peaks && total_seconds < 1800.0;
  lines.push_back(l);
}

void sideband_spectrum(const Run& r) {
  Line l{"d = 68 spectrum: sideband peaks (a) 99% mass within 3 Gamma_inf (b) HWHM (c) sum S_n (d) S_n vs Gamma_n / Gamma_inf"};
  const double gamma = r.out.rates.gamma_total;
  const PeakTable& t = *r.out.peaks;
  const Spectrum& s = r.out.spectrum;

  int concentrated = 0;
  double best = 0.0;
  for (const auto& row : t.rows) {
    const double core = s.integrate(row.center - 3.0 * gamma, row.center + 3.0 * gamma);
    const double frac = row.weight > 0.0 ? core / row.weight : 0.0;
    if (frac >= 0.99) ++concentrated;
    best = std::max(best, frac);
  }
  const bool a = concentrated >= 5;

  const PeakRow* centre = t.find(0);
  const double b_err = rel(centre->half_width, 0.5 * gamma);
  const bool b = b_err <= 0.10;

  const double sum = t.weight_sum();
  const bool c = sum >= 0.98;

  bool d = true;
  double worst = 0.0;
  int checked = 0;
  for (const auto& row : t.rows) {
    const double predicted = r.out.rates.at(row.n) / gamma;
    if (predicted < 0.01) continue;
    ++checked;
    const double e = rel(row.weight, predicted);
    worst = std::max(worst, e);
    d = d && e <= 0.05;
  }

  l.passed = a && b && c && d;
  l.details.push_back(fmt("(a) %s: %d peaks with >= 99%% of bin mass within +-3 Gamma_inf (best %.4f)",
                          a ? "pass" : "FAIL", concentrated, best));
  l.details.push_back(fmt("(b) %s: HWHM %.6g vs Gamma_inf / 2 = %.6g, rel %.3e", b ? "pass" : "FAIL",
                          centre->half_width, 0.5 * gamma, b_err));
  l.details.push_back(fmt("(c) %s: sum S_n over n = %d..%d is %.6f", c ? "pass" : "FAIL",
                          t.rows.front().n, t.rows.back().n, sum));
  l.details.push_back(fmt("(d) %s: worst rel %.3e over the %d peaks with Gamma_n / Gamma_inf >= 1%%",
                          d ? "pass" : "FAIL", worst, checked));
  for (const auto& row : t.rows) {
    l.details.push_back(fmt("    n %+d: S_n %.6f, Gamma_n / Gamma_inf %.6f, HWHM %.5g", row.n,
                            row.weight, r.out.rates.at(row.n) / gamma, row.half_width));
  }
  l.details.push_back(fmt("fitted rate %.6g vs Gamma_inf %.6g, residual population %.3e, %.0f s",
                          r.fitted, gamma, s.residual_population, r.seconds));
  lines.push_back(l);
}

void section_vc() {
  Line l{"suppression ratio: f(1000) within 5% of 2.8e-5 and f(3.41) in [0.20, 0.27]"};
  auto derived = [](double x) {
    const double k = oracle::elliptic_integral(x * x / (1.0 + x * x));
    return 4.0 * k * k / (oracle::pi * oracle::pi * (1.0 + x * x));
  };
  const double f1000 = suppression_ratio(1000.0);
  const double f341 = suppression_ratio(3.41);
  l.passed = rel(f1000, 2.8e-5) <= 0.05 && f341 >= 0.20 && f341 <= 0.27;
  l.details.push_back(fmt("f(1000) = %.6g (oracle %.6g), rel to 2.8e-5 %.3e", f1000, derived(1000.0),
                          rel(f1000, 2.8e-5)));
  l.details.push_back(fmt("f(3.41) = %.6g (oracle %.6g), 1 / f = %.3f", f341, derived(3.41), 1.0 / f341));
  lines.push_back(l);
}

void conservation() {
  Line l{"conservation and convergence: drift, step halving, grid refinement, special functions, Parseval"};

  const json base = depth_doc(20.0);
  const Run coarse = simulate(base);
  json halved = base;
  halved["sim"]["dt"] = 0.5 * coarse.out.result.dt;
  const Run fine = simulate(halved);
  const double pop_change = std::abs(std::norm(coarse.out.result.c_a(coarse.out.result.c_a.size() - 1)) -
                                     std::norm(fine.out.result.c_a(fine.out.result.c_a.size() - 1)));

  json refined = base;
  refined["grid"] = {{"half_window", 1.5 * coarse.out.bath.grid().half_window},
                     {"spacing", 0.5 * coarse.out.bath.grid().spacing}};
  const Run dense = simulate(refined);
  const double grid_change = rel(dense.fitted, coarse.fitted);

  json static_dense = load("static.json");
  static_dense["grid"] = {{"half_window", 20.0}, {"spacing", 0.005}};
  const Run s_dense = simulate(static_dense);
  const Run s_default = simulate(load("static.json"));
  const double static_change = rel(s_dense.fitted, s_default.fitted);

  double bessel_err = 0.0;
  for (int n = -12; n <= 40; ++n) {
    for (double x : {0.0, 0.1, 1.0, 2.5, 3.4, 7.3, 15.0, 24.5, 25.5, 33.0, 50.0, 80.0}) {
      bessel_err = std::max(bessel_err, std::abs(bessel_j<double>(n, x) - oracle::bessel_integral(n, x)));
    }
  }
  double elliptic_err = 0.0;
  for (double m : {0.0, 0.2, 0.5, 0.8, 0.95, 0.999}) {
    elliptic_err = std::max(elliptic_err, rel(elliptic_k<double>(m), oracle::elliptic_integral(m)));
  }

  double parseval = 0.0;
  const ModulationSpec::Table triangle = {{0.0, 0.0}, {0.25, 1.0}, {0.5, 0.0}, {0.75, -1.0}, {1.0, 0.0}};
  std::vector<ModulationSpec> mods;
  for (double d : {10.0, 20.0, 30.0, 40.0, 60.0, 68.0, 80.0}) mods.push_back(ModulationSpec::sinusoid(d, 20.0));
  mods.push_back(ModulationSpec::sinusoid(30.0, 7.0));
  mods.push_back(ModulationSpec::tabulated(20.0, triangle).with_depth(40.0));
  for (const auto& m : mods) {
    parseval = std::max(parseval, 1.0 - fourier_coefficients(m, default_phase_order(m)).parseval_sum());
  }

  l.passed = worst_drift < 1e-6 && pop_change < 1e-6 && grid_change < 0.01 && static_change < 0.01 &&
             bessel_err <= 1e-12 && elliptic_err <= 1e-12 && parseval <= 1e-8;
  l.details.push_back(fmt("max norm drift over all acceptance runs %.3e (tol 1e-6)", worst_drift));
  l.details.push_back(fmt("step halving, d 20: final population change %.3e (tol 1e-6)", pop_change));
  l.details.push_back(fmt("grid refinement, d 20 (W x1.5, spacing / 2): rate change %.3e (tol 1e-2)", grid_change));
  l.details.push_back(fmt("grid refinement, static (W 20, spacing 0.005): rate change %.3e (tol 1e-2)",
                          static_change));
  l.details.push_back(fmt("bessel_j max abs error %.3e, elliptic_k max rel error %.3e (tol 1e-12)",
                          bessel_err, elliptic_err));
  l.details.push_back(fmt("max Parseval deficit %.3e (tol 1e-8)", parseval));
  lines.push_back(l);
}

void dominance() {
  Line l{"dominance: Gamma_inf <= Gamma'_inf at all 81 points of d in [0, 80], Omega = 20"};
  const ReservoirSpec res{1000.0, 1.0, 1.0};
  int violations = 0;
  int leading_violations = 0;
  double worst_ratio = 0.0;
  double worst_d = 0.0;
  for (int i = 0; i <= 80; ++i) {
    const double d = i;
    const ModulationSpec m = ModulationSpec::sinusoid(d, 20.0);
    const double g = total_rate(res, m).gamma_total;
    const double gp = detuning_rates(res, d, 20.0, default_rate_order(m)).gamma_total_prime;
    if (g > gp * (1.0 + 1e-12)) ++violations;
    if (g / gp > worst_ratio) {
      worst_ratio = g / gp;
      worst_d = d;
    }
    if (ultrafast_rate(res, d, 20.0) > detuning_ultrafast_rate(res, d, 20.0) * (1.0 + 1e-12)) {
      ++leading_violations;
    }
  }
  l.passed = violations == 0;
  l.details.push_back(fmt("full sideband sums: %d of 81 points violate, largest Gamma_inf / Gamma'_inf %.3f at d %.0f",
                          violations, worst_ratio, worst_d));
  l.details.push_back(fmt("leading-order forms (ultrafast): %d violations", leading_violations));
  lines.push_back(l);
}

}  // namespace

int main() {
  static_limit();
  golden_rule();
  analytic_consistency();
  const Run sideband_run = simulate(load("sidebands_d68.json"));
  depth_sweep(sideband_run);
  sideband_spectrum(sideband_run);
  section_vc();
  conservation();
  dominance();

  bool all = true;
  for (const auto& l : lines) {
    std::printf("[%s] %s\n", l.passed ? "PASS" : "FAIL", l.name.c_str());
    all = all && l.passed;
  }
  std::printf("\n");
  for (const auto& l : lines) {
    std::printf("%s\n", l.name.c_str());
    for (const auto& d : l.details) std::printf("  %s\n", d.c_str());
  }
  std::printf("\n%zu criteria, %s\n", lines.size(), all ? "all passed" : "some FAILED");
  return all ? 0 : 1;
}
