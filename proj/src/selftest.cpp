#include "dynres/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <vector>

#include "dynres/bath.hpp"
#include "dynres/fitting.hpp"
#include "dynres/phase.hpp"
#include "dynres/propagator.hpp"
#include "dynres/rates.hpp"
#include "dynres/specfun.hpp"

namespace dynres {

namespace {

constexpr double pi = std::numbers::pi;

// J_n(x) = (1 / 2 pi) int_0^{2 pi} cos(n t - x sin t) dt; the trapezoid rule
// is spectrally accurate for this periodic integrand.
double bessel_oracle(int n, double x) {
  const int points = 4 * static_cast<int>(std::abs(x) + std::abs(n)) + 256;
  double sum = 0.0;
  for (int i = 0; i < points; ++i) {
    const double t = 2.0 * pi * i / points;
    sum += std::cos(n * t - x * std::sin(t));
  }
  return sum / points;
}

// K(m) = (1 / 4) int_0^{2 pi} dt / sqrt(1 - m sin^2 t), periodic trapezoid.
double elliptic_oracle(double m) {
  const int points = 1 << 20;
  double sum = 0.0;
  for (int i = 0; i < points; ++i) {
    const double s = std::sin(2.0 * pi * i / points);
    sum += 1.0 / std::sqrt(1.0 - m * s * s);
  }
  return 0.25 * 2.0 * pi * sum / points;
}

SelfTestCheck upper_bound(std::string name, double measured, double tolerance) {
  SelfTestCheck c;
  c.name = std::move(name);
  c.measured = measured;
  c.tolerance = tolerance;
  c.passed = std::isfinite(measured) && measured <= tolerance;
  return c;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

double fitted_rate(const DiscreteBath& bath, double t_final) {
  const SimConfig cfg = default_sim_config(bath, t_final);
  const SimResult res = propagate(bath, cfg);
  std::vector<double> ts;
  std::vector<double> ps;
  for (const auto& [t, p] : excited_population(res)) {
    ts.push_back(t);
    ps.push_back(p);
  }
  const ModulationSpec& mod = bath.modulation();
  const auto period = mod.shape() == ModulationShape::None
                          ? std::nullopt
                          : std::optional<double>(mod.period());
  return fit_decay_rate(ts, ps, std::nullopt, period).rate;
}

}  // namespace

std::vector<SelfTestCheck> run_selftest(const SelfTestOptions& opt) {
  std::vector<SelfTestCheck> out;
  auto guarded = [&](const std::string& name, double tolerance, auto&& measure) {
    try {
      out.push_back(upper_bound(name, measure(), tolerance));
    } catch (const std::exception& e) {
      SelfTestCheck c;
      c.name = name;
      c.tolerance = tolerance;
      c.measured = std::numeric_limits<double>::quiet_NaN();
      c.detail = e.what();
      out.push_back(c);
    }
  };

  guarded("bessel_j vs integral representation (max abs error)", 1e-12, [] {
    double worst = 0.0;
    for (int n = -12; n <= 40; ++n) {
      for (double x : {0.0, 0.05, 0.7, 1.0, 3.4, 8.0, 17.5, 24.9, 25.1, 40.0, 68.0 / 20.0, 80.0}) {
        worst = std::max(worst, std::abs(bessel_j<double>(n, x) - bessel_oracle(n, x)));
      }
    }
    return worst;
  });

  guarded("elliptic_k vs defining integral (max rel error)", 1e-12, [&] {
    double worst = 0.0;
    for (double m : {0.0, 0.1, 0.5, 0.9, 0.99, 0.999}) {
      const double k = opt.elliptic_override ? opt.elliptic_override(m) : elliptic_k<double>(m);
      worst = std::max(worst, rel(k, elliptic_oracle(m)));
    }
    return worst;
  });

  guarded("Parseval deficit 1 - sum |F_n|^2", 1e-8, [] {
    double worst = 0.0;
    const ModulationSpec::Table triangle = {{0.0, 0.0}, {0.25, 1.0}, {0.5, 0.0}, {0.75, -1.0}, {1.0, 0.0}};
    for (const ModulationSpec& m :
         {ModulationSpec::sinusoid(1.0, 20.0), ModulationSpec::sinusoid(68.0, 20.0),
          ModulationSpec::sinusoid(30.0, 7.0), ModulationSpec::tabulated(5.0, triangle).with_depth(12.0)}) {
      const PhaseCoefficients f = fourier_coefficients(m, default_phase_order(m));
      worst = std::max(worst, 1.0 - f.parseval_sum());
    }
    return worst;
  });

  guarded("static limit: d = 0 sideband sum vs 2 D^2 / gamma (rel)", 1e-10, [] {
    const ReservoirSpec res{1.0, 1.0, 0.3};
    const double sum = total_rate(res, ModulationSpec::sinusoid(0.0, 20.0)).gamma_total;
    return std::max(rel(sum, res.static_rate()),
                    rel(total_rate(res, ModulationSpec::none()).gamma_total, res.static_rate()));
  });

  guarded("sideband quadrature vs Bessel sum (max rel error)", 1e-8, [] {
    const ReservoirSpec res{1.0, 1.0, 1.0};
    double worst = 0.0;
    for (double x : {0.3, 1.7, 3.4, 5.0}) {
      const ModulationSpec m = ModulationSpec::sinusoid(20.0 * x, 20.0);
      for (int n = -8; n <= 8; ++n) {
        const double a = sideband_rate(res, m, n);
        const double b = bessel_sum_rate(res, 20.0 * x, 20.0, n);
        worst = std::max(worst, std::abs(a - b) / std::max(std::abs(b), 1e-12 * res.static_rate()));
      }
    }
    return worst;
  });

  guarded("suppression ratio at d / gamma = 1000 vs 2.8e-5 (rel)", 0.05,
          [] { return rel(suppression_ratio(1000.0), 2.8e-5); });

  guarded("static Lorentzian bath, D = 0.1: fitted vs 2 D^2 / gamma (rel)", 0.02, [] {
    const ReservoirSpec res{1000.0, 1.0, 0.1};
    const ModulationSpec none = ModulationSpec::none();
    const DiscreteBath bath = build_bath(res, none, default_grid(res, none));
    return rel(fitted_rate(bath, 200.0), res.static_rate());
  });

  guarded("flat bath golden rule under modulation (rel)", 0.02, [] {
    const double golden = 0.2;
    const double level = golden / (2.0 * pi);
    const GridSpec grid{20.0, 0.02};
    const DiscreteBath bath =
        build_flat_bath(level, ModulationSpec::sinusoid(5.0, 3.0), grid, 1000.0);
    return rel(fitted_rate(bath, 45.0), golden);
  });

  return out;
}

bool print_report(std::ostream& os, const std::vector<SelfTestCheck>& checks) {
  bool all = true;
  for (const auto& c : checks) {
    char line[256];
    std::snprintf(line, sizeof line, "[%s] %-64s measured %.3e  tolerance %.1e",
                  c.passed ? "PASS" : "FAIL", c.name.c_str(), c.measured, c.tolerance);
    os << line;
    if (!c.detail.empty()) os << "  (" << c.detail << ')';
    os << '\n';
    all = all && c.passed;
  }
  os << (all ? "all checks passed" : "some checks FAILED") << '\n';
  return all;
}

}  // namespace dynres
