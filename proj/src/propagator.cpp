#include "dynres/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dynres/phase.hpp"

namespace dynres {

namespace {

constexpr Eigen::Index kChunk = 2048;
// Exact re-evaluation of the per-mode phase rotors, bounding the rounding
// accumulated by repeated multiplication.
constexpr std::size_t kResyncSteps = 256;

enum class PhaseAt { Start, Mid, End };

struct ModeState {
  explicit ModeState(Eigen::Index n)
      : cr(Eigen::ArrayXd::Zero(n)), ci(Eigen::ArrayXd::Zero(n)),
        kr(Eigen::ArrayXd::Zero(n)), ki(Eigen::ArrayXd::Zero(n)),
        ar(Eigen::ArrayXd::Zero(n)), ai(Eigen::ArrayXd::Zero(n)),
        ur(n), ui(n), hr(n), hi(n), fr(n), fi(n), g_start(n), g_mid(n), g_end(n) {}

  Eigen::ArrayXd cr, ci;      // mode amplitudes
  Eigen::ArrayXd kr, ki;      // derivative of the previous stage
  Eigen::ArrayXd ar, ai;      // weighted sum of stage derivatives
  Eigen::ArrayXd ur, ui;      // exp(-i delta_k t_n)
  Eigen::ArrayXd hr, hi;      // exp(-i delta_k h/2)
  Eigen::ArrayXd fr, fi;      // exp(-i delta_k h)
  Eigen::ArrayXd g_start, g_mid, g_end;
};

struct StageArgs {
  PhaseAt at;
  const double* g_in = nullptr;  // couplings to use, or
  double* g_out = nullptr;       // ... compute into this array
  double shift = 0.0;            // f(tau) when computing couplings
  double y_coeff = 0.0;          // y = c + y_coeff * k_prev
  double acc_weight = 1.0;
  bool first = false;            // initialise the accumulator
  bool last = false;             // finish the step: update c and the rotors
  double final_weight = 0.0;     // h / 6
  std::complex<double> drive;    // -i exp(i Phi) c_a at the stage
};

// One pass over modes [begin, end): forms the stage amplitudes, returns
// sum_k g_k p_k y_k and overwrites k with g_k conj(p_k) drive. The last
// stage instead folds its derivative into c and advances the rotors.
template <bool kRotate, bool kComputeG, bool kFirst, bool kLast>
std::complex<double> stage_kernel(ModeState& s, const Eigen::ArrayXd& det,
                                 double amplitude, double gamma2,
                                 const StageArgs& a, Eigen::Index begin,
                                 Eigen::Index end) {
  double* __restrict cr = s.cr.data();
  double* __restrict ci = s.ci.data();
  double* __restrict kr = s.kr.data();
  double* __restrict ki = s.ki.data();
  double* __restrict ar = s.ar.data();
  double* __restrict ai = s.ai.data();
  double* __restrict ur = s.ur.data();
  double* __restrict ui = s.ui.data();
  const double* __restrict rr = a.at == PhaseAt::Mid ? s.hr.data() : s.fr.data();
  const double* __restrict ri = a.at == PhaseAt::Mid ? s.hi.data() : s.fi.data();
  const double* __restrict dd = det.data();
  const double* __restrict gin = a.g_in;
  double* __restrict gout = a.g_out;
  const double yc = a.y_coeff;
  const double w = a.acc_weight;
  const double zr = a.drive.real();
  const double zi = a.drive.imag();
  const double shift = a.shift;
  const double h6 = a.final_weight;

  double sr = 0.0;
  double si = 0.0;
#pragma omp simd reduction(+ : sr, si)
  for (Eigen::Index k = begin; k < end; ++k) {
    double pr = ur[k];
    double pi = ui[k];
    if constexpr (kRotate) {
      const double tr = pr * rr[k] - pi * ri[k];
      pi = pr * ri[k] + pi * rr[k];
      pr = tr;
    }
    double g;
    if constexpr (kComputeG) {
      const double x = dd[k] + shift;
      g = amplitude / std::sqrt(gamma2 + x * x);
      gout[k] = g;
    } else {
      g = gin[k];
    }
    const double yr = cr[k] + yc * kr[k];
    const double yi = ci[k] + yc * ki[k];
    // g * p * y
    sr += g * (pr * yr - pi * yi);
    si += g * (pr * yi + pi * yr);
    // g * conj(p) * drive
    const double nr = g * (pr * zr + pi * zi);
    const double ni = g * (pr * zi - pi * zr);
    if constexpr (kLast) {
      cr[k] += h6 * (ar[k] + nr);
      ci[k] += h6 * (ai[k] + ni);
      ur[k] = pr;
      ui[k] = pi;
    } else if constexpr (kFirst) {
      kr[k] = nr;
      ki[k] = ni;
      ar[k] = nr;
      ai[k] = ni;
    } else {
      kr[k] = nr;
      ki[k] = ni;
      ar[k] += w * nr;
      ai[k] += w * ni;
    }
  }
  return {sr, si};
}

std::complex<double> stage_chunk(ModeState& s, const Eigen::ArrayXd& det,
                                 double amplitude, double gamma2,
                                 const StageArgs& a, Eigen::Index begin,
                                 Eigen::Index end) {
  const bool rotate = a.at != PhaseAt::Start;
  const bool compute = a.g_out != nullptr;
  if (a.first) {
    return stage_kernel<false, false, true, false>(s, det, amplitude, gamma2, a, begin, end);
  }
  if (!rotate) {
    return stage_kernel<false, false, false, false>(s, det, amplitude, gamma2, a, begin, end);
  }
  if (a.last) {
    return compute
               ? stage_kernel<true, true, false, true>(s, det, amplitude, gamma2, a, begin, end)
               : stage_kernel<true, false, false, true>(s, det, amplitude, gamma2, a, begin, end);
  }
  return compute
             ? stage_kernel<true, true, false, false>(s, det, amplitude, gamma2, a, begin, end)
             : stage_kernel<true, false, false, false>(s, det, amplitude, gamma2, a, begin, end);
}

class Stepper {
 public:
  Stepper(const DiscreteBath& bath, double h, int threads)
      : bath_(bath), det_(bath.detunings()), n_(det_.size()), h_(h),
        threads_(std::max(threads, 1)), state_(n_),
        flat_(bath.envelope() == Envelope::Flat),
        amplitude_(bath.coupling_amplitude()),
        gamma2_(bath.reservoir().gamma * bath.reservoir().gamma) {
    const Eigen::ArrayXd half = -det_ * (0.5 * h_);
    state_.hr = half.cos();
    state_.hi = half.sin();
    const Eigen::ArrayXd full = -det_ * h_;
    state_.fr = full.cos();
    state_.fi = full.sin();
    resync(0.0);
    if (flat_) {
      state_.g_start.setConstant(amplitude_);
      state_.g_mid.setConstant(amplitude_);
      state_.g_end.setConstant(amplitude_);
    } else {
      state_.g_start = bath_.couplings(0.0);
    }
    chunks_ = (n_ + kChunk - 1) / kChunk;
    partial_.assign(static_cast<std::size_t>(chunks_), {});
  }

  std::complex<double> c_a() const { return c_a_; }

  void step(std::size_t index) {
    const ModulationSpec& mod = bath_.modulation();
    const double t0 = static_cast<double>(index) * h_;
    const double tm = t0 + 0.5 * h_;
    const double t1 = t0 + h_;
    const std::complex<double> e0 = std::polar(1.0, -accumulated_phase(mod, t0));
    const std::complex<double> em = std::polar(1.0, -accumulated_phase(mod, tm));
    const std::complex<double> e1 = std::polar(1.0, -accumulated_phase(mod, t1));
    const std::complex<double> minus_i{0.0, -1.0};
    const std::complex<double> ca = c_a_;

    StageArgs a;
    // k1 at t0 with y = c
    a.at = PhaseAt::Start;
    a.g_in = state_.g_start.data();
    a.y_coeff = 0.0;
    a.first = true;
    a.drive = minus_i * std::conj(e0) * ca;
    const std::complex<double> ka1 = minus_i * e0 * run(a);

    // k2 at t0 + h/2 with y = c + h/2 k1
    const std::complex<double> ca2 = ca + 0.5 * h_ * ka1;
    a.at = PhaseAt::Mid;
    a.g_in = flat_ ? state_.g_mid.data() : nullptr;
    a.g_out = flat_ ? nullptr : state_.g_mid.data();
    a.shift = modulation_value(mod, tm);
    a.y_coeff = 0.5 * h_;
    a.first = false;
    a.acc_weight = 2.0;
    a.drive = minus_i * std::conj(em) * ca2;
    const std::complex<double> ka2 = minus_i * em * run(a);

    // k3 at t0 + h/2 with y = c + h/2 k2
    const std::complex<double> ca3 = ca + 0.5 * h_ * ka2;
    a.g_in = state_.g_mid.data();
    a.g_out = nullptr;
    a.drive = minus_i * std::conj(em) * ca3;
    const std::complex<double> ka3 = minus_i * em * run(a);

    // k4 at t0 + h with y = c + h k3
    const std::complex<double> ca4 = ca + h_ * ka3;
    a.at = PhaseAt::End;
    a.g_in = flat_ ? state_.g_end.data() : nullptr;
    a.g_out = flat_ ? nullptr : state_.g_end.data();
    a.shift = modulation_value(mod, t1);
    a.y_coeff = h_;
    a.acc_weight = 1.0;
    a.last = true;
    a.final_weight = h_ / 6.0;
    a.drive = minus_i * std::conj(e1) * ca4;
    const std::complex<double> ka4 = minus_i * e1 * run(a);

    c_a_ = ca + h_ / 6.0 * (ka1 + 2.0 * ka2 + 2.0 * ka3 + ka4);
    std::swap(state_.g_start, state_.g_end);

    const std::size_t next = index + 1;
    if (next % kResyncSteps == 0) resync(static_cast<double>(next) * h_);
  }

  /// |c_a|^2 + sum |c_k|^2, summed chunk by chunk in fixed order.
  double norm() {
    double total = std::norm(c_a_);
    for (Eigen::Index c = 0; c < chunks_; ++c) {
      const Eigen::Index b = c * kChunk;
      const Eigen::Index len = std::min(kChunk, n_ - b);
      total += state_.cr.segment(b, len).square().sum() +
               state_.ci.segment(b, len).square().sum();
    }
    return total;
  }

  Eigen::VectorXcd modes() const {
    Eigen::VectorXcd out(n_);
    out.real() = state_.cr.matrix();
    out.imag() = state_.ci.matrix();
    return out;
  }

 private:
  std::complex<double> run(const StageArgs& a) {
#pragma omp parallel for schedule(static) num_threads(threads_) if (threads_ > 1)
    for (Eigen::Index c = 0; c < chunks_; ++c) {
      const Eigen::Index b = c * kChunk;
      const Eigen::Index e = std::min(b + kChunk, n_);
      partial_[static_cast<std::size_t>(c)] =
          stage_chunk(state_, det_, amplitude_, gamma2_, a, b, e);
    }
    std::complex<double> total{};
    for (const auto& p : partial_) total += p;
    return total;
  }

  void resync(double t) {
    const Eigen::ArrayXd phase = -det_ * t;
    state_.ur = phase.cos();
    state_.ui = phase.sin();
  }

  const DiscreteBath& bath_;
  const Eigen::ArrayXd& det_;
  Eigen::Index n_;
  double h_;
  int threads_;
  ModeState state_;
  bool flat_;
  double amplitude_;
  double gamma2_;
  Eigen::Index chunks_ = 0;
  std::vector<std::complex<double>> partial_;
  std::complex<double> c_a_{1.0, 0.0};
};

}  // namespace

void SimConfig::validate(const DiscreteBath& bath) const {
  if (!(dt > 0.0)) throw std::invalid_argument("sim: dt must be > 0");
  if (!(t_final > 0.0)) throw std::invalid_argument("sim: t_final must be > 0");
  if (store_stride == 0) throw std::invalid_argument("sim: store_stride must be >= 1");
  if (threads < 1) throw std::invalid_argument("sim: threads must be >= 1");
  const double phase_step = dt * bath.max_rotating_frequency();
  if (phase_step > 0.1 * (1.0 + 1e-12)) {
    throw std::invalid_argument("sim: dt * (W + d) = " + std::to_string(phase_step) +
                                " exceeds 0.1 rad");
  }
  if (!(t_final < 0.5 * bath.recurrence_time())) {
    throw std::invalid_argument(
        "sim: t_final must be below half the bath recurrence time (" +
        std::to_string(0.5 * bath.recurrence_time()) + ")");
  }
}

SimConfig default_sim_config(const DiscreteBath& bath, double t_final,
                             std::size_t stored_points) {
  SimConfig cfg;
  cfg.t_final = t_final;
  cfg.dt = 0.05 / bath.max_rotating_frequency();
  const auto steps = static_cast<std::size_t>(std::ceil(t_final / cfg.dt - 1e-9));
  cfg.store_stride = std::max<std::size_t>(1, steps / std::max<std::size_t>(stored_points, 1));
  return cfg;
}

SimResult propagate(const DiscreteBath& bath, const SimConfig& cfg) {
  cfg.validate(bath);
  const auto steps =
      static_cast<std::size_t>(std::ceil(cfg.t_final / cfg.dt - 1e-9));
  const double h = cfg.t_final / static_cast<double>(steps);

  Stepper stepper(bath, h, cfg.threads);
  std::vector<double> times;
  std::vector<std::complex<double>> amps;
  const std::size_t expected = steps / cfg.store_stride + 2;
  times.reserve(expected);
  amps.reserve(expected);
  times.push_back(0.0);
  amps.push_back(stepper.c_a());

  double drift = 0.0;
  for (std::size_t i = 0; i < steps; ++i) {
    stepper.step(i);
    const std::size_t done = i + 1;
    if (done % cfg.store_stride == 0 || done == steps) {
      times.push_back(static_cast<double>(done) * h);
      amps.push_back(stepper.c_a());
      drift = std::max(drift, std::abs(1.0 - stepper.norm()));
      if (drift > 1e-4) {
        throw NumericalError("propagate: norm drift " + std::to_string(drift) +
                             " exceeds 1e-4 at t = " + std::to_string(times.back()));
      }
    }
  }

  SimResult out;
  out.times = Eigen::Map<const Eigen::VectorXd>(times.data(),
                                                static_cast<Eigen::Index>(times.size()));
  out.c_a = Eigen::Map<const Eigen::VectorXcd>(amps.data(),
                                               static_cast<Eigen::Index>(amps.size()));
  out.final_ck = stepper.modes();
  out.norm_drift = drift;
  out.steps = steps;
  out.dt = h;
  return out;
}

std::vector<std::pair<double, double>> excited_population(const SimResult& result) {
  std::vector<std::pair<double, double>> out;
  out.reserve(static_cast<std::size_t>(result.times.size()));
  for (Eigen::Index i = 0; i < result.times.size(); ++i) {
    out.emplace_back(result.times(i), std::norm(result.c_a(i)));
  }
  return out;
}

}  // namespace dynres
