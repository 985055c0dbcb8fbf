#pragma once

// Fixed-step RK4 integration of the single-excitation amplitude equations
// for the atom plus every discrete bath mode, in the interaction picture.

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dynres/bath.hpp"

namespace dynres {

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Integrator { RK4Fixed };

struct SimConfig {
  double t_final = 0.0;
  double dt = 0.0;
  std::size_t store_stride = 1;
  Integrator integrator = Integrator::RK4Fixed;
  /// Worker threads for the mode loops. Results do not depend on it.
  int threads = 1;

  /// Checks dt > 0, the phase-resolution bound and the recurrence guard.
  void validate(const DiscreteBath& bath) const;
};

/// dt = 0.05 / (W + d), the given horizon and a stride that stores about
/// `stored_points` samples.
SimConfig default_sim_config(const DiscreteBath& bath, double t_final,
                             std::size_t stored_points = 4000);

struct SimResult {
  Eigen::VectorXd times;
  Eigen::VectorXcd c_a;
  Eigen::VectorXcd final_ck;
  /// max |1 - (|c_a|^2 + sum |c_k|^2)| over the stored times
  double norm_drift = 0.0;
  std::size_t steps = 0;
  double dt = 0.0;
};

SimResult propagate(const DiscreteBath& bath, const SimConfig& cfg);

/// (t, |c_a(t)|^2) at every stored time.
std::vector<std::pair<double, double>> excited_population(const SimResult& result);

}  // namespace dynres
