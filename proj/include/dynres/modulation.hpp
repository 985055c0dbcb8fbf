#pragma once

// Periodic modulation f(t) applied identically to every bath mode frequency.

#include <memory>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace dynres {

enum class ModulationShape { None, Sinusoid, Tabulated };

/// Periodic cubic spline through (phase fraction, value) knots on [0, 1].
class PeriodicSpline {
 public:
  PeriodicSpline(Eigen::ArrayXd knots, Eigen::ArrayXd values);

  double value(double s) const;
  /// Integral of the spline from 0 to s; s may lie outside [0, 1].
  double integral(double s) const;
  double integral_per_period() const { return cumulative_(cumulative_.size() - 1); }

 private:
  std::size_t segment(double s) const;

  Eigen::ArrayXd knots_;
  Eigen::ArrayXd values_;
  Eigen::ArrayXd second_;      // second derivatives at the knots
  Eigen::ArrayXd cumulative_;  // integral from 0 to each knot
};

class ModulationSpec {
 public:
  using Table = std::vector<std::pair<double, double>>;

  ModulationSpec() = default;

  static ModulationSpec none();
  /// f(t) = depth * sin(omega_mod * t).
  static ModulationSpec sinusoid(double depth, double omega_mod);
  /// One period of (phase fraction in [0, 1], value) rows, first and last
  /// values equal; interpolated by a periodic cubic spline.
  static ModulationSpec tabulated(double omega_mod, Table table);

  ModulationShape shape() const { return shape_; }
  double depth() const { return depth_; }
  double omega_mod() const { return omega_mod_; }
  /// 2 pi / omega_mod; zero for an unmodulated bath.
  double period() const;
  const Table& table() const { return table_; }
  const PeriodicSpline* spline() const { return spline_.get(); }

  /// Copy with every value scaled so that the depth becomes `depth`.
  ModulationSpec with_depth(double depth) const;
  ModulationSpec with_omega_mod(double omega_mod) const;

 private:
  ModulationShape shape_ = ModulationShape::None;
  double depth_ = 0.0;
  double omega_mod_ = 0.0;
  Table table_;
  std::shared_ptr<const PeriodicSpline> spline_;
};

}  // namespace dynres
