#include "dynres/modulation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Sparse>

namespace dynres {

PeriodicSpline::PeriodicSpline(Eigen::ArrayXd knots, Eigen::ArrayXd values)
    : knots_(std::move(knots)), values_(std::move(values)) {
  const Eigen::Index rows = knots_.size();
  if (rows < 4 || values_.size() != rows) {
    throw std::invalid_argument("periodic spline needs at least 4 knots");
  }
  const Eigen::Index n = rows - 1;  // number of segments == unknowns
  Eigen::ArrayXd h = knots_.tail(n) - knots_.head(n);
  if ((h <= 0.0).any()) {
    throw std::invalid_argument("spline knots must be strictly increasing");
  }

  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(3 * n));
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index prev = (i + n - 1) % n;
    const Eigen::Index next = (i + 1) % n;
    const double h_prev = h(prev);
    const double h_here = h(i);
    entries.emplace_back(i, prev, h_prev);
    entries.emplace_back(i, i, 2.0 * (h_prev + h_here));
    entries.emplace_back(i, next, h_here);
    const double y_prev = values_(prev);
    const double y_here = values_(i);
    const double y_next = values_(i + 1);
    rhs(i) = 6.0 * ((y_next - y_here) / h_here - (y_here - y_prev) / h_prev);
  }
  Eigen::SparseMatrix<double> system(n, n);
  system.setFromTriplets(entries.begin(), entries.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> solver;
  solver.compute(system);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("periodic spline: factorisation failed");
  }
  const Eigen::VectorXd second = solver.solve(rhs);

  second_.resize(rows);
  second_.head(n) = second.array();
  second_(n) = second_(0);

  cumulative_.resize(rows);
  cumulative_(0) = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    cumulative_(i + 1) =
        cumulative_(i) + 0.5 * h(i) * (values_(i) + values_(i + 1)) -
        h(i) * h(i) * h(i) * (second_(i) + second_(i + 1)) / 24.0;
  }
}

std::size_t PeriodicSpline::segment(double s) const {
  const auto* begin = knots_.data();
  const auto* end = begin + knots_.size();
  auto it = std::upper_bound(begin, end, s);
  auto idx = static_cast<std::ptrdiff_t>(it - begin) - 1;
  idx = std::clamp<std::ptrdiff_t>(idx, 0, knots_.size() - 2);
  return static_cast<std::size_t>(idx);
}

double PeriodicSpline::value(double s) const {
  s -= std::floor(s);
  const auto j = static_cast<Eigen::Index>(segment(s));
  const double h = knots_(j + 1) - knots_(j);
  const double u = s - knots_(j);
  const double v = knots_(j + 1) - s;
  return second_(j) * v * v * v / (6.0 * h) +
         second_(j + 1) * u * u * u / (6.0 * h) +
         (values_(j) / h - second_(j) * h / 6.0) * v +
         (values_(j + 1) / h - second_(j + 1) * h / 6.0) * u;
}

double PeriodicSpline::integral(double s) const {
  const double periods = std::floor(s);
  const double frac = s - periods;
  const auto j = static_cast<Eigen::Index>(segment(frac));
  const double h = knots_(j + 1) - knots_(j);
  const double u = frac - knots_(j);
  const double v = knots_(j + 1) - frac;
  const double partial =
      second_(j) * (h * h * h * h - v * v * v * v) / (24.0 * h) +
      second_(j + 1) * u * u * u * u / (24.0 * h) +
      (values_(j) / h - second_(j) * h / 6.0) * 0.5 * (h * h - v * v) +
      (values_(j + 1) / h - second_(j + 1) * h / 6.0) * 0.5 * u * u;
  return periods * integral_per_period() + cumulative_(j) + partial;
}

ModulationSpec ModulationSpec::none() { return ModulationSpec{}; }

ModulationSpec ModulationSpec::sinusoid(double depth, double omega_mod) {
  if (!(omega_mod > 0.0)) {
    throw std::invalid_argument("modulation: omega_mod must be > 0");
  }
  if (!(depth >= 0.0)) {
    throw std::invalid_argument("modulation: depth must be >= 0");
  }
  ModulationSpec spec;
  spec.shape_ = ModulationShape::Sinusoid;
  spec.depth_ = depth;
  spec.omega_mod_ = omega_mod;
  return spec;
}

ModulationSpec ModulationSpec::tabulated(double omega_mod, Table table) {
  if (!(omega_mod > 0.0)) {
    throw std::invalid_argument("modulation: omega_mod must be > 0");
  }
  if (table.size() < 4) {
    throw std::invalid_argument("modulation: table needs at least 4 rows");
  }
  if (table.front().first != 0.0 || table.back().first != 1.0) {
    throw std::invalid_argument(
        "modulation: table phase fractions must run from 0 to 1");
  }
  double scale = 0.0;
  for (const auto& row : table) scale = std::max(scale, std::abs(row.second));
  if (std::abs(table.front().second - table.back().second) >
      1e-12 * std::max(scale, 1.0)) {
    throw std::invalid_argument(
        "modulation: table is not periodic (first value != last value)");
  }
  Eigen::ArrayXd knots(static_cast<Eigen::Index>(table.size()));
  Eigen::ArrayXd values(knots.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    knots(static_cast<Eigen::Index>(i)) = table[i].first;
    values(static_cast<Eigen::Index>(i)) = table[i].second;
  }
  values(values.size() - 1) = values(0);

  ModulationSpec spec;
  spec.shape_ = ModulationShape::Tabulated;
  spec.omega_mod_ = omega_mod;
  spec.table_ = std::move(table);
  spec.spline_ = std::make_shared<const PeriodicSpline>(knots, values);

  // Depth of the interpolant, sampled densely enough to catch overshoot.
  double lo = values(0);
  double hi = values(0);
  const int samples = 64 * static_cast<int>(knots.size());
  for (int i = 0; i < samples; ++i) {
    const double f = spec.spline_->value(static_cast<double>(i) / samples);
    lo = std::min(lo, f);
    hi = std::max(hi, f);
  }
  spec.depth_ = 0.5 * (hi - lo);
  return spec;
}

double ModulationSpec::period() const {
  return shape_ == ModulationShape::None
             ? 0.0
             : 2.0 * std::numbers::pi / omega_mod_;
}

ModulationSpec ModulationSpec::with_depth(double depth) const {
  switch (shape_) {
    case ModulationShape::None:
      if (depth != 0.0) {
        throw std::invalid_argument("modulation: shape none has zero depth");
      }
      return *this;
    case ModulationShape::Sinusoid:
      return sinusoid(depth, omega_mod_);
    case ModulationShape::Tabulated: {
      if (depth_ == 0.0) {
        throw std::invalid_argument(
            "modulation: cannot rescale a flat tabulated modulation");
      }
      Table scaled = table_;
      for (auto& row : scaled) row.second *= depth / depth_;
      return tabulated(omega_mod_, std::move(scaled));
    }
  }
  return *this;
}

ModulationSpec ModulationSpec::with_omega_mod(double omega_mod) const {
  switch (shape_) {
    case ModulationShape::None:
      return *this;
    case ModulationShape::Sinusoid:
      return sinusoid(depth_, omega_mod);
    case ModulationShape::Tabulated:
      return tabulated(omega_mod, table_);
  }
  return *this;
}

}  // namespace dynres
