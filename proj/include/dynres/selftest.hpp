#pragma once

// Built-in invariant suite run by `dynres selftest`.

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace dynres {

struct SelfTestCheck {
  std::string name;
  double measured = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string detail;
};

struct SelfTestOptions {
  /// Replaces elliptic_k in the elliptic-integral check only. Used to show
  /// that a broken implementation is caught without disturbing the rest.
  std::function<double(double)> elliptic_override;
};

std::vector<SelfTestCheck> run_selftest(const SelfTestOptions& opt = {});

/// One line per check; returns true when every check passed.
bool print_report(std::ostream& os, const std::vector<SelfTestCheck>& checks);

}  // namespace dynres
