#pragma once

#include <functional>
#include <string>
#include <vector>

namespace relscat {

/// Value and derivative of a zero-finding target. `slope` may be NaN when no
/// derivative is available; the refinement then stays with bisection.
struct TargetSample {
  double value;
  double slope;
};

struct ZeroTarget {
  std::string name;
  std::function<TargetSample(double)> eval;
};

/// Every zero of a target on an interval, sorted and strictly increasing.
struct ZeroList {
  std::vector<double> values;
  std::string target;
  double tolerance = 0.0;
  /// Grid points where |f| dips to a local minimum near zero without a sign
  /// change: a tangency or a pair of zeros closer than the grid spacing.
  std::vector<double> anomalies;
};

/// Scan (lo, hi] on a uniform grid of spacing <= `grid`, bracket sign changes
/// and refine each by bisection with a safeguarded Newton polish.
ZeroList find_zeros(const ZeroTarget& target, double lo, double hi, double grid = 0.25,
                    double tolerance = 1e-12);

/// Sign-normalised targets for psi_l(s x) and psi_l'(s x) as functions of x.
/// Both are bounded by one and share their zeros with the Riccati function.
ZeroTarget riccati_psi_target(int l, double s = 1.0);
ZeroTarget riccati_dpsi_target(int l, double s = 1.0);

}  // namespace relscat
