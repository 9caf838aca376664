#pragma once

#include <array>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace relscat {

/// 15-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendre15 {
  std::array<double, 15> nodes;
  std::array<double, 15> weights;
};

const GaussLegendre15& gauss_legendre15();

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int panels = 0;
  bool converged = true;
  /// Panels that hit the depth limit, as [lo, hi] pairs.
  std::vector<std::array<double, 2>> unresolved;
};

class QuadratureError : public std::runtime_error {
public:
  QuadratureError(const std::string& what, QuadratureResult partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const QuadratureResult& partial() const noexcept { return partial_; }

private:
  QuadratureResult partial_;
};

/// Adaptive panel quadrature: a panel is accepted when the 15-point value and
/// the sum over its two halves agree to its share of the tolerance budget;
/// otherwise it is bisected. Starts from `initial_panels` equal panels.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    double rel_tol = 1e-9, double abs_tol = 0.0, int initial_panels = 16,
                                    int max_depth = 30);

}  // namespace relscat
