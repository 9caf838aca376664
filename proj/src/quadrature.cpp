#include "relscat/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace relscat {

namespace {

GaussLegendre15 build_rule() {
  constexpr int n = 15;
  GaussLegendre15 rule{};
  for (int i = 0; i < n; ++i) {
    // Newton on P_n from the Chebyshev-like initial guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-16) break;
    }
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

double panel(const std::function<double(double)>& f, double a, double b) {
  const auto& rule = gauss_legendre15();
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (int i = 0; i < 15; ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return sum * half;
}

struct Budget {
  double per_unit_length;
  double floor;
};

void refine(const std::function<double(double)>& f, double a, double b, double whole, const Budget& budget,
            int depth, int max_depth, QuadratureResult& out) {
  const double mid = 0.5 * (a + b);
  const double left = panel(f, a, mid);
  const double right = panel(f, mid, b);
  const double diff = std::fabs(left + right - whole);
  const double allowed = std::max(budget.per_unit_length * (b - a), budget.floor);
  if (diff <= allowed || depth >= max_depth) {
    out.value += left + right;
    out.error_estimate += diff;
    out.panels += 2;
    if (diff > allowed) {
      out.converged = false;
      out.unresolved.push_back({a, b});
    }
    return;
  }
  refine(f, a, mid, left, budget, depth + 1, max_depth, out);
  refine(f, mid, b, right, budget, depth + 1, max_depth, out);
}

}  // namespace

const GaussLegendre15& gauss_legendre15() {
  static const GaussLegendre15 rule = build_rule();
  return rule;
}

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b, double rel_tol,
                                    double abs_tol, int initial_panels, int max_depth) {
  QuadratureResult out;
  if (b == a) return out;
  if (!(b > a)) throw std::invalid_argument("integrate_adaptive: requires a < b");
  if (initial_panels < 1) initial_panels = 1;

  const double width = (b - a) / initial_panels;
  std::vector<double> coarse(initial_panels);
  double scale = 0.0;
  for (int i = 0; i < initial_panels; ++i) {
    coarse[i] = panel(f, a + i * width, a + (i + 1) * width);
    scale += std::fabs(coarse[i]);
  }
  const double total_tol = std::max(rel_tol * scale, abs_tol);
  // A small share goes to a per-panel floor so nearly empty panels do not
  // bisect forever on rounding noise.
  const Budget budget{0.5 * total_tol / (b - a), 1e-3 * total_tol / initial_panels};

  for (int i = 0; i < initial_panels; ++i)
    refine(f, a + i * width, a + (i + 1) * width, coarse[i], budget, 0, max_depth, out);

  if (!out.converged) {
    std::ostringstream os;
    os << "integrate_adaptive: " << out.unresolved.size() << " panel(s) unresolved at depth " << max_depth
       << ", first on [" << out.unresolved.front()[0] << ", " << out.unresolved.front()[1]
       << "], estimated error " << out.error_estimate;
    throw QuadratureError(os.str(), out);
  }
  return out;
}

}  // namespace relscat
