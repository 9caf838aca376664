#include "relscat/zeros.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "relscat/specfun.hpp"

namespace relscat {

namespace {

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

double refine(const ZeroTarget& target, double a, double fa, double b, double tolerance) {
  double x = 0.5 * (a + b);
  for (int iter = 0; iter < 200; ++iter) {
    const TargetSample s = target.eval(x);
    if (s.value == 0.0) return x;
    if (sign_of(s.value) == sign_of(fa)) {
      a = x;
      fa = s.value;
    } else {
      b = x;
    }
    if (b - a < tolerance) return 0.5 * (a + b);

    double next = 0.5 * (a + b);
    if (std::isfinite(s.slope) && s.slope != 0.0) {
      const double newton = x - s.value / s.slope;
      if (newton > a && newton < b && std::fabs(newton - x) < 0.5 * (b - a)) {
        if (std::fabs(newton - x) < 0.25 * tolerance) return newton;
        next = newton;
      }
    }
    x = next;
  }
  return 0.5 * (a + b);
}

}  // namespace

ZeroList find_zeros(const ZeroTarget& target, double lo, double hi, double grid, double tolerance) {
  if (!(hi > lo)) throw std::invalid_argument("find_zeros: empty interval");
  if (!(grid > 0.0)) throw std::invalid_argument("find_zeros: grid spacing must be positive");

  ZeroList out;
  out.target = target.name;
  out.tolerance = tolerance;

  const auto n = static_cast<long>(std::ceil((hi - lo) / grid));
  const double h = (hi - lo) / static_cast<double>(n);

  std::vector<double> xs(n + 1);
  std::vector<double> fs(n + 1);
  for (long i = 0; i <= n; ++i) {
    xs[i] = i == 0 ? lo + 1e-9 * h : (i == n ? hi : lo + i * h);
    fs[i] = target.eval(xs[i]).value;
  }

  for (long i = 0; i < n; ++i) {
    if (fs[i] == 0.0) {
      if (i > 0) out.values.push_back(xs[i]);
      continue;
    }
    if (fs[i + 1] != 0.0 && sign_of(fs[i]) != sign_of(fs[i + 1]))
      out.values.push_back(refine(target, xs[i], fs[i], xs[i + 1], tolerance));
  }
  if (fs[n] == 0.0) out.values.push_back(xs[n]);

  for (long i = 1; i < n; ++i) {
    const double left = std::fabs(fs[i - 1]);
    const double mid = std::fabs(fs[i]);
    const double right = std::fabs(fs[i + 1]);
    if (sign_of(fs[i - 1]) == sign_of(fs[i]) && sign_of(fs[i]) == sign_of(fs[i + 1]) && mid < left &&
        mid < right && mid < 0.1 * std::max(left, right))
      out.anomalies.push_back(xs[i]);
  }

  std::sort(out.values.begin(), out.values.end());
  out.values.erase(std::unique(out.values.begin(), out.values.end()), out.values.end());
  return out;
}

ZeroTarget riccati_psi_target(int l, double s) {
  return {"psi_" + std::to_string(l),
          [l, s](double x) -> TargetSample {
            const RiccatiValues v = riccati_values(l, s * x);
            const double sin_t = scaled_sine(v.psi, v.scale, v.chi, -v.scale);
            const double cos_t = scaled_sine(v.chi, -v.scale, v.psi, v.scale);
            // theta' = 1 / (psi^2 + chi^2), written through whichever of psi, chi dominates.
            double inv_m2;
            if (std::fabs(cos_t) >= std::fabs(sin_t)) {
              const double chi = v.chi_value();
              inv_m2 = cos_t * cos_t / (chi * chi);
            } else {
              const double psi = v.psi_value();
              inv_m2 = sin_t * sin_t / (psi * psi);
            }
            return {sin_t, s * cos_t * inv_m2};
          }};
}

ZeroTarget riccati_dpsi_target(int l, double s) {
  return {"dpsi_" + std::to_string(l),
          [l, s](double x) -> TargetSample {
            const double y = s * x;
            const RiccatiValues v = riccati_values(l, y);
            const double sin_p = scaled_sine(v.dpsi, v.scale, v.dchi, -v.scale);
            const double cos_p = scaled_sine(v.dchi, -v.scale, v.dpsi, v.scale);
            double inv_m2;
            if (std::fabs(cos_p) >= std::fabs(sin_p)) {
              const double d = v.dchi_value();
              inv_m2 = cos_p * cos_p / (d * d);
            } else {
              const double d = v.dpsi_value();
              inv_m2 = sin_p * sin_p / (d * d);
            }
            const double q = l * (l + 1.0) / (y * y) - 1.0;
            return {sin_p, -s * cos_p * q * inv_m2};
          }};
}

}  // namespace relscat
