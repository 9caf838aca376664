#include "relscat/test_function.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace relscat {

TestFunction::TestFunction(double sigma, std::vector<double> coeffs, double amplitude)
    : sigma_(sigma), coeffs_(std::move(coeffs)), amplitude_(amplitude) {}

TestFunction TestFunction::gaussian(double sigma, std::vector<double> even_coeffs, double amplitude) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("TestFunction: sigma must be positive");
  if (even_coeffs.empty()) throw std::invalid_argument("TestFunction: need at least one coefficient");
  for (double c : even_coeffs)
    if (!std::isfinite(c)) throw std::invalid_argument("TestFunction: non-finite coefficient");
  if (!std::isfinite(amplitude)) throw std::invalid_argument("TestFunction: non-finite amplitude");
  return TestFunction(sigma, std::move(even_coeffs), amplitude);
}

TestFunction TestFunction::zero() { return TestFunction(1.0, {1.0}, 0.0); }

bool TestFunction::is_zero() const noexcept {
  if (amplitude_ == 0.0) return true;
  for (double c : coeffs_)
    if (c != 0.0) return false;
  return true;
}

double TestFunction::operator()(double lambda) const {
  const double t = lambda * lambda;
  double poly = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) poly = poly * t + *it;
  return amplitude_ * poly * std::exp(-t / (sigma_ * sigma_));
}

double TestFunction::weighted(double lambda) const { return lambda * lambda * (*this)(lambda); }

double TestFunction::weighted_derivative(double lambda) const {
  const double t = lambda * lambda;
  // q = sum c_k lambda^{2k+2}, dq its derivative.
  double q = 0.0;
  double dq = 0.0;
  double pow = t;  // lambda^{2k+2}
  for (std::size_t k = 0; k < coeffs_.size(); ++k) {
    q += coeffs_[k] * pow;
    dq += coeffs_[k] * (2.0 * k + 2.0) * pow / lambda;
    pow *= t;
  }
  if (lambda == 0.0) dq = 0.0;
  const double s2 = sigma_ * sigma_;
  return amplitude_ * std::exp(-t / s2) * (dq - 2.0 * lambda / s2 * q);
}

double TestFunction::majorant(double lambda) const {
  const double t = lambda * lambda;
  double sum = 0.0;
  double pow = t;
  for (double c : coeffs_) {
    sum += std::fabs(c) * pow;
    pow *= t;
  }
  return std::fabs(amplitude_) * sum * std::exp(-t / (sigma_ * sigma_));
}

double TestFunction::monotone_tail_start(double eps) const {
  // Each term lambda^{2k+2} exp(-lambda^2/sigma^2) decreases past sigma sqrt(k+1).
  double lam = sigma_ * std::sqrt(static_cast<double>(coeffs_.size()) + 1.0);
  while (majorant(lam) >= eps) lam *= 1.05;
  return lam;
}

double TestFunction::peak() const {
  if (is_zero()) return 0.0;
  const double top = monotone_tail_start(1e-300);
  const double step = sigma_ / 256.0;
  double best = 0.0;
  double at = 0.0;
  for (double lam = step; lam <= top; lam += step) {
    const double v = std::fabs(weighted(lam));
    if (v > best) {
      best = v;
      at = lam;
    }
  }
  // Golden-section polish around the grid maximum.
  double lo = std::max(0.0, at - step);
  double hi = at + step;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int i = 0; i < 60; ++i) {
    const double m1 = hi - g * (hi - lo);
    const double m2 = lo + g * (hi - lo);
    if (std::fabs(weighted(m1)) < std::fabs(weighted(m2)))
      lo = m1;
    else
      hi = m2;
  }
  return std::max(best, std::fabs(weighted(0.5 * (lo + hi))));
}

double TestFunction::effective_support(double eps) const {
  if (!(eps > 0.0)) throw std::invalid_argument("effective_support: eps must be positive");
  if (is_zero() || !(eps < peak())) return 0.0;

  const double top = monotone_tail_start(eps);
  const double step = sigma_ / 512.0;
  double above = top;  // sup over (above, inf) is < eps
  for (double lam = top - step; lam > 0.0; lam -= step) {
    if (std::fabs(weighted(lam)) >= eps) {
      double lo = lam;
      double hi = above;
      for (int i = 0; i < 100 && hi - lo > 1e-15 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (std::fabs(weighted(mid)) >= eps)
          lo = mid;
        else
          hi = mid;
      }
      return hi;
    }
    above = lam;
  }
  return 0.0;
}

double TestFunction::integration_limit() const {
  if (is_zero()) return 0.0;
  return effective_support(1e-18 * peak());
}

std::string TestFunction::describe() const {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "gaussian(sigma=" << sigma_ << ", amplitude=" << amplitude_ << ", coeffs=[";
  for (std::size_t i = 0; i < coeffs_.size(); ++i) os << (i ? "," : "") << coeffs_[i];
  os << "])";
  return os.str();
}

}  // namespace relscat
