#pragma once

#include <complex>

namespace relscat {

/// Angular degree l in odd spatial dimension d. The radial kernels
/// j_{d,l}, h_{d,l} are Bessel functions of half-integer order l + (d-2)/2.
class RadialOrder {
public:
  RadialOrder(int dim, int degree);

  int dim() const noexcept { return dim_; }
  int degree() const noexcept { return degree_; }
  double bessel_order() const noexcept { return degree_ + 0.5 * (dim_ - 2); }
  /// Index n of the d = 3 spherical function with the same Bessel order.
  int spherical_index() const noexcept { return degree_ + (dim_ - 3) / 2; }

private:
  int dim_;
  int degree_;
};

/// Riccati-Bessel functions psi_l = x j_l, chi_l = -x y_l and their
/// derivatives at one point. psi and dpsi carry a factor 2^scale, chi and
/// dchi carry 2^-scale, so the products that matter (Wronskians, ratios,
/// cross products) never over- or underflow even for l >> x.
struct RiccatiValues {
  double psi = 0.0;
  double dpsi = 0.0;
  double chi = 0.0;
  double dchi = 0.0;
  int scale = 0;

  double psi_value() const;
  double dpsi_value() const;
  double chi_value() const;
  double dchi_value() const;

  /// Continuous-branch-free angle atan2(psi, chi) in (-pi, pi].
  double angle() const;
  /// Same for the derivative pair, atan2(psi', chi').
  double derivative_angle() const;
};

/// Riccati-Bessel values for l >= -1 (l = -1 gives cos x, -sin x).
/// Downward (Miller) recurrence for psi when l >= x, upward otherwise;
/// chi is always recurred upward.
RiccatiValues riccati_values(int l, double x);

enum class RiccatiKind { J, Y, H1, H2 };

/// J: psi_l, Y: chi_l = -x y_l, H1: xi1 = x h1_l = psi - i chi, H2: psi + i chi.
std::complex<double> riccati(RiccatiKind kind, int l, double x);
std::complex<double> riccati_deriv(RiccatiKind kind, int l, double x);

/// j_{d,l}(x) = sqrt(pi/2) x^{(2-d)/2} J_{l+(d-2)/2}(x).
double j_dl(const RadialOrder& order, double x);
/// y_{d,l}(x), the Neumann counterpart of j_dl.
double y_dl(const RadialOrder& order, double x);
/// h1_{d,l}(z) = sqrt(pi/2) z^{(2-d)/2} H1_{l+(d-2)/2}(z) for Im z >= 0,
/// from the finite polynomial-times-exponential closed form.
std::complex<double> hankel1_dl(const RadialOrder& order, std::complex<double> z);
/// exp(-i z) h1_{d,l}(z); finite wherever h1 itself overflows only through exp(i z).
std::complex<double> hankel1_dl_scaled(const RadialOrder& order, std::complex<double> z);

/// |psi' chi - psi chi' - 1|. With chi = -x y the Riccati Wronskian
/// psi' chi - psi chi' is identically one.
double wronskian_check(int l, double x);

/// a / hypot(a, b) for a = ma 2^ea, b = mb 2^eb. A nonzero a never maps to
/// zero: the result keeps the sign of a, bottoming out at DBL_MIN.
double scaled_sine(double ma, int ea, double mb, int eb);

}  // namespace relscat
