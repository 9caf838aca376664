#include "relscat/specfun.hpp"

#include <cfloat>
#include <cmath>
#include <stdexcept>
#include <string>

namespace relscat {

namespace {

constexpr int kRescaleExp = 600;
const double kRescaleThreshold = std::ldexp(1.0, kRescaleExp);

// m * 2^e
struct Scaled {
  double m = 0.0;
  int e = 0;
};

// chi_l and chi_{l-1}, upward from chi_{-1} = -sin, chi_0 = cos.
void chi_upward(int l, double x, Scaled& chi_l, Scaled& chi_lm1) {
  double prev = -std::sin(x);
  double cur = std::cos(x);
  int e = 0;
  for (int n = 0; n < l; ++n) {
    const double next = (2.0 * n + 1.0) / x * cur - prev;
    prev = cur;
    cur = next;
    if (std::fabs(cur) > kRescaleThreshold) {
      cur = std::ldexp(cur, -kRescaleExp);
      prev = std::ldexp(prev, -kRescaleExp);
      e += kRescaleExp;
    }
  }
  chi_l = {cur, e};
  chi_lm1 = {prev, e};
}

void psi_upward(int l, double x, Scaled& psi_l, Scaled& psi_lp1) {
  double prev = std::cos(x);
  double cur = std::sin(x);
  for (int n = 0; n < l; ++n) {
    const double next = (2.0 * n + 1.0) / x * cur - prev;
    prev = cur;
    cur = next;
  }
  psi_l = {cur, 0};
  psi_lp1 = {(2.0 * l + 1.0) / x * cur - prev, 0};
}

// Miller's algorithm: recur downward from an arbitrary seed far above l,
// then normalise against psi_0 = sin x or psi_{-1} = cos x.
void psi_miller(int l, double x, Scaled& psi_l, Scaled& psi_lp1) {
  const double top = std::max<double>(l, x);
  const int start = static_cast<int>(top) + 30 + static_cast<int>(std::ceil(std::sqrt(80.0 * (top + 1.0))));

  double above = 0.0;  // f_{n+1}
  double cur = 1.0;    // f_n
  int e = 0;
  Scaled f_l, f_lp1;
  for (int n = start; n >= 0; --n) {
    if (n == l + 1) f_lp1 = {cur, e};
    if (n == l) f_l = {cur, e};
    const double below = (2.0 * n + 1.0) / x * cur - above;
    above = cur;
    cur = below;
    if (std::fabs(cur) > kRescaleThreshold) {
      cur = std::ldexp(cur, -kRescaleExp);
      above = std::ldexp(above, -kRescaleExp);
      e += kRescaleExp;
    }
  }
  // cur = f_{-1}, above = f_0, both at exponent e.
  const double s = std::sin(x);
  const double c = std::cos(x);
  const double norm = std::fabs(s) >= std::fabs(c) ? s / above : c / cur;
  psi_l = {norm * f_l.m, f_l.e - e};
  psi_lp1 = {norm * f_lp1.m, f_lp1.e - e};
}

void require_positive(double x, const char* what) {
  if (!(x > 0.0) || !std::isfinite(x))
    throw std::domain_error(std::string(what) + ": argument must be a positive finite real");
}

}  // namespace

RadialOrder::RadialOrder(int dim, int degree) : dim_(dim), degree_(degree) {
  if (dim < 3 || dim % 2 == 0)
    throw std::invalid_argument("RadialOrder: only odd dimensions d >= 3 are supported, got d = " +
                                std::to_string(dim));
  if (degree < 0) throw std::invalid_argument("RadialOrder: degree must be >= 0");
}

double RiccatiValues::psi_value() const { return std::ldexp(psi, scale); }
double RiccatiValues::dpsi_value() const { return std::ldexp(dpsi, scale); }
double RiccatiValues::chi_value() const { return std::ldexp(chi, -scale); }
double RiccatiValues::dchi_value() const { return std::ldexp(dchi, -scale); }

double RiccatiValues::angle() const {
  const double s = scaled_sine(psi, scale, chi, -scale);
  const double c = scaled_sine(chi, -scale, psi, scale);
  return std::atan2(s, c);
}

double RiccatiValues::derivative_angle() const {
  const double s = scaled_sine(dpsi, scale, dchi, -scale);
  const double c = scaled_sine(dchi, -scale, dpsi, scale);
  return std::atan2(s, c);
}

double scaled_sine(double ma, int ea, double mb, int eb) {
  if (ma == 0.0) return 0.0;
  if (mb == 0.0) return std::copysign(1.0, ma);
  const double ratio = std::ldexp(mb / ma, eb - ea);  // b / a, may be inf
  double s = 1.0 / std::sqrt(1.0 + ratio * ratio);
  if (!(s > 0.0)) s = DBL_MIN;
  if (std::isnan(s)) s = DBL_MIN;
  return std::copysign(s, ma);
}

RiccatiValues riccati_values(int l, double x) {
  require_positive(x, "riccati_values");
  if (l < -1) throw std::invalid_argument("riccati_values: l must be >= -1");
  if (l == -1) {
    const double s = std::sin(x);
    const double c = std::cos(x);
    return {c, -s, -s, -c, 0};
  }

  Scaled psi_l, psi_lp1;
  if (static_cast<double>(l) < x)
    psi_upward(l, x, psi_l, psi_lp1);
  else
    psi_miller(l, x, psi_l, psi_lp1);

  Scaled chi_l, chi_lm1;
  chi_upward(l, x, chi_l, chi_lm1);

  // psi'_l = (l+1)/x psi_l - psi_{l+1}; chi'_l = chi_{l-1} - l/x chi_l.
  const double dpsi_m = (l + 1.0) / x * psi_l.m - std::ldexp(psi_lp1.m, psi_lp1.e - psi_l.e);
  const double dchi_m = chi_lm1.m - l / x * chi_l.m;

  int fe = 0;
  const double psi_m = std::frexp(psi_l.m, &fe);
  RiccatiValues v;
  v.scale = psi_l.e + fe;
  v.psi = psi_m;
  v.dpsi = std::ldexp(dpsi_m, psi_l.e - v.scale);
  v.chi = std::ldexp(chi_l.m, chi_l.e + v.scale);
  v.dchi = std::ldexp(dchi_m, chi_l.e + v.scale);
  return v;
}

std::complex<double> riccati(RiccatiKind kind, int l, double x) {
  if (l < 0) throw std::invalid_argument("riccati: l must be >= 0");
  const RiccatiValues v = riccati_values(l, x);
  const double psi = v.psi_value();
  const double chi = v.chi_value();
  switch (kind) {
    case RiccatiKind::J: return {psi, 0.0};
    case RiccatiKind::Y: return {chi, 0.0};
    case RiccatiKind::H1: return {psi, -chi};
    case RiccatiKind::H2: return {psi, chi};
  }
  return {};
}

std::complex<double> riccati_deriv(RiccatiKind kind, int l, double x) {
  if (l < 0) throw std::invalid_argument("riccati_deriv: l must be >= 0");
  const RiccatiValues v = riccati_values(l, x);
  const double dpsi = v.dpsi_value();
  const double dchi = v.dchi_value();
  switch (kind) {
    case RiccatiKind::J: return {dpsi, 0.0};
    case RiccatiKind::Y: return {dchi, 0.0};
    case RiccatiKind::H1: return {dpsi, -dchi};
    case RiccatiKind::H2: return {dpsi, dchi};
  }
  return {};
}

double j_dl(const RadialOrder& order, double x) {
  require_positive(x, "j_dl");
  const RiccatiValues v = riccati_values(order.spherical_index(), x);
  const double prefactor = std::pow(x, 0.5 * (1 - order.dim()));
  return std::ldexp(v.psi * prefactor, v.scale);
}

double y_dl(const RadialOrder& order, double x) {
  require_positive(x, "y_dl");
  const RiccatiValues v = riccati_values(order.spherical_index(), x);
  const double prefactor = std::pow(x, 0.5 * (1 - order.dim()));
  return -std::ldexp(v.chi * prefactor, -v.scale);
}

std::complex<double> hankel1_dl_scaled(const RadialOrder& order, std::complex<double> z) {
  if (z == std::complex<double>(0.0, 0.0)) throw std::domain_error("hankel1_dl: z = 0");
  if (z.imag() < 0.0) throw std::domain_error("hankel1_dl: requires Im z >= 0");
  using namespace std::complex_literals;
  const int n = order.spherical_index();
  // sum_k (n+k)! / (k! (n-k)!) (i / 2z)^k
  std::complex<double> term = 1.0;
  std::complex<double> sum = 1.0;
  for (int k = 0; k < n; ++k) {
    term *= 1i * (static_cast<double>(n + k + 1) * (n - k) / (k + 1.0)) / (2.0 * z);
    sum += term;
  }
  std::complex<double> phase = 1.0;  // (-i)^{n+1}
  for (int k = 0; k <= n % 4; ++k) phase *= -1i;
  const int power = (order.dim() - 1) / 2;
  return phase * sum / std::pow(z, power);
}

std::complex<double> hankel1_dl(const RadialOrder& order, std::complex<double> z) {
  using namespace std::complex_literals;
  return std::exp(1i * z) * hankel1_dl_scaled(order, z);
}

double wronskian_check(int l, double x) {
  const RiccatiValues v = riccati_values(l, x);
  return std::fabs(v.dpsi * v.chi - v.psi * v.dchi - 1.0);
}

}  // namespace relscat
