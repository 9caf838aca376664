#include "relscat/mie.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "relscat/quadrature.hpp"
#include "relscat/specfun.hpp"
#include "relscat/zeros.hpp"

namespace relscat {

namespace {

constexpr double kPi = std::numbers::pi;

std::string lower(std::string s) {
  for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return s;
}

void require_lambda(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw std::domain_error("mie: lambda must be positive and finite");
}

// Both components of a boundary pair rescaled to the common exponent `e`.
struct Aligned {
  double u;
  double v;
  int e;
};

Aligned align(const BoundaryPair& b) {
  int eu = 0;
  int ev = 0;
  const double mu = std::frexp(b.psi, &eu);
  const double mv = std::frexp(b.chi, &ev);
  eu += b.psi_exp;
  ev += b.chi_exp;
  if (mu == 0.0 && mv == 0.0) throw std::runtime_error("mie: degenerate boundary pair");
  const int e = mu == 0.0 ? ev : (mv == 0.0 ? eu : std::max(eu, ev));
  return {std::ldexp(mu, eu - e), std::ldexp(mv, ev - e), e};
}

// Sum of two scaled numbers, returned as a mantissa and exponent.
std::pair<double, int> scaled_sum(double m1, int e1, double m2, int e2) {
  const int e = std::max(e1, e2);
  return {std::ldexp(m1, e1 - e) + std::ldexp(m2, e2 - e), e};
}

struct PhasePoint {
  double principal;
  double derivative;
};

PhasePoint phase_point(const Channel& c, double lambda) {
  const Aligned al = align(boundary_pair(c, lambda));
  const double principal = al.v == 0.0 ? kPi / 2 : std::atan(-al.u / al.v);
  const double inv_m2 = std::ldexp(1.0 / (al.u * al.u + al.v * al.v), -2 * al.e);
  const double a = c.radius;
  const double x = lambda * a;
  double derivative = 0.0;
  switch (c.pol) {
    case Polarization::Dirichlet:
      derivative = -a * inv_m2;
      break;
    case Polarization::TM: {
      const double q = c.degree * (c.degree + 1.0) / (x * x) - 1.0;
      derivative = a * q * inv_m2;
      break;
    }
    case Polarization::Normal: {
      // The normal pair is (2l+1)/x times the scalar pair.
      const double k = (2.0 * c.degree + 1.0) / x;
      derivative = -a * k * k * inv_m2;
      break;
    }
  }
  return {principal, derivative};
}

double wrap_pi(double d) { return d - kPi * std::round(d / kPi); }

// Follows the continuous branch of delta forward in lambda.
class PhaseTracker {
public:
  explicit PhaseTracker(const Channel& c) : c_(c) {
    lambda_ = 1e-3 / c.radius;
    const PhasePoint p = phase_point(c, lambda_);
    delta_ = p.principal;
    derivative_ = p.derivative;
    max_step_ = 0.2 / c.radius;
  }

  double lambda() const { return lambda_; }
  double delta() const { return delta_; }
  double derivative() const { return derivative_; }

  /// Advances to `target` (>= current lambda); `on_step` sees each accepted step.
  template <typename F>
  void advance_to(double target, F&& on_step) {
    double h = max_step_;
    while (lambda_ < target) {
      const double step = std::min(h, target - lambda_);
      const double next_lambda = step == target - lambda_ ? target : lambda_ + step;
      const PhasePoint next = phase_point(c_, next_lambda);
      const double predicted = delta_ + 0.5 * step * (derivative_ + next.derivative);
      const double candidate = next.principal + kPi * std::round((predicted - next.principal) / kPi);
      const bool ok = std::fabs(candidate - predicted) <= kPi / 8 && std::fabs(candidate - delta_) <= kPi / 4 &&
                      std::fabs(step * (next.derivative - derivative_)) <= kPi / 8;
      if (!ok) {
        h = 0.5 * step;
        if (h < 1e-12 * std::max(1.0, lambda_)) {
          std::ostringstream os;
          os << "phase_shift: unresolved pi-jump in channel " << c_.label() << " near lambda = " << lambda_
             << " (delta = " << delta_ << ", predicted " << predicted << ", principal " << next.principal << ")";
          throw std::runtime_error(os.str());
        }
        continue;
      }
      lambda_ = next_lambda;
      delta_ = candidate;
      derivative_ = next.derivative;
      on_step(lambda_, delta_, derivative_);
      if (std::fabs(candidate - predicted) < kPi / 64) h = std::min(max_step_, 2.0 * h);
    }
  }

private:
  Channel c_;
  double lambda_;
  double delta_;
  double derivative_;
  double max_step_;
};

// log((2l+1)!! (2l-1)!!) via Gamma functions.
double log_double_factorials(int l) {
  const double lp = std::lgamma(l + 1.5) + (l + 1) * std::log(2.0) - 0.5 * std::log(kPi);
  const double lm = std::lgamma(l + 0.5) + l * std::log(2.0) - 0.5 * std::log(kPi);
  return lp + lm;
}

}  // namespace

std::string to_string(Polarization pol) {
  switch (pol) {
    case Polarization::Dirichlet: return "dirichlet";
    case Polarization::TM: return "tm";
    case Polarization::Normal: return "normal";
  }
  return "?";
}

Polarization parse_polarization(const std::string& name) {
  const std::string n = lower(name);
  if (n == "dirichlet" || n == "te") return Polarization::Dirichlet;
  if (n == "tm") return Polarization::TM;
  if (n == "normal") return Polarization::Normal;
  throw std::invalid_argument("unknown polarization '" + name + "' (dirichlet, te, tm, normal)");
}

std::string Channel::label() const {
  std::ostringstream os;
  const char* family = pol == Polarization::Dirichlet ? (p == 1 ? "te" : "dirichlet") : (pol == Polarization::TM ? "tm" : "normal");
  os << "p" << p << ":" << family << ":l" << degree;
  return os.str();
}

Channel make_channel(int p, int degree, Polarization pol, double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw std::invalid_argument("make_channel: radius must be positive");
  if (degree < 0) throw std::invalid_argument("make_channel: degree must be >= 0");
  if (p == 0) {
    if (pol != Polarization::Dirichlet) throw std::invalid_argument("make_channel: p = 0 channels are Dirichlet");
  } else if (p == 1) {
    if (pol != Polarization::Normal && degree < 1)
      throw std::invalid_argument("make_channel: tangential one-form channels need degree >= 1");
  } else {
    throw std::invalid_argument("make_channel: only p = 0 and p = 1 are supported");
  }
  return {p, degree, pol, radius, 2L * degree + 1};
}

BoundaryPair boundary_pair(const Channel& c, double lambda) {
  require_lambda(lambda);
  const double x = lambda * c.radius;
  switch (c.pol) {
    case Polarization::Dirichlet: {
      const RiccatiValues v = riccati_values(c.degree, x);
      return {v.psi, v.scale, v.chi, -v.scale};
    }
    case Polarization::TM: {
      const RiccatiValues v = riccati_values(c.degree, x);
      return {v.dpsi, v.scale, v.dchi, -v.scale};
    }
    case Polarization::Normal: {
      // dr-component: psi_{l-1} + psi_{l+1} and chi_{l-1} + chi_{l+1}.
      const RiccatiValues lo = riccati_values(c.degree - 1, x);
      const RiccatiValues hi = riccati_values(c.degree + 1, x);
      const auto [ps, pe] = scaled_sum(lo.psi, lo.scale, hi.psi, hi.scale);
      const auto [cs, ce] = scaled_sum(lo.chi, -lo.scale, hi.chi, -hi.scale);
      return {ps, pe, cs, ce};
    }
  }
  throw std::logic_error("boundary_pair: bad polarization");
}

std::complex<double> s_value(const Channel& c, double lambda) {
  const Aligned al = align(boundary_pair(c, lambda));
  const std::complex<double> xi2(al.u, al.v);
  const std::complex<double> xi1(al.u, -al.v);
  return -xi2 / xi1;
}

double phase_shift_principal(const Channel& c, double lambda) { return phase_point(c, lambda).principal; }

double phase_shift_derivative(const Channel& c, double lambda) { return phase_point(c, lambda).derivative; }

double phase_shift(const Channel& c, double lambda) {
  require_lambda(lambda);
  PhaseTracker t(c);
  if (lambda <= t.lambda()) return phase_shift_principal(c, lambda);
  t.advance_to(lambda, [](double, double, double) {});
  return t.delta();
}

double phase_shift_derivative_fd(const Channel& c, double lambda) {
  require_lambda(lambda);
  const double h = std::min(1e-3 / c.radius, 0.25 * lambda);
  auto central = [&](double step) {
    return wrap_pi(phase_shift_principal(c, lambda + step) - phase_shift_principal(c, lambda - step)) / (2.0 * step);
  };
  return (4.0 * central(0.5 * h) - central(h)) / 3.0;
}

PhaseShiftCurve trace_phase_shift(const Channel& c, std::span<const double> grid) {
  PhaseShiftCurve curve{c, {}};
  if (grid.empty()) return curve;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    require_lambda(grid[i]);
    if (i > 0 && !(grid[i] > grid[i - 1])) throw std::invalid_argument("trace_phase_shift: grid must increase");
  }

  PhaseTracker t(c);
  std::vector<PhaseSample> pending;
  for (double lam : grid) {
    if (lam <= t.lambda()) {
      const PhasePoint p = phase_point(c, lam);
      curve.samples.push_back({lam, p.principal, p.derivative});
      continue;
    }
    pending.clear();
    t.advance_to(lam, [&](double l, double d, double dd) { pending.push_back({l, d, dd}); });
    if (!curve.samples.empty() && std::fabs(t.delta() - curve.samples.back().delta) >= kPi / 2)
      curve.samples.insert(curve.samples.end(), pending.begin(), pending.end() - 1);
    curve.samples.push_back({lam, t.delta(), t.derivative()});
  }
  return curve;
}

std::string to_string(CavityFamily family) {
  switch (family) {
    case CavityFamily::DirichletScalar: return "dirichlet";
    case CavityFamily::MaxwellTE: return "maxwell-te";
    case CavityFamily::MaxwellTM: return "maxwell-tm";
  }
  return "?";
}

CavityFamily parse_cavity_family(const std::string& name) {
  const std::string n = lower(name);
  if (n == "dirichlet" || n == "dirichlet-scalar") return CavityFamily::DirichletScalar;
  if (n == "maxwell-te" || n == "te") return CavityFamily::MaxwellTE;
  if (n == "maxwell-tm" || n == "tm") return CavityFamily::MaxwellTM;
  throw std::invalid_argument("unknown cavity family '" + name + "' (dirichlet, maxwell-te, maxwell-tm)");
}

double InteriorSpectrum::weighted_sum(const TestFunction& f) const {
  double sum = 0.0;
  for (const auto& m : modes) sum += static_cast<double>(m.multiplicity) * f.weighted(m.mu);
  return sum;
}

InteriorSpectrum interior_eigenvalues(CavityFamily family, double radius, double cutoff) {
  if (!(radius > 0.0)) throw std::invalid_argument("interior_eigenvalues: radius must be positive");
  if (!(cutoff > 0.0) || !std::isfinite(cutoff)) throw std::invalid_argument("interior_eigenvalues: cutoff must be positive");

  InteriorSpectrum out;
  out.family = family;
  out.radius = radius;
  out.cutoff = cutoff;

  const double X = cutoff * radius;
  const double grid = 0.25 / radius;
  auto fail = [&](int l, const std::string& what) {
    std::ostringstream os;
    os << "interior_eigenvalues(" << to_string(family) << "): completeness check failed at l = " << l << ": " << what;
    throw std::runtime_error(os.str());
  };
  auto zeros = [&](const ZeroTarget& t, int l) {
    ZeroList z = find_zeros(t, 0.0, cutoff, grid);
    if (!z.anomalies.empty()) fail(l, "near-tangency in " + z.target);
    return z.values;
  };
  auto interlace = [](const std::vector<double>& inner, const std::vector<double>& outer) {
    // Each inner[k] lies in (outer[k-1], outer[k]).
    for (std::size_t k = 0; k < inner.size(); ++k) {
      if (k < outer.size() && !(inner[k] < outer[k])) return false;
      if (k > 0 && !(inner[k] > outer[k - 1])) return false;
    }
    return true;
  };

  const std::vector<double> psi0 = zeros(riccati_psi_target(0, radius), 0);
  const long expect0 = static_cast<long>(std::floor(X / kPi));
  const bool at_edge = std::fabs(X - std::round(X / kPi) * kPi) < 1e-9 * std::max(1.0, X);
  if (static_cast<long>(psi0.size()) != expect0 && !at_edge) fail(0, "psi_0 zero count differs from floor(x / pi)");

  std::vector<double> prev = psi0;
  const int first = family == CavityFamily::DirichletScalar ? 0 : 1;
  for (int l = 0;; ++l) {
    std::vector<double> psi = l == 0 ? psi0 : zeros(riccati_psi_target(l, radius), l);
    if (l > 0) {
      const std::size_t c = prev.size();
      if (!(psi.size() == c || psi.size() + 1 == c)) fail(l, "psi zero count does not interlace with l - 1");
      // Zeros of psi_l sit strictly between consecutive zeros of psi_{l-1}.
      for (std::size_t k = 0; k < psi.size(); ++k)
        if (!(psi[k] > prev[k]) || (k + 1 < prev.size() && !(psi[k] < prev[k + 1])))
          fail(l, "psi zeros do not interlace with l - 1");
    }

    bool any = !psi.empty();
    if (l >= first) {
      const long mult = 2L * l + 1;
      if (family == CavityFamily::MaxwellTM) {
        const std::vector<double> dpsi = zeros(riccati_dpsi_target(l, radius), l);
        if (!(dpsi.size() == psi.size() || dpsi.size() == psi.size() + 1))
          fail(l, "psi' zero count does not interlace with psi");
        if (!interlace(dpsi, psi)) fail(l, "psi' zeros do not interlace with psi");
        for (double mu : dpsi) out.modes.push_back({l, mu, mult});
        any = any || !dpsi.empty();
      } else {
        for (double mu : psi) out.modes.push_back({l, mu, mult});
      }
    }
    prev = std::move(psi);
    if (!any && l >= first) break;
  }
  return out;
}

std::string to_string(Operator q) { return q == Operator::DeltaD ? "delta-d" : "d-delta"; }

Operator parse_operator(const std::string& name) {
  const std::string n = lower(name);
  if (n == "delta-d" || n == "deltad" || n == "dd") return Operator::DeltaD;
  if (n == "d-delta" || n == "ddelta") return Operator::DDelta;
  throw std::invalid_argument("unknown operator '" + name + "' (delta-d, d-delta)");
}

int lmax_for_support(double x) {
  if (!(x >= 0.0)) throw std::invalid_argument("lmax_for_support: negative argument");
  return static_cast<int>(std::ceil(x + 4.0 * std::cbrt(x) + 8.0));
}

ChannelSelection channels_for(int p, Operator q, const TestFunction& f, double radius, double tail_tol,
                              std::optional<int> lmax_override) {
  if (p != 0 && p != 1) throw std::invalid_argument("channels_for: only p = 0 and p = 1 are supported");
  if (!(tail_tol > 0.0)) throw std::invalid_argument("channels_for: tail_tol must be positive");
  if (!(radius > 0.0)) throw std::invalid_argument("channels_for: radius must be positive");
  if (lmax_override && *lmax_override < 0) throw std::invalid_argument("channels_for: lmax must be >= 0");

  ChannelSelection sel;
  sel.p = p;
  sel.q = q;
  sel.radius = radius;
  sel.tail_tol = tail_tol;
  sel.support = std::isfinite(tail_tol) ? f.effective_support(tail_tol) : 0.0;
  sel.lmax = lmax_override ? *lmax_override : lmax_for_support(sel.support * radius);
  sel.lmax_overridden = lmax_override.has_value();

  // (polarization, lowest degree, extra factor in the low-energy law)
  struct Family {
    Polarization pol;
    int first;
    bool tm;
  };
  std::vector<Family> families;
  if (p == 0 && q == Operator::DeltaD) families.push_back({Polarization::Dirichlet, 0, false});
  if (p == 1 && q == Operator::DeltaD) {
    families.push_back({Polarization::Dirichlet, 1, false});
    families.push_back({Polarization::TM, 1, true});
  }
  if (p == 1 && q == Operator::DDelta) families.push_back({Polarization::Normal, 0, false});

  for (const auto& fam : families)
    for (int l = fam.first; l <= sel.lmax; ++l) sel.channels.push_back(make_channel(p, l, fam.pol, radius));

  // Omitted channels: |delta_l| <= c_l (lambda a)^{2l+1}, and after one
  // integration by parts each channel contributes at most
  // (1/pi) int |(lambda^2 f)'| |delta_l| dlambda.
  if (!f.is_zero() && !families.empty()) {
    const double top = f.integration_limit();
    double bound = 0.0;
    for (int l = sel.lmax + 1; l <= sel.lmax + 10; ++l) {
      const double log_c = -log_double_factorials(l);
      auto integrand = [&](double lam) {
        if (lam <= 0.0) return 0.0;
        return std::fabs(f.weighted_derivative(lam)) * std::exp(log_c + (2.0 * l + 1.0) * std::log(lam * radius));
      };
      const double integral = integrate_adaptive(integrand, 0.0, top, 1e-6, 1e-300).value / kPi;
      for (const auto& fam : families) {
        const double factor = fam.tm ? (l + 1.0) / l : 1.0;
        bound += 2.0 * (2.0 * l + 1.0) * factor * integral;
      }
    }
    sel.tail_bound = bound;
  }
  return sel;
}

}  // namespace relscat
