#include "relscat/bk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "parallel.hpp"
#include "relscat/quadrature.hpp"
#include "relscat/specfun.hpp"
#include "relscat/zeros.hpp"

namespace relscat {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kRootTolerance = 1e-13;

// Cross function sin(theta_A(lambda a) - theta(lambda L)) of the exterior box,
// where theta_A is the angle of the channel's boundary pair and theta that of
// (psi_l, chi_l) at the wall. Bisection only: no phase-derivative input.
ZeroTarget exterior_target(const Channel& c, double box_radius) {
  std::ostringstream name;
  name << "cross(" << c.label() << ", L=" << box_radius << ")";
  return {name.str(), [c, box_radius](double lambda) -> TargetSample {
            const BoundaryPair A = boundary_pair(c, lambda);
            const double sa = scaled_sine(A.psi, A.psi_exp, A.chi, A.chi_exp);
            const double ca = scaled_sine(A.chi, A.chi_exp, A.psi, A.psi_exp);
            const RiccatiValues w = riccati_values(c.degree, lambda * box_radius);
            const double sl = scaled_sine(w.psi, w.scale, w.chi, -w.scale);
            const double cl = scaled_sine(w.chi, -w.scale, w.psi, w.scale);
            return {sa * cl - ca * sl, std::numeric_limits<double>::quiet_NaN()};
          }};
}

void weyl_check(const Channel& c, double box_radius, double cutoff, std::size_t count, const char* kind) {
  const double expected = cutoff * box_radius / kPi;
  const double slack = cutoff * c.radius / kPi + 0.5 * c.degree + 2.0;
  if (std::fabs(static_cast<double>(count) - expected) > slack) {
    std::ostringstream os;
    os << "box_spectra: " << kind << " count " << count << " for " << c.label() << " at L = " << box_radius
       << " is outside the Weyl window " << expected << " +- " << slack;
    throw std::runtime_error(os.str());
  }
}

double spectral_difference(const std::vector<double>& ext, const std::vector<double>& free, const TestFunction& f) {
  // Pairing the k-th eigenvalues keeps the cancellation local.
  const std::size_t n = std::min(ext.size(), free.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) sum += f.weighted(ext[k]) - f.weighted(free[k]);
  for (std::size_t k = n; k < ext.size(); ++k) sum += f.weighted(ext[k]);
  for (std::size_t k = n; k < free.size(); ++k) sum -= f.weighted(free[k]);
  return sum;
}

ChannelRow evaluate_row(const Channel& c, const TestFunction& f, std::span<const double> boxes) {
  ChannelRow row;
  row.channel = c;
  row.integral = rhs_channel_integral(c, f);
  row.oracle = lhs_oracle_channel(c, f, boxes);
  row.residual = std::fabs(row.oracle.value - row.integral);
  row.tolerance = std::max(1e-3 * std::fabs(row.integral), 1e-5);
  row.passed = row.residual <= row.tolerance;
  return row;
}

std::string describe_error(const std::exception_ptr& e) {
  try {
    std::rethrow_exception(e);
  } catch (const std::exception& ex) {
    return ex.what();
  } catch (...) {
    return "unknown error";
  }
}

BKReport run_channels(BKReport report, const ChannelSelection& sel, const TestFunction& f, int threads) {
  report.lmax = sel.lmax;
  report.lmax_overridden = sel.lmax_overridden;
  report.support = sel.support;
  report.tail_bound = sel.tail_bound;
  report.integration_limit = f.integration_limit();

  std::vector<ChannelRow> rows(sel.channels.size());
  const auto errors = detail::parallel_for(sel.channels.size(), threads, [&](std::size_t i) {
    rows[i] = evaluate_row(sel.channels[i], f, report.box_radii);
  });

  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (errors[i]) {
      report.failure = sel.channels[i].label() + ": " + describe_error(errors[i]);
      break;
    }
    const double m = static_cast<double>(rows[i].channel.multiplicity);
    report.lhs_exterior += m * rows[i].oracle.value;
    report.lhs_error += m * rows[i].oracle.error_estimate;
    report.rhs_scattering += m * rows[i].integral;
    report.rows.push_back(std::move(rows[i]));
  }
  return report;
}

void finish(BKReport& r) {
  r.lhs_total = r.lhs_exterior + r.interior_sum;
  r.rhs_total = r.rhs_scattering + r.interior_sum;
  r.scattering_residual = std::fabs(r.lhs_exterior - r.rhs_scattering);
  r.residual = std::fabs(r.lhs_total - r.rhs_total);
  r.tolerance = std::max(1e-3 * std::fabs(r.rhs_scattering), 1e-12);
  const bool rows_ok = std::all_of(r.rows.begin(), r.rows.end(), [](const ChannelRow& row) { return row.passed; });
  r.passed = r.failure.empty() && rows_ok && r.scattering_residual <= r.tolerance;
}

void validate_boxes(const std::vector<double>& boxes, double radius) {
  if (boxes.size() < 3) throw std::invalid_argument("need at least three box radii");
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    if (!(boxes[i] > 2.0 * radius)) throw std::invalid_argument("box radii must exceed twice the obstacle radius");
    if (i > 0 && !(boxes[i] > boxes[i - 1])) throw std::invalid_argument("box radii must increase");
  }
}

}  // namespace

double rhs_channel_integral(const Channel& c, const TestFunction& f, DerivativeRoute route) {
  const double top = f.integration_limit();
  if (top <= 0.0) return 0.0;
  auto integrand = [&](double lambda) {
    const double d = route == DerivativeRoute::ClosedForm ? phase_shift_derivative(c, lambda)
                                                          : phase_shift_derivative_fd(c, lambda);
    return f.weighted(lambda) * d;
  };
  const int panels = std::max(16, static_cast<int>(std::ceil(4.0 * top * c.radius)));
  return integrate_adaptive(integrand, 0.0, top, 1e-9, 0.0, panels).value / kPi;
}

TraceIntegral rhs_trace_integral(int p, Operator q, const TestFunction& f, double radius, double tail_tol,
                                 std::optional<int> lmax_override, int threads) {
  TraceIntegral out;
  out.selection = channels_for(p, q, f, radius, tail_tol, lmax_override);
  const auto& chans = out.selection.channels;
  std::vector<double> values(chans.size());
  const auto errors =
      detail::parallel_for(chans.size(), threads, [&](std::size_t i) { values[i] = rhs_channel_integral(chans[i], f); });
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  for (std::size_t i = 0; i < chans.size(); ++i) {
    out.channels.push_back({chans[i], values[i]});
    out.value += static_cast<double>(chans[i].multiplicity) * values[i];
  }
  return out;
}

std::pair<BoxSpectrum, BoxSpectrum> box_spectra(const Channel& c, double box_radius, double cutoff) {
  if (!(box_radius > 2.0 * c.radius)) throw std::invalid_argument("box_spectra: need L > 2a");
  if (!(cutoff >= 0.0) || !std::isfinite(cutoff)) throw std::invalid_argument("box_spectra: bad cutoff");

  BoxSpectrum ext{c, box_radius, true, cutoff, {}};
  BoxSpectrum free{c, box_radius, false, cutoff, {}};
  if (cutoff == 0.0) return {ext, free};

  // Eigenvalue spacing is about pi / L; a quarter of that brackets every root.
  const double grid = kPi / (4.0 * box_radius);
  ZeroList ze = find_zeros(exterior_target(c, box_radius), 0.0, cutoff, grid, kRootTolerance);
  ZeroList zf = find_zeros(riccati_psi_target(c.degree, box_radius), 0.0, cutoff, grid, kRootTolerance);
  for (const ZeroList* z : {&ze, &zf})
    if (!z->anomalies.empty()) {
      std::ostringstream os;
      os << "box_spectra: unbracketed near-double root of " << z->target << " near lambda = " << z->anomalies.front();
      throw std::runtime_error(os.str());
    }
  ext.eigenvalues = std::move(ze.values);
  free.eigenvalues = std::move(zf.values);
  weyl_check(c, box_radius, cutoff, ext.eigenvalues.size(), "exterior");
  weyl_check(c, box_radius, cutoff, free.eigenvalues.size(), "free");
  return {ext, free};
}

OracleResult lhs_oracle_channel(const Channel& c, const TestFunction& f, std::span<const double> box_radii) {
  const std::vector<double> boxes(box_radii.begin(), box_radii.end());
  validate_boxes(boxes, c.radius);

  OracleResult out;
  out.box_radii = boxes;
  const double cutoff = f.integration_limit();
  double slope_bound = 0.0;  // max |(lambda^2 f)'| over the eigenvalues used
  for (double L : boxes) {
    const auto [ext, free] = box_spectra(c, L, cutoff);
    out.raw.push_back(spectral_difference(ext.eigenvalues, free.eigenvalues, f));
    for (const auto* list : {&ext.eigenvalues, &free.eigenvalues})
      for (double lam : *list) slope_bound = std::max(slope_bound, std::fabs(f.weighted_derivative(lam)));
    out.exterior_counts.push_back(ext.eigenvalues.size());
    out.free_counts.push_back(free.eigenvalues.size());
  }

  // Neville tableau in h = 1/L towards h = 0.
  const std::size_t n = boxes.size();
  std::vector<std::vector<double>> T(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    T[i][0] = out.raw[i];
    for (std::size_t j = 1; j <= i; ++j) {
      const double hi = 1.0 / boxes[i];
      const double hj = 1.0 / boxes[i - j];
      T[i][j] = T[i][j - 1] + (T[i][j - 1] - T[i - 1][j - 1]) * hi / (hj - hi);
    }
  }
  out.value = T[n - 1][n - 1];
  out.error_estimate = std::fabs(T[n - 1][n - 1] - T[n - 1][n - 2]);
  // Increments below the root-finding noise floor count as converged.
  for (std::size_t i = 2; i < n; ++i) {
    const double floor = 4.0 * kRootTolerance * slope_bound *
                         static_cast<double>(out.exterior_counts[i] + out.free_counts[i]);
    const double step = std::fabs(out.raw[i] - out.raw[i - 1]);
    if (step > floor && step > std::fabs(out.raw[i - 1] - out.raw[i - 2])) out.monotone = false;
  }
  return out;
}

std::vector<double> default_boxes(double radius) { return {100.0 * radius, 200.0 * radius, 400.0 * radius}; }

BKReport theorem_b2_check(double radius, const TestFunction& f, double tail_tol, std::vector<double> box_radii,
                          const BKOptions& opts) {
  validate_boxes(box_radii, radius);
  const ChannelSelection sel = channels_for(1, Operator::DeltaD, f, radius, tail_tol, opts.lmax);

  BKReport r;
  r.mode = "maxwell";
  r.p = 1;
  r.q = Operator::DeltaD;
  r.radius = radius;
  r.test_function = f.describe();
  r.tail_tol = tail_tol;
  r.box_radii = std::move(box_radii);
  r = run_channels(std::move(r), sel, f, opts.threads);

  const double cutoff = f.integration_limit();
  if (r.failure.empty() && cutoff > 0.0) {
    for (CavityFamily fam : {CavityFamily::MaxwellTE, CavityFamily::MaxwellTM}) {
      InteriorTerm term{interior_eigenvalues(fam, radius, cutoff), 0.0};
      term.sum = term.spectrum.weighted_sum(f);
      r.interior_sum += term.sum;
      r.interior.push_back(std::move(term));
    }
  }
  r.interior_note =
      "interior cavity sums are computed once and added to both sides, so residual equals scattering_residual";
  finish(r);
  return r;
}

BKReport theorem_main_check(int p, Operator q, double radius, const TestFunction& f, double tail_tol,
                            std::vector<double> box_radii, const BKOptions& opts) {
  if (p != 0 && p != 1) throw std::invalid_argument("theorem_main_check: p must be 0 or 1");
  validate_boxes(box_radii, radius);
  const ChannelSelection sel = channels_for(p, q, f, radius, tail_tol, opts.lmax);

  BKReport r;
  r.mode = "forms";
  r.p = p;
  r.q = q;
  r.radius = radius;
  r.test_function = f.describe();
  r.tail_tol = tail_tol;
  r.box_radii = std::move(box_radii);
  r = run_channels(std::move(r), sel, f, opts.threads);
  r.interior_note = "exterior identity only: no interior term";
  finish(r);
  return r;
}

}  // namespace relscat
