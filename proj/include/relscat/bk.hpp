#pragma once

#include "relscat/mie.hpp"
#include "relscat/test_function.hpp"

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace relscat {

/// Which delta' evaluation feeds the channel integral.
enum class DerivativeRoute { ClosedForm, FiniteDifference };

/// (1/pi) int_0^inf lambda^2 f(lambda) delta'(lambda) dlambda for one channel,
/// multiplicity not applied. Relative tolerance 1e-9; throws QuadratureError
/// with panel diagnostics when the adaptive rule cannot meet it.
double rhs_channel_integral(const Channel& c, const TestFunction& f,
                            DerivativeRoute route = DerivativeRoute::ClosedForm);

struct ChannelIntegral {
  Channel channel;
  double value = 0.0;  ///< without multiplicity
};

struct TraceIntegral {
  ChannelSelection selection;
  std::vector<ChannelIntegral> channels;
  double value = 0.0;  ///< sum of multiplicity * channel value, in channel order
};

/// Sum over the channels selected by channels_for.
TraceIntegral rhs_trace_integral(int p, Operator q, const TestFunction& f, double radius, double tail_tol,
                                 std::optional<int> lmax_override = std::nullopt, int threads = 1);

struct BoxSpectrum {
  Channel channel;
  double box_radius = 0.0;
  bool exterior = false;
  double cutoff = 0.0;
  std::vector<double> eigenvalues;  ///< each carries channel.multiplicity
};

/// Eigenvalue parameters lambda <= cutoff of the channel on (a, L) with a
/// Dirichlet wall at L (exterior) and of the free problem on (0, L).
std::pair<BoxSpectrum, BoxSpectrum> box_spectra(const Channel& c, double box_radius, double cutoff);

struct OracleResult {
  double value = 0.0;           ///< extrapolated to 1/L -> 0, without multiplicity
  double error_estimate = 0.0;  ///< last Richardson increment
  bool monotone = true;         ///< raw differences shrink with L
  std::vector<double> box_radii;
  std::vector<double> raw;  ///< spectral difference per box
  std::vector<std::size_t> exterior_counts;
  std::vector<std::size_t> free_counts;
};

/// Per channel: sum_ext lambda^2 f - sum_free lambda^2 f for each box
/// radius, Neville-extrapolated in 1/L. Needs at least three increasing radii.
OracleResult lhs_oracle_channel(const Channel& c, const TestFunction& f, std::span<const double> box_radii);

/// Box radii {100a, 200a, 400a}.
std::vector<double> default_boxes(double radius);

struct ChannelRow {
  Channel channel;
  double integral = 0.0;
  OracleResult oracle;
  double residual = 0.0;   ///< |oracle - integral|
  double tolerance = 0.0;  ///< max(1e-3 |integral|, 1e-5)
  bool passed = false;
};

struct InteriorTerm {
  InteriorSpectrum spectrum;
  double sum = 0.0;  ///< sum of multiplicity * mu^2 f(mu)
};

struct BKReport {
  std::string mode;  ///< "maxwell" or "forms"
  int p = 1;
  Operator q = Operator::DeltaD;
  double radius = 1.0;
  std::string test_function;
  double tail_tol = 0.0;
  int lmax = 0;
  bool lmax_overridden = false;
  double support = 0.0;
  double integration_limit = 0.0;
  std::vector<double> box_radii;

  std::vector<ChannelRow> rows;
  double lhs_exterior = 0.0;     ///< sum of multiplicity * oracle value
  double lhs_error = 0.0;        ///< sum of multiplicity * oracle error estimate
  double rhs_scattering = 0.0;   ///< sum of multiplicity * channel integral
  double tail_bound = 0.0;

  std::vector<InteriorTerm> interior;
  double interior_sum = 0.0;
  std::string interior_note;

  double lhs_total = 0.0;
  double rhs_total = 0.0;
  double scattering_residual = 0.0;  ///< |lhs_exterior - rhs_scattering|
  double residual = 0.0;             ///< |lhs_total - rhs_total|
  double tolerance = 0.0;            ///< 1e-3 |rhs_scattering|, floored at 1e-12
  bool passed = false;

  /// Set when a channel failed; the rows before it are kept.
  std::string failure;
};

struct BKOptions {
  std::optional<int> lmax;
  int threads = 1;
};

/// Maxwell identity on one-forms: TE and TM channels plus the interior
/// cavity spectrum, which enters both sides through the same sum.
BKReport theorem_b2_check(double radius, const TestFunction& f, double tail_tol, std::vector<double> box_radii,
                          const BKOptions& opts = {});

/// Forms identity for p in {0, 1} and Q in {delta-d, d-delta}; there is no
/// interior term.
BKReport theorem_main_check(int p, Operator q, double radius, const TestFunction& f, double tail_tol,
                            std::vector<double> box_radii, const BKOptions& opts = {});

}  // namespace relscat
