#pragma once

#include "relscat/test_function.hpp"

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace relscat {

/// Radial boundary condition of a channel at the obstacle. Dirichlet is the
/// scalar condition and the TE family on one-forms; TM is the Riccati
/// derivative condition; Normal is the dr-component of a one-form.
enum class Polarization { Dirichlet, TM, Normal };

std::string to_string(Polarization pol);
/// Accepts dirichlet, te, tm, normal.
Polarization parse_polarization(const std::string& name);

struct Channel {
  int p = 0;
  int degree = 0;
  Polarization pol = Polarization::Dirichlet;
  double radius = 1.0;
  long multiplicity = 1;

  std::string label() const;
};

/// Validated channel with multiplicity 2l+1. Only p = 0 (Dirichlet) and
/// p = 1 (Dirichlet/TE and TM for l >= 1, Normal for l >= 0) are built.
Channel make_channel(int p, int degree, Polarization pol, double radius);

/// Boundary data (A_psi, A_chi) of a channel at x = lambda a, each a
/// mantissa times a power of two. The channel's S-value is
/// -(A_psi + i A_chi) / (A_psi - i A_chi).
struct BoundaryPair {
  double psi = 0.0;
  int psi_exp = 0;
  double chi = 0.0;
  int chi_exp = 0;
};

BoundaryPair boundary_pair(const Channel& c, double lambda);

std::complex<double> s_value(const Channel& c, double lambda);

/// atan(-A_psi / A_chi), the phase shift modulo pi in [-pi/2, pi/2].
double phase_shift_principal(const Channel& c, double lambda);
/// Continuous branch with delta(0+) = 0.
double phase_shift(const Channel& c, double lambda);
/// Closed form from the Wronskian.
double phase_shift_derivative(const Channel& c, double lambda);
/// Central differences of the principal branch (wrapped mod pi) with one
/// Richardson step; independent of the closed form.
double phase_shift_derivative_fd(const Channel& c, double lambda);

struct PhaseSample {
  double lambda;
  double delta;
  double derivative;
};

struct PhaseShiftCurve {
  Channel channel;
  std::vector<PhaseSample> samples;
};

/// Samples on an increasing positive grid. Extra samples are inserted where
/// the phase moves by pi/2 or more between requested points.
PhaseShiftCurve trace_phase_shift(const Channel& c, std::span<const double> grid);

enum class CavityFamily { DirichletScalar, MaxwellTE, MaxwellTM };

std::string to_string(CavityFamily family);
/// Accepts dirichlet, maxwell-te, maxwell-tm.
CavityFamily parse_cavity_family(const std::string& name);

struct InteriorMode {
  int degree;
  double mu;
  long multiplicity;
};

struct InteriorSpectrum {
  CavityFamily family = CavityFamily::DirichletScalar;
  double radius = 1.0;
  double cutoff = 0.0;
  std::vector<InteriorMode> modes;  ///< sorted by (degree, mu)

  /// Sum of multiplicity * mu^2 f(mu), in mode order.
  double weighted_sum(const TestFunction& f) const;
};

/// All cavity eigenvalue parameters mu <= cutoff. Completeness is checked by
/// the interlacing of Riccati zeros between neighbouring degrees; a failed
/// count throws std::runtime_error.
InteriorSpectrum interior_eigenvalues(CavityFamily family, double radius, double cutoff);

enum class Operator { DeltaD, DDelta };

std::string to_string(Operator q);
/// Accepts delta-d and d-delta.
Operator parse_operator(const std::string& name);

struct ChannelSelection {
  int p = 0;
  Operator q = Operator::DeltaD;
  double radius = 1.0;
  double tail_tol = 0.0;
  double support = 0.0;   ///< Lambda_f at level tail_tol
  int lmax = 0;
  bool lmax_overridden = false;
  double tail_bound = 0.0;  ///< bound on the omitted channels' total contribution
  std::vector<Channel> channels;
};

/// ceil(x + 4 x^{1/3} + 8) for x = Lambda_f a.
int lmax_for_support(double support_times_radius);

/// Channels of form degree p for the operator q, with degree up to lmax.
/// p = 0, delta-d: Dirichlet; p = 0, d-delta: none (the Laplacian on
/// functions is delta-d alone); p = 1, delta-d: TE and TM; p = 1, d-delta: Normal.
ChannelSelection channels_for(int p, Operator q, const TestFunction& f, double radius, double tail_tol,
                              std::optional<int> lmax_override = std::nullopt);

}  // namespace relscat
