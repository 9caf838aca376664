#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace relscat {

using Rational = mpq_class;

/// Exponent vector packed eight bits per variable (variable j in bits 8j..8j+7).
using Monomial = std::uint64_t;
/// Increasing index tuple I of dx^I, stored as a bitmask over dx^1..dx^d.
using FormIndex = std::uint32_t;

constexpr int kMaxFormDim = 8;

Monomial make_monomial(std::span<const int> exponents);
int exponent(Monomial m, int var);
int monomial_degree(Monomial m);
std::vector<int> form_index_tuple(FormIndex I);

/// Exact multivariate polynomial over Q in `dim` variables. Zero
/// coefficients are never stored.
class Polynomial {
public:
  using Terms = std::map<Monomial, Rational>;

  explicit Polynomial(int dim = 0);

  static Polynomial constant(int dim, const Rational& c);
  static Polynomial coordinate(int dim, int var);
  static Polynomial radius_squared(int dim);
  static Polynomial monomial(int dim, std::span<const int> exponents, const Rational& c = 1);

  int dim() const noexcept { return dim_; }
  const Terms& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  /// Common degree of all terms; nullopt for the zero polynomial or mixed degrees.
  std::optional<int> homogeneous_degree() const;
  std::set<int> degrees() const;
  Polynomial homogeneous_part(int degree) const;

  void add_term(Monomial m, const Rational& c);

  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  Polynomial& operator*=(const Rational& c);
  Polynomial operator*(const Polynomial& other) const;
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, const Rational& c) { return a *= c; }
  bool operator==(const Polynomial& other) const { return dim_ == other.dim_ && terms_ == other.terms_; }

  Polynomial times_coordinate(int var) const;
  Polynomial times_radius_squared() const;
  Polynomial derivative(int var) const;
  Polynomial laplacian() const;

  std::string to_string() const;

private:
  int dim_;
  Terms terms_;
};

/// Polynomial coefficients in the exterior algebra: sum_I p_I(x) dx^I.
class FormPolynomial {
public:
  using Components = std::map<FormIndex, Polynomial>;

  explicit FormPolynomial(int dim = 0);

  static FormPolynomial scalar(const Polynomial& p);
  static FormPolynomial basis(int dim, FormIndex I, const Polynomial& coefficient);

  int dim() const noexcept { return dim_; }
  const Components& components() const noexcept { return components_; }
  bool is_zero() const noexcept { return components_.empty(); }
  std::optional<int> homogeneous_degree() const;
  std::set<int> degrees() const;
  std::set<int> form_degrees() const;
  FormPolynomial homogeneous_part(int degree) const;

  void add(FormIndex I, const Polynomial& p);

  FormPolynomial& operator+=(const FormPolynomial& other);
  FormPolynomial& operator-=(const FormPolynomial& other);
  FormPolynomial& operator*=(const Rational& c);
  friend FormPolynomial operator+(FormPolynomial a, const FormPolynomial& b) { return a += b; }
  friend FormPolynomial operator-(FormPolynomial a, const FormPolynomial& b) { return a -= b; }
  friend FormPolynomial operator*(FormPolynomial a, const Rational& c) { return a *= c; }
  bool operator==(const FormPolynomial& other) const {
    return dim_ == other.dim_ && components_ == other.components_;
  }

  FormPolynomial times_radius_squared() const;

  std::string to_string() const;

private:
  int dim_;
  Components components_;
};

/// Flat Laplacian, componentwise.
FormPolynomial laplacian(const FormPolynomial& f);
/// theta = dr ^ = sum_j x^j e_j ^ (the r = 1 identification of dr).
FormPolynomial theta(const FormPolynomial& f);
/// theta* = iota_dr = sum_j x^j iota_{e_j}.
FormPolynomial theta_star(const FormPolynomial& f);
/// P = theta* theta, the tangential projection on the unit sphere.
FormPolynomial tangential_projection(const FormPolynomial& f);

struct HarmonicComponent {
  int k;             ///< power of |x|^2
  FormPolynomial h;  ///< harmonic, homogeneous of degree (degree - 2k)
};

/// p = sum_k |x|^{2k} h_k with every h_k harmonic.
struct HarmonicDecomposition {
  int dim = 0;
  int degree = 0;
  std::vector<HarmonicComponent> components;

  FormPolynomial reassemble() const;
};

/// Exact split of a homogeneous form polynomial into |x|^{2k} times harmonics.
/// Throws std::invalid_argument for inhomogeneous input.
HarmonicDecomposition harmonic_project(const FormPolynomial& f, int degree);

/// Canonical representative modulo the ideal (|x|^2 - 1): the harmonic
/// pieces of every homogeneous part, collected by their own degree.
std::map<int, FormPolynomial> reduce_on_sphere(const FormPolynomial& f);
bool equal_on_sphere(const FormPolynomial& a, const FormPolynomial& b);

/// dim H_l(S^{d-1}) from the closed formula.
long harmonic_dim(int dim, int degree);
/// Kernel basis of the Laplacian on degree-l monomials, from an exact
/// reduced row echelon form (columns ordered by descending x1 exponent).
std::vector<Polynomial> harmonic_basis(int dim, int degree);

enum class ChannelFamily { Tangential1, Tangential2, Normal };
std::string to_string(ChannelFamily family);

struct ChannelMultiplicity {
  int dim;
  int p;
  int degree;
  ChannelFamily family;
  long count;
};

/// Partial-wave block sizes of the scattering matrix on p-forms over S^2
/// (d = 3 only). For p = 1: both tangential families have 2l+1 members for
/// l >= 1 and the normal family 2l+1 for l >= 0.
std::vector<ChannelMultiplicity> channel_multiplicities(int dim, int p, int degree);

struct DegreeShiftReport {
  int dim = 0;
  int p = 0;
  int degree = 0;
  long harmonic_dim = 0;  ///< dim H_l(S^{d-1}), from the enumerated basis
  long basis_size = 0;    ///< dim H_l times dim Lambda^p
  std::set<int> occurring_degrees;
  bool reassembly_exact = true;
  bool components_harmonic = true;
  bool passed = true;
  std::string failure;
};

/// Applies P to every element h dx^I of a basis of H_l(S^{d-1}, Lambda^p),
/// reduces modulo |x|^2 - 1, and checks that only degrees l-2, l, l+2 occur.
DegreeShiftReport degree_shift_check(int dim, int p, int degree);
DegreeShiftReport degree_shift_check(int dim, int p, int degree, const std::vector<Polynomial>& basis);

}  // namespace relscat
