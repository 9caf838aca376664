#include "relscat/formsphere.hpp"

#include <algorithm>
#include <bit>
#include <sstream>
#include <stdexcept>

namespace relscat {

namespace {

constexpr int kBits = 8;
constexpr Monomial kUnit = 1;

Monomial unit(int var) { return kUnit << (kBits * var); }

void check_dim(int dim) {
  if (dim < 1 || dim > kMaxFormDim)
    throw std::invalid_argument("form polynomials support 1 <= d <= " + std::to_string(kMaxFormDim));
}

// Number of indices in I below `var`: the sign of moving e_var into place.
int sign_before(FormIndex I, int var) {
  const FormIndex below = I & ((FormIndex{1} << var) - 1);
  return (std::popcount(below) % 2 == 0) ? 1 : -1;
}

// All degree-n monomials in `dim` variables, by descending exponent of x1,
// then descending x2, and so on.
void enumerate_monomials(int dim, int var, int remaining, std::vector<int>& exps, std::vector<Monomial>& out) {
  if (var == dim - 1) {
    exps[var] = remaining;
    out.push_back(make_monomial(exps));
    return;
  }
  for (int e = remaining; e >= 0; --e) {
    exps[var] = e;
    enumerate_monomials(dim, var + 1, remaining - e, exps, out);
  }
}

std::vector<Monomial> monomials_of_degree(int dim, int degree) {
  std::vector<Monomial> out;
  if (degree < 0) return out;
  std::vector<int> exps(dim, 0);
  enumerate_monomials(dim, 0, degree, exps, out);
  return out;
}

long binomial(long n, long k) {
  if (k < 0 || n < k) return 0;
  long r = 1;
  for (long i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

std::string monomial_string(Monomial m, int dim) {
  std::string s;
  for (int v = 0; v < dim; ++v) {
    const int e = exponent(m, v);
    if (e == 0) continue;
    if (!s.empty()) s += "*";
    s += "x" + std::to_string(v + 1);
    if (e > 1) s += "^" + std::to_string(e);
  }
  return s;
}

}  // namespace

Monomial make_monomial(std::span<const int> exponents) {
  if (exponents.size() > static_cast<std::size_t>(kMaxFormDim))
    throw std::invalid_argument("make_monomial: too many variables");
  Monomial m = 0;
  for (std::size_t v = 0; v < exponents.size(); ++v) {
    if (exponents[v] < 0 || exponents[v] > 255) throw std::invalid_argument("make_monomial: exponent out of range");
    m |= static_cast<Monomial>(exponents[v]) << (kBits * v);
  }
  return m;
}

int exponent(Monomial m, int var) { return static_cast<int>((m >> (kBits * var)) & 0xFF); }

int monomial_degree(Monomial m) {
  int d = 0;
  for (int v = 0; v < kMaxFormDim; ++v) d += exponent(m, v);
  return d;
}

std::vector<int> form_index_tuple(FormIndex I) {
  std::vector<int> out;
  for (int v = 0; v < 32; ++v)
    if (I & (FormIndex{1} << v)) out.push_back(v + 1);
  return out;
}

// ---------------------------------------------------------------------------
// Polynomial

Polynomial::Polynomial(int dim) : dim_(dim) {}

Polynomial Polynomial::constant(int dim, const Rational& c) {
  Polynomial p(dim);
  p.add_term(0, c);
  return p;
}

Polynomial Polynomial::coordinate(int dim, int var) {
  Polynomial p(dim);
  p.add_term(unit(var), 1);
  return p;
}

Polynomial Polynomial::radius_squared(int dim) {
  Polynomial p(dim);
  for (int v = 0; v < dim; ++v) p.add_term(2 * unit(v), 1);
  return p;
}

Polynomial Polynomial::monomial(int dim, std::span<const int> exponents, const Rational& c) {
  if (static_cast<int>(exponents.size()) != dim) throw std::invalid_argument("Polynomial::monomial: wrong arity");
  Polynomial p(dim);
  p.add_term(make_monomial(exponents), c);
  return p;
}

std::optional<int> Polynomial::homogeneous_degree() const {
  if (terms_.empty()) return std::nullopt;
  const int d = monomial_degree(terms_.begin()->first);
  for (const auto& [m, c] : terms_)
    if (monomial_degree(m) != d) return std::nullopt;
  return d;
}

std::set<int> Polynomial::degrees() const {
  std::set<int> out;
  for (const auto& [m, c] : terms_) out.insert(monomial_degree(m));
  return out;
}

Polynomial Polynomial::homogeneous_part(int degree) const {
  Polynomial out(dim_);
  for (const auto& [m, c] : terms_)
    if (monomial_degree(m) == degree) out.terms_.emplace_hint(out.terms_.end(), m, c);
  return out;
}

void Polynomial::add_term(Monomial m, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  for (const auto& [m, c] : other.terms_) add_term(m, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
  for (const auto& [m, c] : other.terms_) add_term(m, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(const Rational& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, v] : terms_) v *= c;
  return *this;
}

Polynomial Polynomial::operator*(const Polynomial& other) const {
  Polynomial out(std::max(dim_, other.dim_));
  for (const auto& [ma, ca] : terms_)
    for (const auto& [mb, cb] : other.terms_) out.add_term(ma + mb, ca * cb);
  return out;
}

Polynomial Polynomial::times_coordinate(int var) const {
  Polynomial out(dim_);
  const Monomial u = unit(var);
  for (const auto& [m, c] : terms_) out.terms_.emplace(m + u, c);
  return out;
}

Polynomial Polynomial::times_radius_squared() const {
  Polynomial out(dim_);
  for (int v = 0; v < dim_; ++v) {
    const Monomial u = 2 * unit(v);
    for (const auto& [m, c] : terms_) out.add_term(m + u, c);
  }
  return out;
}

Polynomial Polynomial::derivative(int var) const {
  Polynomial out(dim_);
  const Monomial u = unit(var);
  for (const auto& [m, c] : terms_) {
    const int e = exponent(m, var);
    if (e > 0) out.terms_.emplace(m - u, c * e);
  }
  return out;
}

Polynomial Polynomial::laplacian() const {
  Polynomial out(dim_);
  for (int v = 0; v < dim_; ++v) {
    const Monomial u2 = 2 * unit(v);
    for (const auto& [m, c] : terms_) {
      const int e = exponent(m, v);
      if (e >= 2) out.add_term(m - u2, c * (e * (e - 1)));
    }
  }
  return out;
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [m, c] = *it;
    Rational mag = abs(c);
    if (first) {
      if (c < 0) os << "-";
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    first = false;
    const std::string mono = monomial_string(m, dim_);
    if (mono.empty()) {
      os << mag.get_str();
    } else {
      if (mag != 1) os << mag.get_str() << "*";
      os << mono;
    }
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// FormPolynomial

FormPolynomial::FormPolynomial(int dim) : dim_(dim) { check_dim(dim); }

FormPolynomial FormPolynomial::scalar(const Polynomial& p) { return basis(p.dim(), 0, p); }

FormPolynomial FormPolynomial::basis(int dim, FormIndex I, const Polynomial& coefficient) {
  FormPolynomial f(dim);
  f.add(I, coefficient);
  return f;
}

std::optional<int> FormPolynomial::homogeneous_degree() const {
  std::optional<int> deg;
  for (const auto& [I, p] : components_) {
    const auto d = p.homogeneous_degree();
    if (!d || (deg && *deg != *d)) return std::nullopt;
    deg = d;
  }
  return deg;
}

std::set<int> FormPolynomial::degrees() const {
  std::set<int> out;
  for (const auto& [I, p] : components_) out.merge(p.degrees());
  return out;
}

std::set<int> FormPolynomial::form_degrees() const {
  std::set<int> out;
  for (const auto& [I, p] : components_) out.insert(std::popcount(I));
  return out;
}

FormPolynomial FormPolynomial::homogeneous_part(int degree) const {
  FormPolynomial out(dim_);
  for (const auto& [I, p] : components_) out.add(I, p.homogeneous_part(degree));
  return out;
}

void FormPolynomial::add(FormIndex I, const Polynomial& p) {
  if (p.is_zero()) return;
  if (I >> dim_) throw std::invalid_argument("FormPolynomial::add: index outside dx^1..dx^d");
  auto [it, inserted] = components_.try_emplace(I, p);
  if (!inserted) {
    it->second += p;
    if (it->second.is_zero()) components_.erase(it);
  }
}

FormPolynomial& FormPolynomial::operator+=(const FormPolynomial& other) {
  for (const auto& [I, p] : other.components_) add(I, p);
  return *this;
}

FormPolynomial& FormPolynomial::operator-=(const FormPolynomial& other) {
  for (const auto& [I, p] : other.components_) add(I, p * Rational(-1));
  return *this;
}

FormPolynomial& FormPolynomial::operator*=(const Rational& c) {
  if (c == 0) {
    components_.clear();
    return *this;
  }
  for (auto& [I, p] : components_) p *= c;
  return *this;
}

FormPolynomial FormPolynomial::times_radius_squared() const {
  FormPolynomial out(dim_);
  for (const auto& [I, p] : components_) out.components_.emplace(I, p.times_radius_squared());
  return out;
}

std::string FormPolynomial::to_string() const {
  if (components_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [I, p] : components_) {
    if (!first) os << " + ";
    first = false;
    os << "(" << p.to_string() << ")";
    const auto idx = form_index_tuple(I);
    for (std::size_t k = 0; k < idx.size(); ++k) os << (k == 0 ? " " : "^") << "dx" << idx[k];
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Operators

FormPolynomial laplacian(const FormPolynomial& f) {
  FormPolynomial out(f.dim());
  for (const auto& [I, p] : f.components()) out.add(I, p.laplacian());
  return out;
}

FormPolynomial theta(const FormPolynomial& f) {
  FormPolynomial out(f.dim());
  for (const auto& [I, p] : f.components()) {
    for (int j = 0; j < f.dim(); ++j) {
      const FormIndex bit = FormIndex{1} << j;
      if (I & bit) continue;
      Polynomial term = p.times_coordinate(j);
      if (sign_before(I, j) < 0) term *= Rational(-1);
      out.add(I | bit, term);
    }
  }
  return out;
}

FormPolynomial theta_star(const FormPolynomial& f) {
  FormPolynomial out(f.dim());
  for (const auto& [I, p] : f.components()) {
    for (int j = 0; j < f.dim(); ++j) {
      const FormIndex bit = FormIndex{1} << j;
      if (!(I & bit)) continue;
      Polynomial term = p.times_coordinate(j);
      if (sign_before(I, j) < 0) term *= Rational(-1);
      out.add(I & ~bit, term);
    }
  }
  return out;
}

FormPolynomial tangential_projection(const FormPolynomial& f) { return theta_star(theta(f)); }

// ---------------------------------------------------------------------------
// Harmonic decomposition

FormPolynomial HarmonicDecomposition::reassemble() const {
  FormPolynomial out(dim);
  for (const auto& [k, h] : components) {
    FormPolynomial term = h;
    for (int i = 0; i < k; ++i) term = term.times_radius_squared();
    out += term;
  }
  return out;
}

namespace {

// Laplacian of |x|^{2k} h for h harmonic of degree m is
// 2k (d + 2m + 2k - 2) |x|^{2k-2} h; peel components off from the top.
std::vector<HarmonicComponent> decompose(const FormPolynomial& f, int degree) {
  std::vector<HarmonicComponent> out;
  if (f.is_zero()) return out;
  if (degree < 2) {
    out.push_back({0, f});
    return out;
  }
  const int d = f.dim();
  const auto lower = decompose(laplacian(f), degree - 2);

  FormPolynomial remainder = f;
  std::vector<HarmonicComponent> higher;
  for (const auto& [j, g] : lower) {
    const int k = j + 1;
    const Rational denom = 2 * k * (d + 2 * degree - 2 * k - 2);
    FormPolynomial h = g * (Rational(1) / denom);
    FormPolynomial lifted = h;
    for (int i = 0; i < k; ++i) lifted = lifted.times_radius_squared();
    remainder -= lifted;
    higher.push_back({k, std::move(h)});
  }
  if (!remainder.is_zero()) out.push_back({0, std::move(remainder)});
  for (auto& c : higher) out.push_back(std::move(c));
  return out;
}

}  // namespace

HarmonicDecomposition harmonic_project(const FormPolynomial& f, int degree) {
  if (!f.is_zero()) {
    const auto deg = f.homogeneous_degree();
    if (!deg || *deg != degree)
      throw std::invalid_argument("harmonic_project: input is not homogeneous of degree " + std::to_string(degree));
  }
  return {f.dim(), degree, decompose(f, degree)};
}

std::map<int, FormPolynomial> reduce_on_sphere(const FormPolynomial& f) {
  std::map<int, FormPolynomial> out;
  for (const int n : f.degrees()) {
    const auto dec = harmonic_project(f.homogeneous_part(n), n);
    for (const auto& [k, h] : dec.components) {
      auto [it, inserted] = out.try_emplace(n - 2 * k, h);
      if (!inserted) {
        it->second += h;
        if (it->second.is_zero()) out.erase(it);
      }
    }
  }
  return out;
}

bool equal_on_sphere(const FormPolynomial& a, const FormPolynomial& b) {
  return reduce_on_sphere(a - b).empty();
}

// ---------------------------------------------------------------------------
// Harmonic bases and dimensions

long harmonic_dim(int dim, int degree) {
  if (dim < 2) throw std::invalid_argument("harmonic_dim: d >= 2 required");
  if (degree < 0) return 0;
  return binomial(degree + dim - 1, dim - 1) - binomial(degree + dim - 3, dim - 1);
}

std::vector<Polynomial> harmonic_basis(int dim, int degree) {
  check_dim(dim);
  if (degree < 0) return {};
  const auto cols = monomials_of_degree(dim, degree);
  if (degree < 2) {
    std::vector<Polynomial> out;
    for (const Monomial m : cols) {
      Polynomial p(dim);
      p.add_term(m, 1);
      out.push_back(std::move(p));
    }
    return out;
  }
  const auto rows_m = monomials_of_degree(dim, degree - 2);
  std::map<Monomial, int> row_of;
  for (std::size_t i = 0; i < rows_m.size(); ++i) row_of[rows_m[i]] = static_cast<int>(i);

  // Sparse Laplacian matrix, one map per row keyed by column position.
  std::vector<std::map<int, Rational>> rows(rows_m.size());
  for (std::size_t c = 0; c < cols.size(); ++c) {
    for (int v = 0; v < dim; ++v) {
      const int e = exponent(cols[c], v);
      if (e < 2) continue;
      rows[row_of.at(cols[c] - 2 * unit(v))][static_cast<int>(c)] += e * (e - 1);
    }
  }

  // Reduced row echelon form; the pivot for each column is the first
  // remaining row (in row order) with a nonzero entry there.
  std::vector<int> pivot_col_of_row;
  std::vector<std::map<int, Rational>> reduced;
  std::vector<bool> used(rows.size(), false);
  std::vector<int> pivot_row_of_col(cols.size(), -1);
  for (std::size_t c = 0; c < cols.size(); ++c) {
    int pivot = -1;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (used[r]) continue;
      auto it = rows[r].find(static_cast<int>(c));
      if (it != rows[r].end()) {
        pivot = static_cast<int>(r);
        break;
      }
    }
    if (pivot < 0) continue;
    used[pivot] = true;
    const Rational inv = Rational(1) / rows[pivot].at(static_cast<int>(c));
    for (auto& [k, v] : rows[pivot]) v *= inv;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (static_cast<int>(r) == pivot) continue;
      auto it = rows[r].find(static_cast<int>(c));
      if (it == rows[r].end()) continue;
      const Rational factor = it->second;
      for (const auto& [k, v] : rows[pivot]) {
        auto [jt, inserted] = rows[r].try_emplace(k, -factor * v);
        if (!inserted) {
          jt->second -= factor * v;
          if (jt->second == 0) rows[r].erase(jt);
        }
      }
    }
    pivot_row_of_col[c] = pivot;
  }

  std::vector<Polynomial> basis;
  for (std::size_t f = 0; f < cols.size(); ++f) {
    if (pivot_row_of_col[f] >= 0) continue;
    Polynomial p(dim);
    p.add_term(cols[f], 1);
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const int r = pivot_row_of_col[c];
      if (r < 0) continue;
      auto it = rows[r].find(static_cast<int>(f));
      if (it != rows[r].end()) p.add_term(cols[c], -it->second);
    }
    basis.push_back(std::move(p));
  }
  return basis;
}

std::string to_string(ChannelFamily family) {
  switch (family) {
    case ChannelFamily::Tangential1: return "tangential-1";
    case ChannelFamily::Tangential2: return "tangential-2";
    case ChannelFamily::Normal: return "normal";
  }
  return "?";
}

std::vector<ChannelMultiplicity> channel_multiplicities(int dim, int p, int degree) {
  if (dim != 3) throw std::invalid_argument("channel_multiplicities: only d = 3 is tabulated");
  if (p < 0 || p > 3) throw std::invalid_argument("channel_multiplicities: p must be in 0..3");
  if (degree < 0) throw std::invalid_argument("channel_multiplicities: degree must be >= 0");
  const long m = 2L * degree + 1;
  std::vector<ChannelMultiplicity> out;
  auto push = [&](ChannelFamily fam, long count) { out.push_back({dim, p, degree, fam, count}); };
  // p and 3 - p are exchanged by the Hodge star, which swaps normal and tangential.
  switch (p) {
    case 0: push(ChannelFamily::Tangential1, m); break;
    case 1:
      push(ChannelFamily::Tangential1, degree >= 1 ? m : 0);
      push(ChannelFamily::Tangential2, degree >= 1 ? m : 0);
      push(ChannelFamily::Normal, m);
      break;
    case 2:
      push(ChannelFamily::Tangential1, m);
      push(ChannelFamily::Normal, degree >= 1 ? m : 0);
      push(ChannelFamily::Normal, degree >= 1 ? m : 0);
      break;
    case 3: push(ChannelFamily::Normal, m); break;
  }
  return out;
}

DegreeShiftReport degree_shift_check(int dim, int p, int degree) {
  return degree_shift_check(dim, p, degree, harmonic_basis(dim, degree));
}

DegreeShiftReport degree_shift_check(int dim, int p, int degree, const std::vector<Polynomial>& basis) {
  if (dim < 2 || dim > kMaxFormDim) throw std::invalid_argument("degree_shift_check: unsupported dimension");
  if (p < 0 || p > dim) throw std::invalid_argument("degree_shift_check: p must lie in 0..d");
  if (degree < 0) throw std::invalid_argument("degree_shift_check: degree must be >= 0");

  DegreeShiftReport rep;
  rep.dim = dim;
  rep.p = p;
  rep.degree = degree;
  rep.harmonic_dim = static_cast<long>(basis.size());
  rep.basis_size = rep.harmonic_dim * binomial(dim, p);
  if (rep.harmonic_dim != harmonic_dim(dim, degree)) {
    rep.passed = false;
    rep.failure = "basis size " + std::to_string(rep.harmonic_dim) + " differs from dim H_l = " +
                  std::to_string(harmonic_dim(dim, degree));
    return rep;
  }

  const std::set<int> allowed = {degree - 2, degree, degree + 2};
  for (FormIndex I = 0; I < (FormIndex{1} << dim); ++I) {
    if (std::popcount(I) != p) continue;
    for (std::size_t b = 0; b < basis.size(); ++b) {
      const FormPolynomial image = tangential_projection(FormPolynomial::basis(dim, I, basis[b]));
      if (image.is_zero()) continue;
      const auto dec = harmonic_project(image, degree + 2);
      for (const auto& [k, h] : dec.components) {
        const int deg = degree + 2 - 2 * k;
        rep.occurring_degrees.insert(deg);
        if (!laplacian(h).is_zero()) rep.components_harmonic = false;
        if (!allowed.count(deg) && rep.passed) {
          rep.passed = false;
          std::ostringstream os;
          os << "P(" << FormPolynomial::basis(dim, I, basis[b]).to_string() << ") has a degree " << deg
             << " component";
          rep.failure = os.str();
        }
      }
      if (!(dec.reassemble() == image)) rep.reassembly_exact = false;
    }
  }
  if (!rep.components_harmonic && rep.passed) {
    rep.passed = false;
    rep.failure = "a harmonic component has nonzero Laplacian";
  }
  if (!rep.reassembly_exact && rep.passed) {
    rep.passed = false;
    rep.failure = "harmonic decomposition does not reassemble exactly";
  }
  return rep;
}

}  // namespace relscat
