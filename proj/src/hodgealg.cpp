#include "relscat/hodgealg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace relscat {

namespace {

class Stream {
public:
  explicit Stream(std::uint64_t seed) : gen_(seed) {}

  // 53 random bits in [0, 1).
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Box-Muller; the spare deviate is discarded to keep the stream simple.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

private:
  std::mt19937_64 gen_;
};

}  // namespace

double operator_norm(const Eigen::MatrixXcd& A) {
  if (A.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A);
  return svd.singularValues()(0);
}

NilpotentModel model_from_blocks(const Eigen::MatrixXcd& S, const Eigen::MatrixXcd& U) {
  const Eigen::Index n1 = S.rows();
  const Eigen::Index n2 = S.cols();
  if (n1 < 1 || n2 < 1) throw std::invalid_argument("model_from_blocks: both blocks need dimension >= 1");
  if (U.rows() != n1 + n2 || U.cols() != n1 + n2)
    throw std::invalid_argument("model_from_blocks: frame has the wrong size");

  NilpotentModel m;
  m.n1 = static_cast<int>(n1);
  m.n2 = static_cast<int>(n2);
  m.S = S;
  m.U = U;
  Eigen::MatrixXcd block = Eigen::MatrixXcd::Zero(n1 + n2, n1 + n2);
  block.topRightCorner(n1, n2) = S;
  m.T = U * block * U.adjoint();
  return m;
}

NilpotentModel build_model(int n1, int n2, std::uint64_t seed) {
  if (n1 < 1 || n2 < 1) throw std::invalid_argument("build_model: dimensions must be >= 1");
  if (n1 + n2 > 64) throw std::invalid_argument("build_model: total dimension is capped at 64");
  Stream rng(seed);
  const int n = n1 + n2;

  Eigen::MatrixXcd S(n1, n2);
  for (int j = 0; j < n2; ++j)
    for (int i = 0; i < n1; ++i) {
      const double re = rng.uniform();
      S(i, j) = {re, rng.uniform()};
    }

  Eigen::MatrixXcd G(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double re = rng.normal();
      G(i, j) = {re, rng.normal()};
    }
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(G);
  Eigen::MatrixXcd Q = qr.householderQ();
  // Fix the phases of R's diagonal so U is Haar distributed.
  const Eigen::MatrixXcd R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < n; ++k) {
    const std::complex<double> d = R(k, k);
    if (std::abs(d) > 0.0) Q.col(k) *= d / std::abs(d);
  }

  NilpotentModel m = model_from_blocks(S, Q);
  m.seed = seed;
  return m;
}

NilpotentModel random_model(std::uint64_t seed, int max_dim) {
  if (max_dim < 2 || max_dim > 64) throw std::invalid_argument("random_model: max_dim must be in [2, 64]");
  std::mt19937_64 gen(seed ^ 0x9e3779b97f4a7c15ULL);
  const int n = 2 + static_cast<int>(gen() % static_cast<std::uint64_t>(max_dim - 1));
  const int n1 = 1 + static_cast<int>(gen() % static_cast<std::uint64_t>(n - 1));
  return build_model(n1, n - n1, seed);
}

bool TStarReport::within_contract(double rel_tol, double comm_tol, double norm_slack) const {
  return self_adjoint_residual <= rel_tol * t_norm_sq && square_residual <= rel_tol * t_norm_sq &&
         nilpotency_residual <= rel_tol * t_norm_sq && resolvent_commutator <= comm_tol &&
         norm_tt_star <= 1.0 + norm_slack && norm_t_star_t <= 1.0 + norm_slack;
}

TStarReport verify_tstar(const NilpotentModel& model) {
  TStarReport r = verify_tstar(model.T);

  // The proof's block picture: (T+T*)^2 = diag(SS*, S*S) in the frame U.
  const Eigen::MatrixXcd D = model.T + model.T.adjoint();
  const Eigen::MatrixXcd D2 = D * D;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> full(D2, Eigen::EigenvaluesOnly);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> top(model.S * model.S.adjoint(), Eigen::EigenvaluesOnly);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> bottom(model.S.adjoint() * model.S, Eigen::EigenvaluesOnly);

  std::vector<double> joined;
  for (Eigen::Index i = 0; i < top.eigenvalues().size(); ++i) joined.push_back(top.eigenvalues()(i));
  for (Eigen::Index i = 0; i < bottom.eigenvalues().size(); ++i) joined.push_back(bottom.eigenvalues()(i));
  std::sort(joined.begin(), joined.end());

  double worst = 0.0;
  for (std::size_t i = 0; i < joined.size(); ++i)
    worst = std::max(worst, std::fabs(full.eigenvalues()(static_cast<Eigen::Index>(i)) - joined[i]));
  r.spectrum_residual = worst;
  return r;
}

}  // namespace relscat
