#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace relscat {

/// T = U [[0, S], [0, 0]] U^* on C^{n1 + n2}; T T = 0 by construction.
struct NilpotentModel {
  int n1 = 0;
  int n2 = 0;
  std::uint64_t seed = 0;
  Eigen::MatrixXcd S;  ///< n1 x n2 off-diagonal block
  Eigen::MatrixXcd U;  ///< unitary frame
  Eigen::MatrixXcd T;
};

/// Reproducible across platforms: entries of S are uniform in the complex unit
/// square and U is the Q factor of a Gaussian matrix, both drawn from a
/// mt19937_64 stream with our own uniform/normal transforms.
NilpotentModel build_model(int n1, int n2, std::uint64_t seed);
/// Model with n1 + n2 drawn uniformly from [2, max_dim] and the split uniform,
/// using the same seed (the sweep used by the verification harness).
NilpotentModel random_model(std::uint64_t seed, int max_dim);
NilpotentModel model_from_blocks(const Eigen::MatrixXcd& S, const Eigen::MatrixXcd& U);

struct TStarReport {
  double t_norm_sq = 0.0;            ///< ||T||^2, the scale for (a) and (b)
  double self_adjoint_residual = 0;  ///< (a) ||(T+T*) - (T+T*)*||
  double square_residual = 0;        ///< (b) ||(T+T*)^2 - (TT* + T*T)||
  double nilpotency_residual = 0;    ///< ||T T||
  double resolvent_commutator = 0;   ///< (c) ||[(T*T+1)^-1, (TT*+1)^-1]||
  double norm_tt_star = 0;           ///< (d) ||TT* (TT*+T*T+1)^-1||
  double norm_t_star_t = 0;          ///< (d) ||T*T (TT*+T*T+1)^-1||
  double spectrum_residual = 0;      ///< spectrum of (T+T*)^2 versus that of SS* plus S*S

  bool within_contract(double rel_tol = 1e-12, double comm_tol = 1e-12, double norm_slack = 1e-12) const;
};

/// Operator 2-norm.
double operator_norm(const Eigen::MatrixXcd& A);

TStarReport verify_tstar(const NilpotentModel& model);

/// Checks (a)-(d) for any square complex expression T with T^2 = 0. The
/// block spectrum comparison is skipped (left at zero) without a block S.
template <typename Derived>
TStarReport verify_tstar(const Eigen::MatrixBase<Derived>& t) {
  const Eigen::MatrixXcd T = t;
  const Eigen::MatrixXcd Ts = T.adjoint();
  const Eigen::Index n = T.rows();
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(n, n);

  TStarReport r;
  const double tn = operator_norm(T);
  r.t_norm_sq = tn * tn;

  const Eigen::MatrixXcd D = T + Ts;
  r.self_adjoint_residual = operator_norm(D - D.adjoint());
  const Eigen::MatrixXcd TTs = T * Ts;
  const Eigen::MatrixXcd TsT = Ts * T;
  r.square_residual = operator_norm(D * D - (TTs + TsT));
  r.nilpotency_residual = operator_norm(T * T);

  const Eigen::MatrixXcd R1 = (TsT + I).ldlt().solve(I);
  const Eigen::MatrixXcd R2 = (TTs + I).ldlt().solve(I);
  r.resolvent_commutator = operator_norm(R1 * R2 - R2 * R1);

  const Eigen::MatrixXcd Rsum = (TTs + TsT + I).ldlt().solve(I);
  r.norm_tt_star = operator_norm(TTs * Rsum);
  r.norm_t_star_t = operator_norm(TsT * Rsum);
  return r;
}

}  // namespace relscat
