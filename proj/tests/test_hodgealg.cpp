#include <doctest.h>

#include <stdexcept>

#include "relscat/hodgealg.hpp"

using namespace relscat;

TEST_SUITE("hodgealg") {
  TEST_CASE("models are nilpotent and satisfy the four statements") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const NilpotentModel m = random_model(seed, 24);
      const TStarReport r = verify_tstar(m);
      CHECK(r.nilpotency_residual <= 1e-12 * r.t_norm_sq);
      CHECK(r.within_contract(1e-11, 1e-11, 1e-12));
      CHECK(r.spectrum_residual <= 1e-11 * r.t_norm_sq);
    }
  }

  TEST_CASE("same seed gives bit-identical models") {
    const NilpotentModel a = build_model(3, 4, 42);
    const NilpotentModel b = build_model(3, 4, 42);
    CHECK(a.T == b.T);
    CHECK(a.S == b.S);
    const NilpotentModel c = build_model(3, 4, 43);
    CHECK_FALSE(a.T == c.T);
  }

  TEST_CASE("seed 42 regression") {
    const NilpotentModel m = build_model(3, 4, 42);
    CHECK(m.S(0, 0).real() == doctest::Approx(0.75515553295453897).epsilon(1e-15));
    CHECK(m.S(0, 0).imag() == doctest::Approx(0.63903139385469743).epsilon(1e-15));
    CHECK(m.T(0, 0).real() == doctest::Approx(0.2355091696162159).epsilon(1e-12));
    CHECK(m.T(6, 2).imag() == doctest::Approx(0.29112962065504383).epsilon(1e-12));
    CHECK(operator_norm(m.T) == doctest::Approx(2.5877963191815616).epsilon(1e-12));
  }

  TEST_CASE("frame is unitary") {
    const NilpotentModel m = build_model(10, 7, 5);
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(17, 17);
    CHECK(operator_norm(m.U.adjoint() * m.U - I) < 1e-13);
  }

  TEST_CASE("the 2x2 Jordan block by hand") {
    Eigen::MatrixXcd T = Eigen::MatrixXcd::Zero(2, 2);
    T(0, 1) = 1.0;
    const TStarReport r = verify_tstar(T);
    CHECK(r.t_norm_sq == doctest::Approx(1.0));
    // TT* = diag(1, 0), T*T = diag(0, 1), TT* + T*T + 1 = 2
    CHECK(r.norm_tt_star == doctest::Approx(0.5));
    CHECK(r.norm_t_star_t == doctest::Approx(0.5));
    CHECK(r.resolvent_commutator < 1e-15);
    CHECK(r.square_residual < 1e-15);
  }

  TEST_CASE("block construction with the identity frame") {
    Eigen::MatrixXcd S(2, 1);
    S << std::complex<double>(1, 2), std::complex<double>(0, -1);
    const NilpotentModel m = model_from_blocks(S, Eigen::MatrixXcd::Identity(3, 3));
    CHECK(m.T(0, 2) == S(0, 0));
    CHECK(m.T(1, 2) == S(1, 0));
    CHECK(m.T(2, 0) == std::complex<double>(0, 0));
    // ||T||^2 = ||S||^2 = 1 + 4 + 1
    CHECK(operator_norm(m.T) * operator_norm(m.T) == doctest::Approx(6.0));
  }

  TEST_CASE("operator norm") {
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(2, 2);
    A(0, 0) = 3.0;
    A(1, 1) = -5.0;
    CHECK(operator_norm(A) == doctest::Approx(5.0));
    CHECK(operator_norm(Eigen::MatrixXcd()) == 0.0);
  }

  TEST_CASE("argument checks") {
    CHECK_THROWS_AS(build_model(0, 3, 1), std::invalid_argument);
    CHECK_THROWS_AS(build_model(40, 30, 1), std::invalid_argument);
    CHECK_THROWS_AS(random_model(1, 65), std::invalid_argument);
    CHECK_THROWS_AS(model_from_blocks(Eigen::MatrixXcd::Ones(2, 2), Eigen::MatrixXcd::Identity(3, 3)),
                    std::invalid_argument);
  }
}
