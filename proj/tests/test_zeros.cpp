#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "relscat/zeros.hpp"

using namespace relscat;

namespace {

// Plain bisection, sign changes only.
template <typename F>
double bisect(F f, double a, double b) {
  double fa = f(a);
  for (int i = 0; i < 200; ++i) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if ((fm > 0) == (fa > 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

// x^2 psi_1'(x) and x psi_1(x) written out from sin and cos.
double psi1_times_x(double x) { return std::sin(x) - x * std::cos(x); }
double dpsi1_times_x2(double x) { return -std::sin(x) + x * std::cos(x) + x * x * std::sin(x); }

}  // namespace

TEST_SUITE("zeros") {
  TEST_CASE("first zeros of psi_1 against bisection on tan x = x") {
    const ZeroList z = find_zeros(riccati_psi_target(1), 0.0, 10.0);
    REQUIRE(z.values.size() == 2);
    const double r1 = bisect(psi1_times_x, std::numbers::pi, 1.5 * std::numbers::pi);
    const double r2 = bisect(psi1_times_x, 2.0 * std::numbers::pi, 2.5 * std::numbers::pi);
    CHECK(r1 == doctest::Approx(4.493409457909064).epsilon(1e-15));
    CHECK(std::fabs(z.values[0] - r1) < 1e-10);
    CHECK(std::fabs(z.values[1] - r2) < 1e-10);
    CHECK(z.anomalies.empty());
  }

  TEST_CASE("zeros of psi_1'") {
    const ZeroList z = find_zeros(riccati_dpsi_target(1), 0.0, 7.0);
    REQUIRE(z.values.size() == 2);
    CHECK(std::fabs(z.values[0] - bisect(dpsi1_times_x2, 2.0, 3.0)) < 1e-10);
    CHECK(std::fabs(z.values[1] - bisect(dpsi1_times_x2, 6.0, 6.5)) < 1e-10);
    CHECK(z.values[0] == doctest::Approx(2.743707269992269).epsilon(1e-12));
  }

  TEST_CASE("psi_0 zeros are multiples of pi, scaled targets divide by s") {
    const ZeroList z = find_zeros(riccati_psi_target(0), 0.0, 30.0);
    REQUIRE(z.values.size() == 9);
    for (std::size_t k = 0; k < z.values.size(); ++k)
      CHECK(std::fabs(z.values[k] - (k + 1) * std::numbers::pi) < 1e-12);
    const ZeroList zs = find_zeros(riccati_psi_target(0, 50.0), 0.0, 1.0, 0.25 / 50.0);
    REQUIRE(zs.values.size() == 15);
    for (std::size_t k = 0; k < zs.values.size(); ++k)
      CHECK(std::fabs(zs.values[k] - (k + 1) * std::numbers::pi / 50.0) < 1e-12);
  }

  TEST_CASE("zeros are strictly increasing and match std::sph_bessel sign changes") {
    for (int l : {2, 5, 12}) {
      const ZeroList z = find_zeros(riccati_psi_target(l), 0.0, 60.0);
      for (std::size_t k = 1; k < z.values.size(); ++k) CHECK(z.values[k] > z.values[k - 1]);
      int changes = 0;
      double prev = std::sph_bessel(l, 1e-3);
      for (double x = 1e-3 + 1e-3; x <= 60.0; x += 1e-3) {
        const double cur = std::sph_bessel(l, x);
        if ((cur > 0) != (prev > 0)) ++changes;
        prev = cur;
      }
      CHECK(static_cast<int>(z.values.size()) == changes);
      for (double r : z.values) CHECK(std::fabs(std::sph_bessel(l, r)) < 1e-11);
    }
  }

  TEST_CASE("touching minima are flagged as anomalies") {
    const ZeroTarget t{"(x-1)^2+eps", [](double x) { return TargetSample{(x - 1) * (x - 1) + 1e-6, 2 * (x - 1)}; }};
    const ZeroList z = find_zeros(t, 0.0, 2.0, 0.25);
    CHECK(z.values.empty());
    REQUIRE(z.anomalies.size() == 1);
    CHECK(z.anomalies[0] == doctest::Approx(1.0));
  }

  TEST_CASE("slope-free targets fall back to bisection") {
    const ZeroTarget t{"cos", [](double x) { return TargetSample{std::cos(x), std::nan("")}; }};
    const ZeroList z = find_zeros(t, 0.0, 5.0, 0.3, 1e-13);
    REQUIRE(z.values.size() == 2);
    CHECK(std::fabs(z.values[0] - std::numbers::pi / 2) < 1e-12);
    CHECK(std::fabs(z.values[1] - 1.5 * std::numbers::pi) < 1e-12);
  }

  TEST_CASE("bad intervals are rejected") {
    CHECK_THROWS_AS(find_zeros(riccati_psi_target(0), 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(find_zeros(riccati_psi_target(0), 0.0, 1.0, 0.0), std::invalid_argument);
  }
}
