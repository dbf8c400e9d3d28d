#include "deltatrain/quadrature.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <limits>

using deltatrain::quad::integrate;

TEST_CASE("polynomials are integrated to near machine precision") {
  CHECK(integrate([](double x) { return x * x; }, 0.0, 1.0) ==
        Catch::Approx(1.0 / 3.0).margin(1e-14));
  CHECK(integrate([](double x) { return 3.0 * x * x - 2.0 * x + 0.5; }, -1.0,
                  2.0) == Catch::Approx(7.5).margin(1e-12));
}

TEST_CASE("degenerate and reversed intervals") {
  CHECK(integrate([](double x) { return x; }, 2.0, 2.0) == 0.0);
  CHECK(integrate([](double x) { return x * x; }, 1.0, 0.0) ==
        Catch::Approx(-1.0 / 3.0).margin(1e-14));
}

TEST_CASE("smooth transcendental integrands") {
  CHECK(integrate([](double x) { return std::sin(x); }, 0.0, M_PI) ==
        Catch::Approx(2.0).margin(1e-12));
  CHECK(integrate([](double x) { return std::exp(-x); }, 0.0, 30.0) ==
        Catch::Approx(1.0 - std::exp(-30.0)).margin(1e-11));
}

TEST_CASE("oscillatory integrand is resolved adaptively") {
  const double got =
      integrate([](double x) { return std::cos(40.0 * x); }, 0.0, 10.0, 1e-12);
  CHECK(got == Catch::Approx(std::sin(400.0) / 40.0).margin(1e-11));
}

TEST_CASE("removable singularity handled by the caller's limit value") {
  auto sinc = [](double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; };
  // Si(1) to 20 digits
  CHECK(integrate(sinc, 0.0, 1.0) ==
        Catch::Approx(0.94608307036718301494).margin(1e-12));
}

TEST_CASE("panel budget exhaustion reports the achieved estimate") {
  auto nasty = [](double x) { return std::cos(5000.0 * x * x); };
  try {
    integrate(nasty, 0.0, 20.0, 1e-14, 16);
    FAIL("expected AccuracyError");
  } catch (const deltatrain::AccuracyError& e) {
    CHECK(e.achieved() > 1e-14);
  }
}

TEST_CASE("non-finite integrand raises an evaluation error") {
  auto bad = [](double x) {
    return x > 0.5 ? std::numeric_limits<double>::quiet_NaN() : 1.0;
  };
  CHECK_THROWS_AS(integrate(bad, 0.0, 1.0), deltatrain::EvaluationError);
}
