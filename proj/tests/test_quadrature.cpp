#include <doctest.h>

#include <cmath>

#include "qtcap/quadrature.hpp"

using qtcap::gauss_kronrod_15;
using qtcap::integrate_adaptive;
using qtcap::IntegrationResult;

TEST_CASE("kronrod rule is exact on low-degree polynomials") {
  // 15-point Kronrod is exact through degree 22.
  for (int k = 0; k <= 22; ++k) {
    const IntegrationResult r =
        gauss_kronrod_15([k](double x) { return std::pow(x, k); }, -1.0, 1.0);
    const double exact = (k % 2 == 1) ? 0.0 : 2.0 / (k + 1);
    CHECK(std::fabs(r.value - exact) < 1e-13);
    CHECK(r.evaluations == 15);
  }
}

TEST_CASE("kronrod rule transforms to general intervals") {
  const IntegrationResult r =
      gauss_kronrod_15([](double x) { return x * x; }, 2.0, 5.0);
  CHECK(std::fabs(r.value - 39.0) < 1e-12);
}

TEST_CASE("kronrod error estimate bounds the true error on smooth integrands") {
  const IntegrationResult r =
      gauss_kronrod_15([](double x) { return std::sin(x); }, 0.0, M_PI);
  CHECK(std::fabs(r.value - 2.0) <= r.abs_error + 1e-15);
}

TEST_CASE("rule endpoints are never evaluated") {
  // 1/sqrt(x) is infinite at 0; an open rule returns a finite answer.
  const IntegrationResult r =
      gauss_kronrod_15([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0);
  CHECK(std::isfinite(r.value));
}

TEST_CASE("adaptive refinement resolves an integrable log singularity") {
  // int_0^1 ln(1/x) dx = 1
  const IntegrationResult r = integrate_adaptive(
      [](double x) { return std::log(1.0 / x); }, 0.0, 1.0, 1e-12, 0.0, 2000);
  CHECK(r.converged);
  CHECK(std::fabs(r.value - 1.0) < 1e-11);
}

TEST_CASE("adaptive refinement resolves an endpoint power singularity") {
  // int_0^1 x^(-1/2) dx = 2
  const IntegrationResult r = integrate_adaptive(
      [](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 1e-10, 0.0, 4000);
  CHECK(r.converged);
  CHECK(std::fabs(r.value - 2.0) < 1e-8);
}

TEST_CASE("breakpoints seed the subdivision at interior kinks") {
  // int_0^1 |x - 1/3| dx = 5/18
  auto kink = [](double x) { return std::fabs(x - 1.0 / 3.0); };
  const double exact = 5.0 / 18.0;

  const IntegrationResult with_bp =
      integrate_adaptive(kink, 0.0, 1.0, 1e-13, 0.0, 2000, {1.0 / 3.0});
  CHECK(with_bp.converged);
  CHECK(std::fabs(with_bp.value - exact) < 1e-13);

  const IntegrationResult without_bp =
      integrate_adaptive(kink, 0.0, 1.0, 1e-13, 0.0, 2000);
  CHECK(without_bp.converged);
  CHECK(std::fabs(without_bp.value - exact) < 1e-12);
  // Splitting at the kink should not cost more work than discovering it.
  CHECK(with_bp.evaluations <= without_bp.evaluations);
}

TEST_CASE("breakpoints outside the interval are ignored") {
  auto f = [](double x) { return std::exp(-x); };
  const IntegrationResult plain =
      integrate_adaptive(f, 0.0, 1.0, 1e-12, 0.0, 1000);
  const IntegrationResult noisy =
      integrate_adaptive(f, 0.0, 1.0, 1e-12, 0.0, 1000, {-5.0, 7.0, 0.0, 1.0});
  CHECK(plain.value == noisy.value);
  CHECK(plain.evaluations == noisy.evaluations);
}

TEST_CASE("exhausting the interval budget reports non-convergence") {
  const IntegrationResult r = integrate_adaptive(
      [](double x) { return std::log(1.0 / x); }, 0.0, 1.0, 1e-14, 0.0, 3);
  CHECK_FALSE(r.converged);
  CHECK(r.abs_error > 0.0);
}

TEST_CASE("results are bitwise deterministic across calls") {
  auto f = [](double x) { return std::cos(7.0 * x) / (1.0 + x * x); };
  const IntegrationResult a = integrate_adaptive(f, -3.0, 11.0, 1e-12, 0.0, 4000);
  const IntegrationResult b = integrate_adaptive(f, -3.0, 11.0, 1e-12, 0.0, 4000);
  CHECK(a.value == b.value);
  CHECK(a.abs_error == b.abs_error);
  CHECK(a.evaluations == b.evaluations);
}

TEST_CASE("reversed or empty intervals integrate to zero") {
  auto f = [](double x) { return x; };
  const IntegrationResult rev = integrate_adaptive(f, 1.0, 0.0, 1e-8, 0.0, 100);
  CHECK(rev.value == 0.0);
  CHECK(rev.evaluations == 0);
  const IntegrationResult empty = integrate_adaptive(f, 2.0, 2.0, 1e-8, 0.0, 100);
  CHECK(empty.value == 0.0);
}
