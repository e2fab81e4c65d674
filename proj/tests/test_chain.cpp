#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "oracles.hpp"
#include "qtcap/chain.hpp"

using namespace qtcap;

namespace {

TransducerParams symmetric_0stage() {
  TransducerParams p;
  p.n_stages = 0;
  p.kappa_a = 2.0;
  p.kappa_b = 2.0;
  p.detunings = {0.0, 0.0};
  p.couplings = {1.0};
  return p;
}

std::complex<double> horner(const std::vector<double>& coeffs,
                            std::complex<double> x) {
  std::complex<double> acc(0.0, 0.0);
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
  return acc;
}

double horner_real(const std::vector<double>& coeffs, double x) {
  double acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
  return acc;
}

}  // namespace

TEST_CASE("parameter validation rejects malformed chains") {
  TransducerParams p = symmetric_0stage();
  CHECK_NOTHROW(p.validate());

  TransducerParams bad = p;
  bad.kappa_a = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = p;
  bad.kappa_b = -1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = p;
  bad.n_stages = -1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = p;
  bad.detunings = {0.0};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = p;
  bad.couplings = {1.0, 0.5};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = p;
  bad.couplings = {0.0};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = p;
  bad.detunings[1] = std::nan("");
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("susceptibility matches its definition and signals its pole") {
  const std::complex<double> chi = susceptibility(1.0, 0.0, 2.0);
  CHECK(std::abs(chi - std::complex<double>(0.5, -0.5)) < 1e-15);
  CHECK_THROWS_AS(susceptibility(0.5, -0.5, 0.0), pole_error);
}

TEST_CASE("two-mode chain determinant has the hand-computed value") {
  const TransducerParams p = symmetric_0stage();
  // D(omega) = (i omega + 1)^2 + 1
  const std::complex<double> d0 = chain_determinant(p, 0.0);
  CHECK(std::abs(d0 - std::complex<double>(2.0, 0.0)) < 1e-15);
  const std::complex<double> d1 = chain_determinant(p, 1.0);
  CHECK(std::abs(d1 - std::complex<double>(1.0, 2.0)) < 1e-14);

  CHECK(std::fabs(log_peak_numerator(p) - std::log(4.0)) < 1e-15);
  CHECK(conversion_efficiency(p, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(conversion_efficiency(p, 1.0) == doctest::Approx(0.8).epsilon(1e-14));
  CHECK(reflectance(p, 1.0) == doctest::Approx(0.2).epsilon(1e-14));
}

TEST_CASE("continuant determinant agrees with a dense LU factorization") {
  oracle::ChainGenerator gen(314159u);
  for (int trial = 0; trial < 60; ++trial) {
    const TransducerParams p = gen.next();
    for (int k = 0; k < 6; ++k) {
      const double w = gen.frequency();
      const std::complex<double> lu = oracle::dense_determinant(p, w);
      const std::complex<double> cont = chain_determinant_scaled(p, w).value();
      CHECK(std::abs(cont - lu) <= 1e-12 * std::abs(lu));

      const std::complex<double> lu_r = oracle::dense_reflection_numerator(p, w);
      const std::complex<double> cont_r = reflection_numerator_scaled(p, w).value();
      CHECK(std::abs(cont_r - lu_r) <= 1e-12 * std::max(std::abs(lu_r), 1e-30));
    }
  }
}

TEST_CASE("transmission and reflection split the response exactly") {
  // |D|^2 = |Mr|^2 + K^2 pointwise, checked in the log domain the capacity
  // integrands actually use.
  oracle::ChainGenerator gen;
  for (int trial = 0; trial < 100; ++trial) {
    const TransducerParams p = gen.next();
    const double lk2 = log_peak_numerator(p);
    for (int k = 0; k < 8; ++k) {
      const double w = gen.frequency();
      const double ld2 = chain_determinant_scaled(p, w).log_abs2();
      const double lm2 = reflection_numerator_scaled(p, w).log_abs2();
      const double gap = 1.0 - std::exp(lm2 - ld2) - std::exp(lk2 - ld2);
      CHECK(std::fabs(gap) <= 1e-12);
    }
  }
}

TEST_CASE("scaled evaluation survives frequencies that overflow a double") {
  TransducerParams p;
  p.n_stages = 10;
  p.kappa_a = p.kappa_b = 2.0;
  p.detunings.assign(12, 0.0);
  p.couplings.assign(11, 1.0);

  const double w = 1e150;
  const ScaledComplex d = chain_determinant_scaled(p, w);
  CHECK(std::isfinite(d.log_abs()));
  // D ~ (i omega)^12 dominates every other term by ~300 orders of magnitude.
  CHECK(std::fabs(d.log_abs2() - 24.0 * std::log(w)) < 1e-9);
  CHECK(!std::isfinite(std::abs(d.value())));
  CHECK(conversion_efficiency(p, w) == 0.0);
}

TEST_CASE("disconnected ports convert nothing") {
  TransducerParams p = symmetric_0stage();
  p.kappa_a = 0.0;  // invalid for validate(), but the response is still defined
  CHECK(conversion_efficiency(p, 0.3) == 0.0);
}

TEST_CASE("efficiency clamps sub-epsilon excursions above one") {
  // The matched symmetric chain hits exactly 1 up to rounding; scanning the
  // peak must never trip the consistency guard.
  const TransducerParams p = symmetric_0stage();
  for (int i = -50; i <= 50; ++i) {
    const double eta = conversion_efficiency(p, 1e-9 * i);
    CHECK(eta <= 1.0);
    CHECK(eta > 0.999999);
  }
}

TEST_CASE("evaluate_response is consistent with the scalar entry points") {
  oracle::ChainGenerator gen(777u);
  const TransducerParams p = gen.next(4);
  const double w = 0.37;
  const ComplexResponse r = evaluate_response(p, w);
  CHECK(r.frequency == w);
  CHECK(r.efficiency == conversion_efficiency(p, w));
  CHECK(r.reflectance == reflectance(p, w));
  CHECK(std::fabs(r.efficiency + r.reflectance - 1.0) <= 1e-12);
  CHECK(std::abs(r.determinant - chain_determinant(p, w)) <=
        1e-13 * std::abs(r.determinant));
}

TEST_CASE("efficiency_spectrum samples the closed interval uniformly") {
  const TransducerParams p = symmetric_0stage();
  const auto rows = efficiency_spectrum(p, -1.0, 1.0, 5);
  REQUIRE(rows.size() == 5);
  CHECK(rows.front().first == -1.0);
  CHECK(rows.back().first == 1.0);
  CHECK(rows[2].first == doctest::Approx(0.0).epsilon(1e-15));
  for (const auto& [w, eta] : rows)
    CHECK(eta == conversion_efficiency(p, w));

  CHECK_THROWS_AS(efficiency_spectrum(p, -1.0, 1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(efficiency_spectrum(p, 1.0, -1.0, 5), std::invalid_argument);
}

TEST_CASE("matching polynomial evaluates its own characteristic coefficients") {
  oracle::ChainGenerator gen(2024u);
  for (int trial = 0; trial < 20; ++trial) {
    const TransducerParams p = gen.next(6);
    const std::vector<double> coeffs = matching_char_poly(p);
    REQUIRE((int)coeffs.size() == p.total_modes() + 1);
    CHECK(coeffs.back() == 1.0);  // monic
    const double wc = 0.4;
    for (double w : {-1.3, 0.0, 0.9, 2.6}) {
      const std::complex<double> direct = matching_polynomial(p, w, wc);
      const std::complex<double> via_coeffs =
          horner(coeffs, std::complex<double>(0.0, w - wc));
      const double scale = std::max(std::abs(direct), 1.0);
      CHECK(std::abs(direct - via_coeffs) <= 1e-12 * scale);
    }
  }
}

TEST_CASE("resonant chains tie the matching polynomial to the reflection") {
  // With every detuning at -omega_c the two continuants coincide termwise.
  oracle::ChainGenerator gen(99u);
  TransducerParams p = gen.next(5);
  const double wc = -0.7;
  for (double& d : p.detunings) d = -wc;
  for (double w : {-2.0, -0.3, 1.1, 4.2}) {
    const std::complex<double> mr = reflection_numerator_scaled(p, w).value();
    const std::complex<double> mp = matching_polynomial(p, w, wc);
    CHECK(std::abs(mr - mp) <= 1e-12 * std::max(std::abs(mr), 1.0));
  }
}

TEST_CASE("squared-magnitude polynomials reproduce pointwise evaluations") {
  oracle::ChainGenerator gen(5150u);
  for (int trial = 0; trial < 20; ++trial) {
    const TransducerParams p = gen.next(6);
    const double wc = 0.7;
    const std::vector<double> pd = abs2_determinant_poly(p, wc);
    const std::vector<double> pm = abs2_reflection_poly(p, wc);
    REQUIRE((int)pd.size() == 2 * p.total_modes() + 1);
    REQUIRE(pm.size() == pd.size());
    for (double u : {-1.3, 0.4, 2.2}) {
      const double d2 = std::exp(chain_determinant_scaled(p, wc + u).log_abs2());
      const double m2 =
          std::exp(reflection_numerator_scaled(p, wc + u).log_abs2());
      // Horner rounding is absolute in the coefficient scale, hence the floor.
      CHECK(std::fabs(horner_real(pd, u) - d2) <= 1e-9 * std::max(d2, 1.0));
      CHECK(std::fabs(horner_real(pm, u) - m2) <= 1e-9 * std::max(m2, 1.0));
    }
  }
}

TEST_CASE("losslessness holds coefficient by coefficient") {
  // |D|^2 - |Mr|^2 = K^2: the difference polynomial is the constant K^2.
  oracle::ChainGenerator gen(31337u);
  for (int trial = 0; trial < 20; ++trial) {
    const TransducerParams p = gen.next(8);
    const std::vector<double> pd = abs2_determinant_poly(p, 0.0);
    const std::vector<double> pm = abs2_reflection_poly(p, 0.0);
    const double k2 = std::exp(log_peak_numerator(p));
    CHECK(std::fabs(pd[0] - pm[0] - k2) <= 1e-12 * std::max(pd[0], k2));
    for (size_t k = 1; k < pd.size(); ++k) {
      const double scale = std::max({std::fabs(pd[k]), std::fabs(pm[k]), 1.0});
      CHECK(std::fabs(pd[k] - pm[k]) <= 1e-12 * scale);
    }
  }
}

TEST_CASE("root bound encloses the spectral structure of both numerators") {
  oracle::ChainGenerator gen(404u);
  for (int trial = 0; trial < 20; ++trial) {
    const TransducerParams p = gen.next(8);
    const double rb = root_bound(p);
    CHECK(rb > 0.0);
    for (double sgn : {-1.0, 1.0}) {
      const double w = sgn * (rb + 1.0);
      // monic polynomials with all roots inside rb satisfy |poly| >= 1 there
      CHECK(chain_determinant_scaled(p, w).log_abs2() >= 0.0);
      CHECK(reflection_numerator_scaled(p, w).log_abs2() >= 0.0);
    }
  }
}
