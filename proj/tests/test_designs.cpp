#include <doctest.h>

#include <cmath>

#include "qtcap/capacity.hpp"
#include "qtcap/designs.hpp"

using namespace qtcap;

namespace {

bool close_rel(double a, double b, double tol) {
  return std::fabs(a - b) <= tol * std::max({std::fabs(a), std::fabs(b), 1e-300});
}

}  // namespace

TEST_CASE("maximally flat parameters at frozen stage counts") {
  const MFDesign d0 = maximally_flat_params(0, 1.0, 0.0);
  CHECK(d0.params.kappa_a == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(d0.params.kappa_b == d0.params.kappa_a);
  CHECK(d0.params.couplings[0] == 1.0);
  CHECK(close_rel(d0.bandwidth, 1.414213562373095, 1e-15));

  const MFDesign d2 = maximally_flat_params(2, 1.0, 0.0);
  CHECK(close_rel(d2.params.kappa_a, 3.1075479480600746, 1e-14));
  CHECK(d2.params.couplings[0] == 1.0);  // the widest coupling saturates g_max
  CHECK(close_rel(d2.params.couplings[1], 0.64359425290558262, 1e-14));
  CHECK(d2.params.couplings[2] == d2.params.couplings[0]);  // mirror symmetry
  CHECK(close_rel(d2.bandwidth, 1.1892071150027211, 1e-14));

  const MFDesign d3 = maximally_flat_params(3, 1.0, 0.0);
  // sin(pi/10) sin(3 pi/10) = 1/4 makes this bandwidth exactly 1
  CHECK(close_rel(d3.bandwidth, 1.0, 1e-14));
  CHECK(close_rel(d3.params.kappa_a, 3.23606797749979, 1e-14));
  CHECK(close_rel(d3.params.couplings[1], 0.55589297025142117, 1e-14));
  CHECK(d3.params.couplings[3] == d3.params.couplings[0]);
  CHECK(d3.params.couplings[2] == d3.params.couplings[1]);

  CHECK_NOTHROW(d2.params.validate());
  CHECK_THROWS_AS(maximally_flat_params(-1, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(maximally_flat_params(2, 0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(maximally_flat_params(2, 1.0, std::nan("")),
                  std::invalid_argument);
}

TEST_CASE("design parameters scale linearly with the coupling bound") {
  const MFDesign base = maximally_flat_params(3, 1.0, 0.0);
  const MFDesign scaled = maximally_flat_params(3, 2.5, 0.0);
  CHECK(close_rel(scaled.params.kappa_a, 2.5 * base.params.kappa_a, 1e-15));
  CHECK(close_rel(scaled.bandwidth, 2.5 * base.bandwidth, 1e-15));
  for (size_t j = 0; j < base.params.couplings.size(); ++j)
    CHECK(close_rel(scaled.params.couplings[j], 2.5 * base.params.couplings[j],
                    1e-15));
  CHECK(close_rel(mf_bandwidth(3, 2.5), 2.5 * mf_bandwidth(3, 1.0), 1e-15));
}

TEST_CASE("detunings place the line at the requested center") {
  const MFDesign d = maximally_flat_params(2, 1.0, 1.7);
  for (double det : d.params.detunings) CHECK(det == -1.7);
  CHECK(conversion_efficiency(d.params, 1.7) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("closed-form efficiency traces the synthesized chain") {
  for (int n : {0, 1, 2, 5}) {
    const MFDesign d = maximally_flat_params(n, 1.0, 0.0);
    CHECK(mf_efficiency_closed_form(n, 1.0, 0.0, 0.0) == 1.0);
    CHECK(close_rel(mf_efficiency_closed_form(n, 1.0, 0.0, d.bandwidth), 0.5,
                    1e-13));
    for (double w : {-3.0, -0.9, 0.2, 1.4, 4.0}) {
      const double from_chain = conversion_efficiency(d.params, w);
      const double closed = mf_efficiency_closed_form(n, 1.0, 0.0, w);
      CHECK(std::fabs(from_chain - closed) <= 1e-9);
    }
  }
  // no overflow for frequencies far outside the line
  CHECK(mf_efficiency_closed_form(4, 1.0, 0.0, 1e300) == 0.0);
  CHECK(mf_efficiency_closed_form(4, 1.0, 0.0, -1e300) == 0.0);
}

TEST_CASE("uniform designs saturate every coupling") {
  const TransducerParams u2 = uniform_params(2, 1.0, 0.0);
  CHECK_NOTHROW(u2.validate());
  for (double g : u2.couplings) CHECK(g == 1.0);
  CHECK(u2.kappa_a == doctest::Approx(2.0).epsilon(1e-15));  // even parity
  CHECK(u2.kappa_b == u2.kappa_a);

  const TransducerParams u3 = uniform_params(3, 1.0, 0.0);
  // odd parity: 2 sqrt((N+3)/(N+1))
  CHECK(close_rel(u3.kappa_a, std::sqrt(6.0), 1e-15));

  // scaling carries through the parity rule
  const TransducerParams u3s = uniform_params(3, 0.5, 0.0);
  CHECK(close_rel(u3s.kappa_a, 0.5 * u3.kappa_a, 1e-15));
}

TEST_CASE("the one- and two-mode uniform chains are the flat designs") {
  for (int n : {0, 1}) {
    const TransducerParams u = uniform_params(n, 1.0, 0.0);
    const TransducerParams f = maximally_flat_params(n, 1.0, 0.0).params;
    CHECK(close_rel(u.kappa_a, f.kappa_a, 1e-14));
    CHECK(close_rel(u.kappa_b, f.kappa_b, 1e-14));
    for (size_t j = 0; j < u.couplings.size(); ++j)
      CHECK(close_rel(u.couplings[j], f.couplings[j], 1e-14));
  }
}

TEST_CASE("flatness order separates the two families") {
  for (int n : {0, 1, 2, 3}) {
    const TransducerParams f = maximally_flat_params(n, 1.0, 0.0).params;
    CHECK(flatness_order(f, 0.0, 12) == 2 * n + 3);
  }
  CHECK(flatness_order(uniform_params(2, 1.0, 0.0), 0.0, 12) == 3);
  CHECK(flatness_order(uniform_params(3, 1.0, 0.0), 0.0, 12) == 5);

  // the cap truncates the answer, not the decision
  CHECK(flatness_order(maximally_flat_params(1, 1.0, 0.0).params, 0.0, 2) == 2);

  CHECK_THROWS_AS(flatness_order(uniform_params(2, 1.0, 0.0), 0.0, 13),
                  std::invalid_argument);
  CHECK_THROWS_AS(flatness_order(uniform_params(2, 1.0, 0.0), 0.0, -1),
                  std::invalid_argument);
}

TEST_CASE("ladder prototype values at frozen orders") {
  const LadderNetwork n2 = butterworth_elements(2);
  CHECK(close_rel(n2.element(1), std::sqrt(2.0), 1e-15));
  CHECK(close_rel(n2.element(2), std::sqrt(2.0), 1e-15));
  CHECK(n2.resistance_in == 1.0);
  CHECK(n2.resistance_out == 1.0);
  CHECK(n2.inductances.size() == 1);
  CHECK(n2.capacitances.size() == 1);

  const LadderNetwork n3 = butterworth_elements(3);
  CHECK(close_rel(n3.element(1), 1.0, 1e-15));
  CHECK(close_rel(n3.element(2), 2.0, 1e-15));
  CHECK(close_rel(n3.element(3), 1.0, 1e-15));

  const LadderNetwork n4 = butterworth_elements(4);
  CHECK(close_rel(n4.element(1), 0.7653668647301796, 1e-14));
  CHECK(close_rel(n4.element(2), 1.8477590650225735, 1e-14));
  // antimetric symmetry e_j = e_(order+1-j)
  for (int j = 1; j <= 4; ++j)
    CHECK(n4.element(j) == doctest::Approx(n4.element(5 - j)).epsilon(1e-14));

  CHECK_THROWS_AS(butterworth_elements(1), std::invalid_argument);
  CHECK_THROWS_AS(n3.element(0), std::invalid_argument);
  CHECK_THROWS_AS(n3.element(4), std::invalid_argument);
}

TEST_CASE("ladder gain is the flat line in disguise") {
  CHECK(butterworth_gain(3, 0.0, 1.0) == 1.0);
  CHECK(close_rel(butterworth_gain(3, 1.0, 1.0), 0.5, 1e-15));
  CHECK(close_rel(butterworth_gain(3, 2.0, 1.0), 1.0 / 65.0, 1e-13));
  double prev = 1.1;
  for (double w : {0.0, 0.3, 0.8, 1.0, 1.5, 3.0, 10.0}) {
    const double g = butterworth_gain(4, w, 1.0);
    CHECK(g < prev);
    prev = g;
  }
  CHECK(butterworth_gain(4, 1e300, 1.0) == 0.0);
  CHECK_THROWS_AS(butterworth_gain(1, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(butterworth_gain(3, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("chain to ladder dictionary holds at machine precision") {
  for (int n = 0; n <= 10; ++n) {
    const CorrespondenceReport rep = verify_butterworth_correspondence(n);
    CHECK(rep.n_stages == n);
    CHECK((int)rep.identities.size() >= n + 4);
    CHECK(rep.max_mismatch <= 1e-12);
  }
}
