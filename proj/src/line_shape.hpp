#pragma once

#include <cmath>
#include <vector>

#include "qtcap/capacity.hpp"
#include "qtcap/chain.hpp"

namespace qtcap::detail {

// Log-domain spectral model behind the capacity integrands. Everything is
// expressed through ln K^2, ln|Mr(w)|^2 and ln|D(w)|^2 where K^2 is the
// peak numerator and Mr the reflection numerator, so 1 - eta is never formed
// by subtraction near a matched peak.
//
// Maximally flat designs need one extra step. Their matched zero of Mr has
// multiplicity N+2, so rounding the design parameters to doubles already
// shifts the true integral by roughly eps^(1/(N+2)), orders of magnitude
// above any quadrature tolerance for moderate N. When the chain is resonant
// and its matching characteristic polynomial is nilpotent to within 1e-10,
// the model deflates to the ideal line: |Mr|^2 := u^(2m), |D|^2 := K^2 + u^(2m)
// with u = omega - omega_c and m the number of modes. Anything with genuine
// ripple is far above the nilpotency threshold and keeps the exact chain
// algebra.
struct LineShape {
  TransducerParams params;
  int modes = 2;          // polynomial degree of D and Mr
  double log_k2 = 0.0;    // ln K^2
  bool deflated = false;
  double omega_c = 0.0;   // matched center when deflated, else the efficiency peak
  double root_radius = 1.0;  // all zeros of D and Mr lie within |omega| <= root_radius
  double scale = 1.0;     // half width at half maximum of the efficiency line

  // |Mr|^2 = u^strip * quotient(u) with u = omega - center, used inside
  // poly_radius where the quotient is dominated by its constant term
  double center = 0.0;
  int strip = 0;
  std::vector<double> mr_quot;
  double poly_radius = 0.0;

  static LineShape build(const TransducerParams& p);

  double log_m2(double omega) const;
  double log_d2(double omega) const;

 private:
  double log_m2_raw(double omega) const;
};

inline double LineShape::log_m2_raw(double omega) const {
  if (deflated) {
    const double u = std::fabs(omega - omega_c);
    if (u == 0.0) return -HUGE_VAL;
    return 2.0 * modes * std::log(u);
  }
  const double u = omega - center;
  if (std::fabs(u) <= poly_radius) {
    double q = 0.0;
    for (size_t i = mr_quot.size(); i-- > 0;) q = q * u + mr_quot[i];
    const double base = strip != 0 ? strip * std::log(std::fabs(u)) : 0.0;
    return base + std::log(q);
  }
  return reflection_numerator_scaled(params, omega).log_abs2();
}

inline double LineShape::log_m2(double omega) const {
  const double v = log_m2_raw(omega);
  if (v > -HUGE_VAL) return v;
  // A quadrature node can land exactly on a zero of Mr: every resonant chain
  // with an even mode count has one at its band center, and the continuant
  // can also cancel to exactly zero one ulp off a root. The singularity is
  // integrable, so sample one working ulp aside instead of handing -inf to
  // the integrator.
  double h = std::ldexp(std::fmax(std::fabs(omega), scale), -52);
  for (int it = 0; it < 60; ++it, h *= 2.0) {
    const double side =
        std::fmax(log_m2_raw(omega - h), log_m2_raw(omega + h));
    if (side > -HUGE_VAL) return side;
  }
  throw convergence_error("reflection numerator vanishes on an interval");
}

inline double LineShape::log_d2(double omega) const {
  if (deflated) {
    const double u = std::fabs(omega - omega_c);
    // ln(K^2 + u^(2m)) without overflow on either side
    if (u == 0.0) return log_k2;
    const double t = 2.0 * modes * std::log(u) - log_k2;
    if (t <= 0.0) return log_k2 + std::log1p(std::exp(t));
    return (log_k2 + t) + std::log1p(std::exp(-t));
  }
  return chain_determinant_scaled(params, omega).log_abs2();
}

}  // namespace qtcap::detail
