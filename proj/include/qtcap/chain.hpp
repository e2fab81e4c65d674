#pragma once

#include <complex>
#include <stdexcept>
#include <utility>
#include <vector>

namespace qtcap {

// Chain of N+2 bosonic modes: two externally coupled end modes (extraction
// rates kappa_a, kappa_b) and N intermediate modes, with nearest-neighbour
// couplings g_1..g_{N+1} and per-mode detunings Delta_1..Delta_{N+2}.
// All rates are expressed in units of the coupling bound g_max.
struct TransducerParams {
  int n_stages = 0;
  double kappa_a = 0.0;
  double kappa_b = 0.0;
  std::vector<double> detunings;  // length n_stages+2
  std::vector<double> couplings;  // length n_stages+1, all strictly positive

  int total_modes() const { return n_stages + 2; }
  void validate() const;  // throws std::invalid_argument on any violation
};

struct pole_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Complex value carried as mantissa * 2^exponent; the chain determinant grows
// like omega^(N+2) and must not overflow for large windows or many stages.
struct ScaledComplex {
  std::complex<double> mantissa{0.0, 0.0};
  int exponent = 0;

  std::complex<double> value() const;  // may overflow to inf for display use
  double log_abs() const;              // ln|z|, -inf for zero
  double log_abs2() const { return 2.0 * log_abs(); }
};

// 1/(i(omega+Delta) + kappa/2); the inverse of this is one diagonal entry of
// the response matrix. Signals a pole_error when the denominator vanishes.
std::complex<double> susceptibility(double omega, double detuning, double kappa);

// Determinant of the (N+2)x(N+2) tridiagonal response matrix with diagonal
// i(omega+Delta_j)+kappa_j/2 (kappa only on the end modes) and off-diagonals
// i g_j, via the three-term continuant d_j = t_j d_{j-1} + g_{j-1}^2 d_{j-2}.
ScaledComplex chain_determinant_scaled(const TransducerParams& p, double omega);
std::complex<double> chain_determinant(const TransducerParams& p, double omega);

// Numerator of the reflectance: the same continuant with the end damping
// terms flipped in sign pattern, diag i(omega+Delta_j) with -kappa_a/2 on the
// first mode and +kappa_b/2 on the last. Losslessness ties the three pieces
// together: |D|^2 = |Mr|^2 + kappa_a*kappa_b*prod g_j^2 at every omega.
ScaledComplex reflection_numerator_scaled(const TransducerParams& p, double omega);

// ln(kappa_a*kappa_b*prod g_j^2), the constant numerator of the efficiency.
double log_peak_numerator(const TransducerParams& p);

// |sqrt(kappa_a kappa_b) prod g_j / D|^2 in [0,1]. Values in (1, 1+1e-9] are
// clamped to 1; a larger excess is an internal-consistency failure and
// throws std::logic_error. Returns 0 when either end coupling is <= 0
// (disconnected port, documented edge case).
double conversion_efficiency(const TransducerParams& p, double omega);

// |Mr|^2/|D|^2, equal to 1 - conversion_efficiency up to rounding but exact
// near unity efficiency where the subtraction would cancel.
double reflectance(const TransducerParams& p, double omega);

// det(i(omega-omega_c) I - F) where F has kappa_a/2 and -kappa_b/2 at the
// ends of its diagonal and -i g_j off it; detunings do not enter. Vanishes
// exactly at the matched frequencies of the resonant design.
std::complex<double> matching_polynomial(const TransducerParams& p, double omega,
                                         double omega_c);

struct ComplexResponse {
  double frequency = 0.0;
  std::complex<double> determinant;
  double efficiency = 0.0;
  double reflectance = 0.0;
};

ComplexResponse evaluate_response(const TransducerParams& p, double omega);

std::vector<std::pair<double, double>> efficiency_spectrum(
    const TransducerParams& p, double omega_min, double omega_max, int n_points);

// Ascending real coefficients of det(v I - F) as a polynomial in v. The
// design is maximally flat iff everything below the leading 1 vanishes.
std::vector<double> matching_char_poly(const TransducerParams& p);

// Ascending real coefficients of |D(omega)|^2 and |Mr(omega)|^2 as degree
// 2(N+2) polynomials in w = omega - omega_c, exact for any detunings.
std::vector<double> abs2_determinant_poly(const TransducerParams& p, double omega_c);
std::vector<double> abs2_reflection_poly(const TransducerParams& p, double omega_c);

// Gershgorin bound: every root of D and of Mr lies within this radius of
// omega = 0, so scans over [-bound, bound] see all spectral structure.
double root_bound(const TransducerParams& p);

}  // namespace qtcap
