#include "qtcap/chain.hpp"

#include <cmath>
#include <limits>

namespace qtcap {

namespace {

constexpr std::complex<double> kI{0.0, 1.0};

void normalize(ScaledComplex& z) {
  const double a = std::max(std::abs(z.mantissa.real()), std::abs(z.mantissa.imag()));
  if (a == 0.0 || !std::isfinite(a)) return;
  if (a > 1e150 || a < 1e-150) {
    int k = 0;
    std::frexp(a, &k);
    z.mantissa = {std::ldexp(z.mantissa.real(), -k), std::ldexp(z.mantissa.imag(), -k)};
    z.exponent += k;
  }
}

std::complex<double> scale_pow2(const std::complex<double>& z, int k) {
  return {std::ldexp(z.real(), k), std::ldexp(z.imag(), k)};
}

// d_j = t_j d_{j-1} + g_{j-1}^2 d_{j-2} over all N+2 modes, in scaled form.
template <class DiagFn>
ScaledComplex continuant(const TransducerParams& p, DiagFn t) {
  const int m = p.total_modes();
  ScaledComplex prev{{1.0, 0.0}, 0};
  ScaledComplex cur{t(0), 0};
  normalize(cur);
  for (int j = 1; j < m; ++j) {
    const double g = p.couplings[j - 1];
    const int e = std::max(cur.exponent, prev.exponent);
    const std::complex<double> c1 = scale_pow2(cur.mantissa, cur.exponent - e);
    const std::complex<double> c2 = scale_pow2(prev.mantissa, prev.exponent - e);
    ScaledComplex next{t(j) * c1 + (g * g) * c2, e};
    normalize(next);
    prev = cur;
    cur = next;
  }
  return cur;
}

// end-mode damping entries: kappa_a on mode 0, kappa_b on mode N+1, else 0
double kappa_of(const TransducerParams& p, int j) {
  if (j == 0) return p.kappa_a;
  if (j == p.total_modes() - 1) return p.kappa_b;
  return 0.0;
}

std::vector<std::complex<double>> poly_continuant_complex(
    const TransducerParams& p, const std::vector<std::complex<double>>& shift) {
  // coefficients (ascending in v) of the continuant with t_j = v + shift_j
  const int m = p.total_modes();
  std::vector<std::complex<double>> prev{1.0};
  std::vector<std::complex<double>> cur{shift[0], 1.0};
  for (int j = 1; j < m; ++j) {
    const double gsq = p.couplings[j - 1] * p.couplings[j - 1];
    std::vector<std::complex<double>> next(j + 2, 0.0);
    for (size_t k = 0; k < cur.size(); ++k) {
      next[k + 1] += cur[k];            // v * cur
      next[k] += shift[j] * cur[k];     // shift_j * cur
    }
    for (size_t k = 0; k < prev.size(); ++k) next[k] += gsq * prev[k];
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

std::vector<double> abs2_poly_from(const TransducerParams& p,
                                   double omega_c, bool flip_ends) {
  // coefficients in v = i(omega - omega_c): t_j = v + kappa_j/2 + i(Delta_j + omega_c)
  const int m = p.total_modes();
  std::vector<std::complex<double>> shift(m);
  for (int j = 0; j < m; ++j) {
    double damping = kappa_of(p, j) * 0.5;
    if (flip_ends && j == 0) damping = -damping;  // last entry keeps +kappa_b/2
    shift[j] = std::complex<double>(damping, p.detunings[j] + omega_c);
  }
  std::vector<std::complex<double>> a = poly_continuant_complex(p, shift);

  // to powers of real w: b_k = a_k * i^k
  std::vector<std::complex<double>> b(a.size());
  std::complex<double> ipow{1.0, 0.0};
  for (size_t k = 0; k < a.size(); ++k) {
    b[k] = a[k] * ipow;
    ipow *= kI;
  }

  // |poly(w)|^2 = conv(b, conj(b)); imaginary parts cancel exactly
  std::vector<double> out(2 * a.size() - 1, 0.0);
  for (size_t k = 0; k < b.size(); ++k)
    for (size_t l = 0; l < b.size(); ++l)
      out[k + l] += (b[k] * std::conj(b[l])).real();
  return out;
}

}  // namespace

void TransducerParams::validate() const {
  if (n_stages < 0) throw std::invalid_argument("n_stages must be non-negative");
  if (!(kappa_a > 0.0) || !std::isfinite(kappa_a))
    throw std::invalid_argument("kappa_a must be strictly positive and finite");
  if (!(kappa_b > 0.0) || !std::isfinite(kappa_b))
    throw std::invalid_argument("kappa_b must be strictly positive and finite");
  if ((int)detunings.size() != n_stages + 2)
    throw std::invalid_argument("detunings must have length n_stages+2");
  if ((int)couplings.size() != n_stages + 1)
    throw std::invalid_argument("couplings must have length n_stages+1");
  for (double d : detunings)
    if (!std::isfinite(d)) throw std::invalid_argument("detunings must be finite");
  for (double g : couplings)
    if (!(g > 0.0) || !std::isfinite(g))
      throw std::invalid_argument("couplings must be strictly positive and finite");
}

std::complex<double> ScaledComplex::value() const {
  return scale_pow2(mantissa, exponent);
}

double ScaledComplex::log_abs() const {
  const double a = std::abs(mantissa);
  if (a == 0.0) return -std::numeric_limits<double>::infinity();
  return std::log(a) + exponent * M_LN2;
}

std::complex<double> susceptibility(double omega, double detuning, double kappa) {
  const std::complex<double> denom(kappa * 0.5, omega + detuning);
  if (denom == std::complex<double>(0.0, 0.0))
    throw pole_error("susceptibility evaluated at its pole");
  return 1.0 / denom;
}

ScaledComplex chain_determinant_scaled(const TransducerParams& p, double omega) {
  return continuant(p, [&](int j) {
    return std::complex<double>(kappa_of(p, j) * 0.5, omega + p.detunings[j]);
  });
}

std::complex<double> chain_determinant(const TransducerParams& p, double omega) {
  return chain_determinant_scaled(p, omega).value();
}

ScaledComplex reflection_numerator_scaled(const TransducerParams& p, double omega) {
  return continuant(p, [&](int j) {
    double damping = kappa_of(p, j) * 0.5;
    if (j == 0) damping = -damping;
    return std::complex<double>(damping, omega + p.detunings[j]);
  });
}

double log_peak_numerator(const TransducerParams& p) {
  double s = std::log(p.kappa_a) + std::log(p.kappa_b);
  for (double g : p.couplings) s += 2.0 * std::log(g);
  return s;
}

double conversion_efficiency(const TransducerParams& p, double omega) {
  if (p.kappa_a <= 0.0 || p.kappa_b <= 0.0) return 0.0;
  const double eta = std::exp(log_peak_numerator(p) -
                              chain_determinant_scaled(p, omega).log_abs2());
  if (eta > 1.0) {
    if (eta <= 1.0 + 1e-9) return 1.0;
    throw std::logic_error("efficiency exceeds 1 beyond rounding tolerance");
  }
  return eta;
}

double reflectance(const TransducerParams& p, double omega) {
  const double r = std::exp(reflection_numerator_scaled(p, omega).log_abs2() -
                            chain_determinant_scaled(p, omega).log_abs2());
  if (r > 1.0) {
    if (r <= 1.0 + 1e-9) return 1.0;
    throw std::logic_error("reflectance exceeds 1 beyond rounding tolerance");
  }
  return r;
}

std::complex<double> matching_polynomial(const TransducerParams& p, double omega,
                                         double omega_c) {
  const int last = p.total_modes() - 1;
  const std::complex<double> v = kI * (omega - omega_c);
  ScaledComplex m = continuant(p, [&](int j) {
    double shift = 0.0;
    if (j == 0) shift = -p.kappa_a * 0.5;
    if (j == last) shift = p.kappa_b * 0.5;
    return v + shift;
  });
  return m.value();
}

ComplexResponse evaluate_response(const TransducerParams& p, double omega) {
  ComplexResponse r;
  r.frequency = omega;
  r.determinant = chain_determinant(p, omega);
  r.efficiency = conversion_efficiency(p, omega);
  r.reflectance = reflectance(p, omega);
  return r;
}

std::vector<std::pair<double, double>> efficiency_spectrum(
    const TransducerParams& p, double omega_min, double omega_max, int n_points) {
  if (n_points < 2) throw std::invalid_argument("spectrum needs at least 2 points");
  if (!(omega_min < omega_max))
    throw std::invalid_argument("spectrum window must have omega_min < omega_max");
  std::vector<std::pair<double, double>> rows;
  rows.reserve(n_points);
  const double step = (omega_max - omega_min) / (n_points - 1);
  for (int i = 0; i < n_points; ++i) {
    const double w = (i == n_points - 1) ? omega_max : omega_min + i * step;
    rows.emplace_back(w, conversion_efficiency(p, w));
  }
  return rows;
}

std::vector<double> matching_char_poly(const TransducerParams& p) {
  const int m = p.total_modes();
  std::vector<double> prev{1.0};
  std::vector<double> cur{-p.kappa_a * 0.5, 1.0};
  for (int j = 1; j < m; ++j) {
    const double gsq = p.couplings[j - 1] * p.couplings[j - 1];
    const double shift = (j == m - 1) ? p.kappa_b * 0.5 : 0.0;
    std::vector<double> next(j + 2, 0.0);
    for (size_t k = 0; k < cur.size(); ++k) {
      next[k + 1] += cur[k];
      next[k] += shift * cur[k];
    }
    for (size_t k = 0; k < prev.size(); ++k) next[k] += gsq * prev[k];
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

std::vector<double> abs2_determinant_poly(const TransducerParams& p, double omega_c) {
  return abs2_poly_from(p, omega_c, false);
}

std::vector<double> abs2_reflection_poly(const TransducerParams& p, double omega_c) {
  return abs2_poly_from(p, omega_c, true);
}

double root_bound(const TransducerParams& p) {
  const int m = p.total_modes();
  double bound = 0.0;
  for (int j = 0; j < m; ++j) {
    double row = std::abs(p.detunings[j]) + kappa_of(p, j) * 0.5;
    if (j > 0) row += p.couplings[j - 1];
    if (j < m - 1) row += p.couplings[j];
    bound = std::max(bound, row);
  }
  return bound;
}

}  // namespace qtcap
