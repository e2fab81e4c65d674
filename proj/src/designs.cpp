#include "qtcap/designs.hpp"

#include <cmath>
#include <stdexcept>

namespace qtcap {

namespace {

constexpr double kPi = 3.14159265358979323846;

int require_stages(int n_stages) {
  if (n_stages < 0) throw std::invalid_argument("stage count must be >= 0");
  return n_stages + 2;
}

double require_gmax(double g_max) {
  if (!(g_max > 0.0) || !std::isfinite(g_max))
    throw std::invalid_argument("g_max must be finite and > 0");
  return g_max;
}

// sin(k pi / (2 m)), the half-integer Chebyshev nodes all formulas run on
double sn(int k, int m) { return std::sin(k * kPi / (2.0 * m)); }

}  // namespace

double mf_bandwidth(int n_stages, double g_max) {
  const int m = require_stages(n_stages);
  require_gmax(g_max);
  return 2.0 * std::sqrt(sn(1, m) * sn(3, m)) * g_max;
}

MFDesign maximally_flat_params(int n_stages, double g_max, double omega_c) {
  const int m = require_stages(n_stages);
  require_gmax(g_max);
  if (!std::isfinite(omega_c))
    throw std::invalid_argument("omega_c must be finite");

  MFDesign d;
  d.n_stages = n_stages;
  d.g_max = g_max;
  d.omega_c = omega_c;
  d.bandwidth = mf_bandwidth(n_stages, g_max);

  TransducerParams& p = d.params;
  p.n_stages = n_stages;
  p.kappa_a = p.kappa_b = 2.0 * std::sqrt(sn(3, m) / sn(1, m)) * g_max;
  p.detunings.assign(m, -omega_c);
  p.couplings.resize(n_stages + 1);
  // g_j = sqrt(s1 s3 / (s_(2j-1) s_(2j+1))) g_max; fill half and mirror so
  // g_j = g_(N+2-j) holds exactly and g_1 = g_max saturates exactly
  for (int j = 1; 2 * j <= n_stages + 2; ++j) {
    const double g =
        std::sqrt(sn(1, m) * sn(3, m) / (sn(2 * j - 1, m) * sn(2 * j + 1, m))) *
        g_max;
    p.couplings[j - 1] = g;
    p.couplings[n_stages + 1 - j] = g;
  }
  p.validate();
  return d;
}

double mf_efficiency_closed_form(int n_stages, double g_max, double omega_c,
                                 double omega) {
  const int m = require_stages(n_stages);
  const double x = (omega - omega_c) / mf_bandwidth(n_stages, g_max);
  // 1/(x^2m + 1) without overflow at large |x|
  const double t = 2.0 * m * std::log(std::fabs(x));
  if (x == 0.0 || t < 0.0) return 1.0 / (std::exp(std::max(t, -745.0)) + 1.0);
  return std::exp(-t) / (1.0 + std::exp(-t));
}

TransducerParams uniform_params(int n_stages, double g_max, double omega_c) {
  const int m = require_stages(n_stages);
  require_gmax(g_max);
  if (!std::isfinite(omega_c))
    throw std::invalid_argument("omega_c must be finite");
  TransducerParams p;
  p.n_stages = n_stages;
  p.kappa_a = p.kappa_b =
      n_stages % 2 == 0
          ? 2.0 * g_max
          : 2.0 * std::sqrt((n_stages + 3.0) / (n_stages + 1.0)) * g_max;
  p.detunings.assign(m, -omega_c);
  p.couplings.assign(n_stages + 1, g_max);
  p.validate();
  return p;
}

int flatness_order(const TransducerParams& p, double omega_c, int max_order) {
  p.validate();
  if (max_order < 0 || max_order > 12)
    throw std::invalid_argument("max_order must lie in [0,12]");
  if (!std::isfinite(omega_c))
    throw std::invalid_argument("omega_c must be finite");

  // eta(omega)^-1 is a polynomial in w = omega - omega_c up to the constant
  // K^2; the number of leading derivatives of eta that vanish equals the
  // number of vanishing low-order coefficients past the constant term.
  const std::vector<double> poly = abs2_determinant_poly(p, omega_c);
  const double s = std::exp(log_peak_numerator(p) / (2.0 * p.total_modes()));

  std::vector<double> q(poly.size());
  double sk = 1.0;
  for (size_t k = 0; k < poly.size(); ++k) {
    q[k] = poly[k] * sk;
    sk *= s;
  }
  double qmax = 0.0;
  for (double v : q) qmax = std::max(qmax, std::fabs(v));
  const double tau = 1e-6 * qmax;

  for (size_t k = 1; k < q.size(); ++k) {
    const double a = std::fabs(q[k]);
    if (a > tau * 0.1 && a < tau * 10.0)
      throw std::runtime_error(
          "flatness order is ill conditioned: coefficient sits on the "
          "decision threshold");
    if (a >= tau * 10.0)
      return std::min(static_cast<int>(k) - 1, max_order);
  }
  return max_order;
}

// ---- maximally flat ladder prototype ----

double LadderNetwork::element(int position) const {
  if (position < 1 || position > order)
    throw std::invalid_argument("ladder position out of range");
  return position % 2 == 1 ? inductances[(position - 1) / 2]
                           : capacitances[position / 2 - 1];
}

LadderNetwork butterworth_elements(int order) {
  if (order < 2) throw std::invalid_argument("ladder order must be >= 2");
  LadderNetwork net;
  net.order = order;
  net.resistance_in = net.resistance_out = 1.0;
  for (int j = 1; j <= order; ++j) {
    const double e = 2.0 * std::sin((2.0 * j - 1.0) * kPi / (2.0 * order));
    if (j % 2 == 1) net.inductances.push_back(e);
    else net.capacitances.push_back(e);
  }
  return net;
}

double butterworth_gain(int order, double omega, double omega_cut) {
  if (order < 2) throw std::invalid_argument("ladder order must be >= 2");
  if (!(omega_cut > 0.0)) throw std::invalid_argument("omega_cut must be > 0");
  const double x = std::fabs(omega / omega_cut);
  if (x == 0.0) return 1.0;
  const double t = 2.0 * order * std::log(x);
  if (t < 0.0) return 1.0 / (std::exp(t) + 1.0);
  return std::exp(-t) / (1.0 + std::exp(-t));
}

CorrespondenceReport verify_butterworth_correspondence(int n_stages) {
  const int m = require_stages(n_stages);
  CorrespondenceReport rep;
  rep.n_stages = n_stages;

  const MFDesign d = maximally_flat_params(n_stages, 1.0, 0.0);
  const LadderNetwork net = butterworth_elements(m);
  const double gbar = d.bandwidth;

  auto push = [&rep](const std::string& name, double lhs, double rhs) {
    rep.identities.push_back({name, lhs, rhs});
    const double scale = std::max({std::fabs(lhs), std::fabs(rhs), 1.0});
    rep.max_mismatch = std::max(rep.max_mismatch, std::fabs(lhs - rhs) / scale);
  };

  // input termination: kappa_a/(2 gbar) = R_in / L_1
  push("kappa_a/(2 gbar) = 1/e_1", d.params.kappa_a / (2.0 * gbar),
       net.resistance_in / net.element(1));
  // internal couplings: g_j^2/gbar^2 = 1/(e_j e_(j+1))
  for (int j = 1; j <= n_stages + 1; ++j) {
    const double g = d.params.couplings[j - 1];
    push("g_" + std::to_string(j) + "^2/gbar^2 = 1/(e_" + std::to_string(j) +
             " e_" + std::to_string(j + 1) + ")",
         g * g / (gbar * gbar), 1.0 / (net.element(j) * net.element(j + 1)));
  }
  // output termination: the last element is an inductor for odd N and a
  // capacitor for even N, and both parities give kappa_b/(2 gbar) = 1/e_(N+2)
  push("kappa_b/(2 gbar) = 1/e_" + std::to_string(m),
       d.params.kappa_b / (2.0 * gbar), 1.0 / net.element(m));

  // transmission shape: ladder gain with cutoff gbar equals the chain line
  for (int i = 0; i <= 32; ++i) {
    const double w = -4.0 + 8.0 * i / 32.0;
    push("gain(" + std::to_string(w) + ")", butterworth_gain(m, w, gbar),
         mf_efficiency_closed_form(n_stages, 1.0, 0.0, w));
  }
  return rep;
}

}  // namespace qtcap
