#include "qtcap/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "line_shape.hpp"
#include "qtcap/designs.hpp"
#include "qtcap/quadrature.hpp"

namespace qtcap {

constexpr double kLn2 = 0.69314718055994530942;
constexpr double kPi = 3.14159265358979323846;

// ---- per-channel-use capacities ----

namespace {

void check_channel(const ChannelPoint& ch) {
  if (!(ch.eta >= 0.0 && ch.eta <= 1.0))
    throw std::invalid_argument("transmittance must lie in [0,1]");
  if (!(ch.nbar >= 0.0) || !std::isfinite(ch.nbar))
    throw std::invalid_argument("thermal occupation must be finite and >= 0");
}

// ln(eta/(1-eta)), exact at the ends
double logit(double eta) {
  if (eta == 0.0) return -HUGE_VAL;
  if (eta == 1.0) return HUGE_VAL;
  return std::log(eta) - std::log1p(-eta);
}

}  // namespace

double q1(double eta) {
  check_channel({eta, 0.0});
  if (eta == 1.0) return HUGE_VAL;
  return std::max(logit(eta) / kLn2, 0.0);
}

double q2(double eta) {
  check_channel({eta, 0.0});
  if (eta == 1.0) return HUGE_VAL;
  return -std::log1p(-eta) / kLn2;
}

double entropy_h(double x) {
  if (!(x >= 0.0) || !std::isfinite(x))
    throw std::invalid_argument("entropy argument must be finite and >= 0");
  if (x == 0.0) return 0.0;
  return ((x + 1.0) * std::log1p(x) - x * std::log(x)) / kLn2;
}

double k_of(double x) {
  if (!(x >= 0.0) || !std::isfinite(x))
    throw std::invalid_argument("argument must be finite and >= 0");
  if (x == 0.0) return 0.0;
  return std::expm1(x * std::log1p(1.0 / x) + std::log1p(x));
}

double q1_thermal_lower(const ChannelPoint& ch) {
  check_channel(ch);
  if (ch.eta == 1.0) return HUGE_VAL;
  return std::max(logit(ch.eta) / kLn2 - entropy_h(ch.nbar), 0.0);
}

double q1_upper_twist(const ChannelPoint& ch) {
  check_channel(ch);
  if (ch.eta == 1.0) return HUGE_VAL;
  const double num = ch.eta - (1.0 - ch.eta) * ch.nbar;
  if (!(num > 0.0)) return 0.0;
  const double t =
      (std::log(num) - std::log1p(-ch.eta) - std::log1p(ch.nbar)) / kLn2;
  return std::max(t, 0.0);
}

double q1_upper_de(const ChannelPoint& ch, DEConvention conv) {
  check_channel(ch);
  if (ch.eta == 1.0) return HUGE_VAL;
  if (ch.eta == 0.0) return 0.0;
  const double r = logit(ch.eta);
  const double hdiff =
      entropy_h((1.0 - ch.eta) * ch.nbar) - entropy_h(ch.eta * ch.nbar);
  if (conv == DEConvention::h_outside_log)
    return std::max(r / kLn2 + hdiff, 0.0);
  if (r > 40.0) return (r + std::log1p(hdiff * std::exp(-r))) / kLn2;
  const double u = std::exp(r) + hdiff;
  return u > 0.0 ? std::max(std::log2(u), 0.0) : 0.0;
}

double q2_thermal_lower(const ChannelPoint& ch) {
  check_channel(ch);
  if (ch.eta == 1.0) return HUGE_VAL;
  return std::max(-std::log1p(-ch.eta) / kLn2 - entropy_h(ch.nbar), 0.0);
}

double q2_thermal_upper(const ChannelPoint& ch) {
  check_channel(ch);
  if (ch.nbar == 0.0) return q2(ch.eta);
  if (ch.eta == 1.0) return HUGE_VAL;
  // entanglement-breaking region: the bound is zero, not the raw formula
  if (ch.eta * (1.0 + ch.nbar) <= ch.nbar) return 0.0;
  const double v = -std::log1p(-ch.eta) / kLn2 - ch.nbar * std::log2(ch.eta) -
                   entropy_h(ch.nbar);
  return std::max(v, 0.0);
}

double q1_thermal_upper(const ChannelPoint& ch, DEConvention conv) {
  check_channel(ch);
  if (ch.eta == 1.0) return HUGE_VAL;
  const double t = q1_upper_twist(ch);
  if (t == 0.0) return 0.0;
  return std::min({t, q1_upper_de(ch, conv), q2_thermal_upper(ch)});
}

// ---- hypergeometric kernel of the thermal closed forms ----

double hyp2f1_special(double s, double z) {
  if (!(s > 0.0 && s < 1.0))
    throw std::invalid_argument("hyp2f1_special needs 0 < s < 1");
  if (!(z >= 0.0) || !std::isfinite(z))
    throw std::invalid_argument("hyp2f1_special needs finite z >= 0");
  if (z == 0.0) return 1.0;
  if (z <= 1.0e4) {
    // (1+z)^-s sum_k (s)_k/k! * s/(s+k) * w^k with w = z/(1+z)
    const double w = z / (1.0 + z);
    double a = 1.0;
    double sum = 1.0;
    for (long k = 0; k < 100000000L; ++k) {
      a *= (s + static_cast<double>(k)) / (static_cast<double>(k) + 1.0) * w;
      const double t = a * s / (s + static_cast<double>(k) + 1.0);
      sum += t;
      if (t < sum * 1e-17)
        return std::pow(1.0 + z, -s) * sum;
    }
    throw convergence_error("hyp2f1 series did not converge");
  }
  // large z: s z^-s pi/sin(pi s) - s sum_m (-1)^m z^-(1+m)/(m+1-s)
  const double lead = s * std::pow(z, -s) * kPi / std::sin(kPi * s);
  double corr = 0.0;
  double zp = 1.0 / z;
  for (int m = 0; m < 400; ++m) {
    const double t = (m % 2 == 0 ? zp : -zp) / (m + 1.0 - s);
    corr += t;
    zp /= z;
    if (std::fabs(t) <= 1e-18 * std::max(1.0, std::fabs(corr))) break;
  }
  return lead - s * corr;
}

// ---- spectral model ----

namespace detail {

LineShape LineShape::build(const TransducerParams& p) {
  p.validate();
  LineShape s;
  s.params = p;
  s.modes = p.total_modes();
  s.log_k2 = log_peak_numerator(p);
  s.root_radius = root_bound(p);

  bool resonant = true;
  const double d0 = p.detunings.front();
  const double dtol = 1e-12 * std::max(1.0, std::fabs(d0));
  for (double d : p.detunings)
    if (std::fabs(d - d0) > dtol) { resonant = false; break; }

  if (resonant) {
    const std::vector<double> c = matching_char_poly(p);
    const double lg_unit = std::log10(std::max(s.root_radius, 1e-300));
    double lg_res = -HUGE_VAL;
    for (int k = 0; k + 1 < static_cast<int>(c.size()); ++k) {
      if (c[k] == 0.0) continue;
      lg_res = std::max(lg_res,
                        std::log10(std::fabs(c[k])) - (s.modes - k) * lg_unit);
    }
    if (lg_res < -10.0) {
      s.deflated = true;
      s.omega_c = -d0;
    }
  }

  if (s.deflated) {
    s.scale = std::exp(s.log_k2 / (2.0 * s.modes));
    return s;
  }

  // Ripple designs can still carry a multiple zero of Mr at the band
  // center, where the additive rounding noise of the continuant drowns the
  // true value over a band of width eps^(1/multiplicity). The coefficient
  // form of |Mr|^2 is exact, so strip the leading coefficients that sit
  // below the recurrence noise floor; inside the radius where the quotient
  // is dominated by its constant term, Horner on the stripped quotient
  // keeps full relative accuracy. The continuant stays in charge outside,
  // where its local conditioning is the better of the two.
  double dsum = 0.0;
  for (double d : p.detunings) dsum += d;
  s.center = resonant ? -d0 : -dsum / p.detunings.size();
  const std::vector<double> a2 = abs2_reflection_poly(p, s.center);
  double amax = 0.0;
  for (double a : a2) amax = std::max(amax, std::fabs(a));
  const double tau = 64.0 * a2.size() * amax *
                     std::numeric_limits<double>::epsilon();
  size_t k0 = 0;
  while (k0 + 1 < a2.size() && std::fabs(a2[k0]) <= tau) ++k0;
  s.strip = static_cast<int>(k0);
  s.mr_quot.assign(a2.begin() + static_cast<long>(k0), a2.end());
  const double q0 = std::fabs(s.mr_quot.front());
  auto tail = [&s](double u) {
    double t = 0.0, up = 1.0;
    for (size_t i = 1; i < s.mr_quot.size(); ++i) {
      up *= u;
      t += std::fabs(s.mr_quot[i]) * up;
    }
    return t;
  };
  double rlo = 0.0, rhi = s.root_radius + 1.0;
  if (tail(rhi) <= 0.5 * q0) {
    rlo = rhi;
  } else {
    for (int it = 0; it < 200; ++it) {
      const double m = 0.5 * (rlo + rhi);
      if (m <= rlo || m >= rhi) break;
      if (tail(m) <= 0.5 * q0) rlo = m; else rhi = m;
    }
  }
  s.poly_radius = rlo;

  // peak of the efficiency: minimum of ln|D|^2
  const double W = 2.0 * s.root_radius + 1.0;
  const int n = 4000;
  double xb = 0.0, fb = HUGE_VAL;
  for (int i = 0; i <= n; ++i) {
    const double x = -W + 2.0 * W * i / n;
    const double v = s.log_d2(x);
    if (v < fb) { fb = v; xb = x; }
  }
  double a = xb - 2.0 * W / n, b = xb + 2.0 * W / n;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c1 = b - gr * (b - a), c2 = a + gr * (b - a);
  double f1 = s.log_d2(c1), f2 = s.log_d2(c2);
  for (int it = 0;
       it < 220 && (b - a) > 1e-14 * std::max(1.0, std::fabs(a) + std::fabs(b));
       ++it) {
    if (f1 < f2) {
      b = c2; c2 = c1; f2 = f1;
      c1 = b - gr * (b - a); f1 = s.log_d2(c1);
    } else {
      a = c1; c1 = c2; f1 = f2;
      c2 = a + gr * (b - a); f2 = s.log_d2(c2);
    }
  }
  s.omega_c = 0.5 * (a + b);

  // half width at half maximum, wider side wins
  const double target = s.log_d2(s.omega_c) + kLn2;
  auto half = [&s, target](double dir) {
    double hprev = 0.0;
    double h = std::max(s.root_radius, 1.0) / 1024.0;
    int grow = 0;
    while (grow < 200 && s.log_d2(s.omega_c + dir * h) < target) {
      hprev = h;
      h *= 1.4;
      ++grow;
    }
    if (grow >= 200) return std::max(s.root_radius, 1.0);
    double lo = hprev, hi = h;
    for (int it = 0; it < 120; ++it) {
      const double m = 0.5 * (lo + hi);
      if (m <= lo || m >= hi) break;
      if (s.log_d2(s.omega_c + dir * m) < target) lo = m; else hi = m;
    }
    return 0.5 * (lo + hi);
  };
  s.scale = std::max(half(1.0), half(-1.0));
  return s;
}

}  // namespace detail

// ---- frequency integration ----

namespace {

using Interval = std::pair<double, double>;

// Roots of F bracketed by a sign scan; F < 0 marks the inside of the support.
// Handles disconnected supports (efficiency ripple crossing the threshold).
std::vector<Interval> support_intervals(const std::function<double(double)>& F,
                                        double lo, double hi,
                                        const std::vector<double>& forced) {
  const int n = 4000;
  std::vector<double> xs;
  xs.reserve(n + 1 + forced.size());
  for (int i = 0; i <= n; ++i) xs.push_back(lo + (hi - lo) * i / n);
  for (double x : forced)
    if (x > lo && x < hi) xs.push_back(x);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  std::vector<double> fs(xs.size());
  for (size_t i = 0; i < xs.size(); ++i) fs[i] = F(xs[i]);

  auto bisect = [&F](double a, double b, double fa) {
    for (int it = 0; it < 200; ++it) {
      const double m = 0.5 * (a + b);
      if (m <= a || m >= b) break;
      const double fm = F(m);
      if ((fm < 0.0) == (fa < 0.0)) { a = m; fa = fm; } else { b = m; }
    }
    return 0.5 * (a + b);
  };

  std::vector<Interval> parts;
  bool inside = fs[0] < 0.0;
  double start = xs[0];
  for (size_t i = 1; i < xs.size(); ++i) {
    const bool in2 = fs[i] < 0.0;
    if (in2 != inside) {
      const double r = bisect(xs[i - 1], xs[i], fs[i - 1]);
      if (inside) parts.emplace_back(start, r); else start = r;
      inside = in2;
    }
  }
  if (inside) parts.emplace_back(start, xs.back());
  return parts;
}

CapacityEstimate run_intervals(const std::function<double(double)>& f,
                               const std::vector<Interval>& parts,
                               const std::vector<double>& inner_breaks,
                               const QuadratureConfig& cfg) {
  CapacityEstimate est;
  est.method = Method::numeric_quadrature;
  const double abs_each =
      cfg.abs_tol / static_cast<double>(std::max<size_t>(1, parts.size()));
  for (const auto& [a, b] : parts) {
    std::vector<double> bks;
    for (double c : inner_breaks)
      if (c > a && c < b) bks.push_back(c);
    const IntegrationResult r =
        integrate_adaptive(f, a, b, cfg.rel_tol, abs_each, cfg.max_intervals, bks);
    if (!r.converged)
      throw convergence_error("capacity quadrature exhausted its refinement budget");
    est.value += r.value;
    est.abs_error += r.abs_error;
  }
  return est;
}

}  // namespace

CapacityEstimate integrate_capacity(const TransducerParams& p, Protocol protocol,
                                    Bound bound, double nbar,
                                    const QuadratureConfig& cfg,
                                    DEConvention conv) {
  p.validate();
  if (!(nbar >= 0.0) || !std::isfinite(nbar))
    throw std::invalid_argument("nbar must be finite and >= 0");
  if (bound != Bound::pure && nbar == 0.0) bound = Bound::pure;

  const detail::LineShape model = detail::LineShape::build(p);
  const double lk2 = model.log_k2;
  const double M2 = 2.0 * model.modes;
  const double hn = bound == Bound::pure ? 0.0 : entropy_h(nbar);

  std::vector<double> breaks;
  if (cfg.singularity_split) breaks.push_back(model.omega_c);

  if (protocol == Protocol::two_way && bound == Bound::pure) {
    // infinite support with omega^-2m tails; truncate and bound the rest
    auto f = [model](double w) {
      return (model.log_d2(w) - model.log_m2(w)) / kLn2;
    };
    const double excess = std::exp(lk2 / M2);
    const double wc = model.omega_c;
    const double W = std::max(cfg.window_halfwidth_bandwidths * model.scale,
                              std::fabs(wc) + model.root_radius + 3.0 * excess +
                                  model.scale);
    CapacityEstimate est = run_intervals(f, {{wc - W, wc + W}}, breaks, cfg);
    for (double e : {wc - W, wc + W}) {
      const double d = std::fabs(e) - model.root_radius;
      const double eta_d = std::exp(lk2 - M2 * std::log(d));
      est.abs_error += std::exp(lk2 + (1.0 - M2) * std::log(d)) /
                       ((M2 - 1.0) * (1.0 - eta_d) * kLn2);
    }
    return est;
  }

  // Everything else has compact support. F < 0 inside, and the support lies
  // within |omega| <= root_radius + (K^2 tau)^(1/2m) because the numerator
  // polynomials are monic with all zeros inside the root radius.
  std::function<double(double)> f, F;
  double tau_ln = 0.0;

  if (protocol == Protocol::one_way && bound == Bound::pure) {
    f = [model](double w) {
      return std::max((model.log_k2 - model.log_m2(w)) / kLn2, 0.0);
    };
    F = [model](double w) { return model.log_m2(w) - model.log_k2; };
    tau_ln = 0.0;
  } else if (protocol == Protocol::one_way && bound == Bound::thermal_lower) {
    const double c = hn * kLn2;
    f = [model, hn](double w) {
      return std::max((model.log_k2 - model.log_m2(w)) / kLn2 - hn, 0.0);
    };
    F = [model, c](double w) { return model.log_m2(w) - model.log_k2 + c; };
    tau_ln = -c;
  } else if (protocol == Protocol::two_way && bound == Bound::thermal_lower) {
    const double c = hn * kLn2;
    f = [model, hn](double w) {
      return std::max((model.log_d2(w) - model.log_m2(w)) / kLn2 - hn, 0.0);
    };
    F = [model, c](double w) {
      return c - (model.log_d2(w) - model.log_m2(w));
    };
    tau_ln = -std::log(k_of(nbar));
  } else if (protocol == Protocol::two_way && bound == Bound::thermal_upper) {
    f = [model, nbar, hn](double w) {
      const double ld2 = model.log_d2(w);
      const double v = (ld2 - model.log_m2(w)) / kLn2 -
                       nbar * (model.log_k2 - ld2) / kLn2 - hn;
      return std::max(v, 0.0);
    };
    // support ends where the channel turns entanglement breaking
    const double c_eb = -std::log1p(1.0 / nbar);
    F = [model, c_eb](double w) {
      return model.log_d2(w) - model.log_k2 + c_eb;
    };
    tau_ln = std::log1p(1.0 / nbar);
  } else {
    // one-way thermal upper: min of the three candidates, shared support
    // with the first of them
    f = [model, nbar, hn, conv](double w) {
      const double lm2 = model.log_m2(w);
      const double ld2 = model.log_d2(w);
      const double e_log = lm2 - ld2;  // ln(1-eta)
      const double e = std::exp(e_log);
      const double arg = 1.0 - e * (1.0 + nbar);
      if (!(arg > 0.0)) return 0.0;
      const double twist =
          (std::log(arg) - e_log - std::log1p(nbar)) / kLn2;
      if (!(twist > 0.0)) return 0.0;
      const double r_log = model.log_k2 - lm2;
      const double hdiff = entropy_h(e * nbar) -
                           entropy_h(std::exp(model.log_k2 - ld2) * nbar);
      double de;
      if (conv == DEConvention::h_outside_log) {
        de = r_log / kLn2 + hdiff;
      } else if (r_log > 40.0) {
        de = (r_log + std::log1p(hdiff * std::exp(-r_log))) / kLn2;
      } else {
        const double u = std::exp(r_log) + hdiff;
        de = u > 0.0 ? std::log2(u) : 0.0;
      }
      if (de < 0.0) de = 0.0;
      double q2u = (ld2 - lm2) / kLn2 - nbar * (model.log_k2 - ld2) / kLn2 - hn;
      if (q2u < 0.0) q2u = 0.0;
      return std::min(std::min(twist, de), q2u);
    };
    const double c = kLn2 + std::log1p(nbar);  // ln(2(1+nbar))
    F = [model, c](double w) {
      return model.log_m2(w) - model.log_d2(w) + c;
    };
    tau_ln = -std::log1p(2.0 * nbar);
  }

  const double B = model.root_radius + std::exp((lk2 + tau_ln) / M2);
  const double pad = 0.01 * (B + 1.0);
  const std::vector<Interval> parts =
      support_intervals(F, -B - pad, B + pad, {model.omega_c});
  if (parts.empty()) return CapacityEstimate{0.0, 0.0, Method::numeric_quadrature};
  return run_intervals(f, parts, breaks, cfg);
}

// ---- closed forms for the maximally flat family ----

namespace {

int require_stages(int n_stages) {
  if (n_stages < 0) throw std::invalid_argument("stage count must be >= 0");
  return n_stages + 2;
}

}  // namespace

double mf_Q1_closed(int n_stages) {
  const int m = require_stages(n_stages);
  return 4.0 * m * mf_bandwidth(n_stages, 1.0) / kLn2;
}

double mf_Q2_closed(int n_stages) {
  const int m = require_stages(n_stages);
  return 2.0 * kPi * mf_bandwidth(n_stages, 1.0) /
         (kLn2 * std::sin(kPi / (2.0 * m)));
}

double q_max() { return 4.0 * std::sqrt(3.0) * kPi / kLn2; }

double mf_Q1_thermal_lower_closed(int n_stages, double nbar) {
  const int m = require_stages(n_stages);
  if (!(nbar >= 0.0) || !std::isfinite(nbar))
    throw std::invalid_argument("nbar must be finite and >= 0");
  if (nbar == 0.0) return mf_Q1_closed(n_stages);
  return mf_Q1_closed(n_stages) * std::exp2(-entropy_h(nbar) / (2.0 * m));
}

double mf_Q2_thermal_lower_closed(int n_stages, double nbar) {
  const int m = require_stages(n_stages);
  if (!(nbar >= 0.0) || !std::isfinite(nbar))
    throw std::invalid_argument("nbar must be finite and >= 0");
  if (nbar == 0.0) return mf_Q2_closed(n_stages);
  const double kk = k_of(nbar);
  const double s = 1.0 / (2.0 * m);
  return 4.0 * m * mf_bandwidth(n_stages, 1.0) *
         hyp2f1_special(s, 1.0 / kk) / (kLn2 * std::pow(kk, s));
}

double mf_Q2_thermal_upper_closed(int n_stages, double nbar) {
  const int m = require_stages(n_stages);
  if (!(nbar >= 0.0) || !std::isfinite(nbar))
    throw std::invalid_argument("nbar must be finite and >= 0");
  if (nbar == 0.0) return mf_Q2_closed(n_stages);
  const double s = 1.0 / (2.0 * m);
  const double bracket =
      (nbar + 1.0) * hyp2f1_special(s, 1.0 / nbar) - nbar;
  return 4.0 * m * mf_bandwidth(n_stages, 1.0) * bracket /
         (kLn2 * std::pow(nbar, s));
}

}  // namespace qtcap
