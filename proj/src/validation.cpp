#include "qtcap/validation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include <json.hpp>

#include "qtcap/designs.hpp"
#include "qtcap/optimize.hpp"
#include "qtcap/quadrature.hpp"

namespace qtcap {

namespace {

void add(ValidationReport& rep, std::string name, double observed, double limit,
         std::string note = "") {
  ValidationCheck c;
  c.name = std::move(name);
  c.observed = observed;
  c.limit = limit;
  c.pass = observed <= limit;
  c.note = std::move(note);
  (c.pass ? rep.n_pass : rep.n_fail)++;
  rep.checks.push_back(std::move(c));
}

double rel_diff(double a, double b) {
  return std::fabs(a - b) / std::max({std::fabs(a), std::fabs(b), 1e-300});
}

// largest matching-polynomial coefficient after scaling out the frequency
// unit; zero for an ideal maximally flat chain
double nilpotency_residual(const TransducerParams& p) {
  const std::vector<double> c = matching_char_poly(p);
  const int m = p.total_modes();
  const double lg_unit = std::log10(std::max(root_bound(p), 1e-300));
  double worst = 0.0;
  for (int k = 0; k + 1 < static_cast<int>(c.size()); ++k) {
    if (c[k] == 0.0) continue;
    worst = std::max(
        worst, std::pow(10.0, std::log10(std::fabs(c[k])) - (m - k) * lg_unit));
  }
  return worst;
}

double euler_kernel_integral(double s, double z) {
  auto f = [s, z](double u) { return 1.0 / (1.0 + z * std::pow(u, 1.0 / s)); };
  const IntegrationResult r = integrate_adaptive(f, 0.0, 1.0, 1e-13, 0.0, 4000, {});
  return r.value;
}

}  // namespace

ValidationReport run_validation(const ValidationOptions& opt) {
  if (opt.max_stages < 0)
    throw std::invalid_argument("max_stages must be >= 0");
  const int S = opt.max_stages;
  ValidationReport rep;
  const QuadratureConfig cfg;

  // line shape against the closed form
  for (int n = 0; n <= S; ++n) {
    const MFDesign d = maximally_flat_params(n, 1.0, 0.0);
    double worst = 0.0;
    for (int i = 0; i <= 1000; ++i) {
      const double w = -5.0 * d.bandwidth + 10.0 * d.bandwidth * i / 1000.0;
      worst = std::max(worst,
                       std::fabs(conversion_efficiency(d.params, w) -
                                 mf_efficiency_closed_form(n, 1.0, 0.0, w)));
    }
    add(rep, "line shape matches closed form, N=" + std::to_string(n), worst, 1e-9);
  }

  // pure capacities against closed forms
  for (int n = 0; n <= std::min(S, 8); ++n) {
    const TransducerParams p = maximally_flat_params(n, 1.0, 0.0).params;
    const double r1 = rel_diff(
        integrate_capacity(p, Protocol::one_way, Bound::pure, 0.0, cfg).value,
        mf_Q1_closed(n));
    const double r2 = rel_diff(
        integrate_capacity(p, Protocol::two_way, Bound::pure, 0.0, cfg).value,
        mf_Q2_closed(n));
    add(rep, "one-way rate vs closed form, N=" + std::to_string(n), r1, 1e-6);
    add(rep, "two-way rate vs closed form, N=" + std::to_string(n), r2, 1e-6);
  }

  // large-N limit and monotonicity of the closed forms
  add(rep, "one-way closed form at N=200 near the limit",
      rel_diff(mf_Q1_closed(200), q_max()), 1e-3);
  add(rep, "two-way closed form at N=200 near the limit",
      rel_diff(mf_Q2_closed(200), q_max()), 1e-3);
  {
    int viol = 0;
    for (int n = 1; n <= 200; ++n) {
      if (mf_Q1_closed(n) <= mf_Q1_closed(n - 1)) ++viol;
      if (mf_Q2_closed(n) <= mf_Q2_closed(n - 1)) ++viol;
    }
    add(rep, "closed forms strictly increase in N up to 200", viol, 0);
  }

  // thermal capacities against closed forms
  for (int n : {0, 2, 4}) {
    if (n > S) continue;
    const TransducerParams p = maximally_flat_params(n, 1.0, 0.0).params;
    for (double nb : {1.0, 10.0}) {
      const double a = rel_diff(
          integrate_capacity(p, Protocol::one_way, Bound::thermal_lower, nb, cfg).value,
          mf_Q1_thermal_lower_closed(n, nb));
      const double b = rel_diff(
          integrate_capacity(p, Protocol::two_way, Bound::thermal_lower, nb, cfg).value,
          mf_Q2_thermal_lower_closed(n, nb));
      const double c = rel_diff(
          integrate_capacity(p, Protocol::two_way, Bound::thermal_upper, nb, cfg).value,
          mf_Q2_thermal_upper_closed(n, nb));
      const std::string tag =
          " N=" + std::to_string(n) + " nbar=" + std::to_string(static_cast<int>(nb));
      add(rep, "thermal one-way lower vs closed form," + tag, a, 1e-5);
      add(rep, "thermal two-way lower vs closed form," + tag, b, 1e-5);
      add(rep, "thermal two-way upper vs closed form," + tag, c, 1e-5);
    }
  }

  // matching polynomial nilpotency
  for (int n = 0; n <= S; ++n)
    add(rep, "matching polynomial nilpotent, N=" + std::to_string(n),
        nilpotency_residual(maximally_flat_params(n, 1.0, 0.0).params), 1e-8);

  // ladder correspondence
  for (int n = 0; n <= S; ++n)
    add(rep, "ladder correspondence, N=" + std::to_string(n),
        verify_butterworth_correspondence(n).max_mismatch, 1e-12);

  // flatness orders
  for (int n = 0; n <= std::min(S, 3); ++n) {
    const int order =
        flatness_order(maximally_flat_params(n, 1.0, 0.0).params, 0.0, 12);
    add(rep, "flatness order of the flat design, N=" + std::to_string(n),
        order >= 2 * n + 3 ? 0 : 1, 0, "order " + std::to_string(order));
  }
  if (S >= 2)
    add(rep, "flatness order of the uniform design, N=2",
        std::abs(flatness_order(uniform_params(2, 1.0, 0.0), 0.0, 12) - 3), 0);
  if (S >= 3)
    add(rep, "flatness order of the uniform design, N=3",
        std::abs(flatness_order(uniform_params(3, 1.0, 0.0), 0.0, 12) - 5), 0);

  // family comparison
  {
    const int top = std::min(S, 10);
    const std::vector<FamilyComparison> rows =
        uniform_capacity_sweep(top, Objective::q1, cfg);
    int viol = 0;
    for (const FamilyComparison& r : rows)
      if (r.q_flat < r.q_uniform - 1e-9 * std::max(1.0, r.q_uniform)) ++viol;
    add(rep, "flat family dominates uniform family in one-way rate", viol, 0);
    if (top >= 1)
      add(rep, "families coincide at N=1",
          rel_diff(rows[1].q_flat, rows[1].q_uniform), 1e-6);
    if (top >= 10)
      add(rep, "flat/uniform one-way ratio exceeds 1.3 at N=10",
          rows[10].q_flat / rows[10].q_uniform > 1.3 ? 0 : 1, 0);
  }

  // pointwise bound ordering, monotonicity in nbar, reduction at nbar=0
  {
    int viol = 0;
    std::vector<double> nbars{0.0};
    for (int k = 0; k < 20; ++k) nbars.push_back(std::pow(10.0, -3.0 + 6.0 * k / 19.0));
    for (int i = 1; i <= 100; ++i) {
      const double eta = i / 101.0;
      double prev_q1l = HUGE_VAL, prev_q2l = HUGE_VAL;
      double prev_q1u = HUGE_VAL, prev_q2u = HUGE_VAL;
      for (double nb : nbars) {
        const ChannelPoint ch{eta, nb};
        const double v_q1l = q1_thermal_lower(ch);
        const double v_q2l = q2_thermal_lower(ch);
        const double v_q2u = q2_thermal_upper(ch);
        const double v_q1u_o = q1_thermal_upper(ch, DEConvention::h_outside_log);
        const double v_q1u_i = q1_thermal_upper(ch, DEConvention::h_inside_log);
        const double slack = 1e-12 * std::max(1.0, v_q2u);
        if (v_q1l > v_q1u_o + slack) ++viol;
        if (opt.both_de_conventions && v_q1l > v_q1u_i + slack) ++viol;
        if (v_q1l > v_q2l + slack) ++viol;
        if (v_q1u_o > v_q2u + slack) ++viol;
        if (v_q2l > v_q2u + slack) ++viol;
        if (nb == 0.0) {
          if (v_q1l != q1(eta) || v_q2l != q2(eta) || v_q2u != q2(eta)) ++viol;
          if (std::fabs(v_q1u_o - q1(eta)) > 1e-14 * std::max(1.0, q1(eta))) ++viol;
        }
        if (v_q1l > prev_q1l + slack || v_q2l > prev_q2l + slack ||
            v_q1u_o > prev_q1u + slack || v_q2u > prev_q2u + slack)
          ++viol;
        prev_q1l = v_q1l; prev_q2l = v_q2l; prev_q1u = v_q1u_o; prev_q2u = v_q2u;
      }
    }
    add(rep, "channel bounds ordered, monotone in nbar, reduce at nbar=0", viol, 0,
        "100 x 21 channel grid");
  }

  // hypergeometric kernel against its integral representation
  {
    double worst = 0.0;
    for (double s : {0.05, 0.15, 0.25, 0.35, 0.45})
      for (double z : {0.1, 1.0, 10.0, 100.0})
        worst = std::max(worst,
                         rel_diff(hyp2f1_special(s, z), euler_kernel_integral(s, z)));
    add(rep, "hypergeometric kernel matches integral form", worst, 1e-10);
  }

  // lossless split: |D|^2 = |Mr|^2 + K^2 on random chains
  {
    std::mt19937 rng(20240817u);
    std::uniform_real_distribution<double> ukap(0.2, 4.0), udet(-2.0, 2.0),
        ug(0.1, 1.5), uw(-5.0, 5.0);
    std::uniform_int_distribution<int> un(0, 10);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
      TransducerParams p;
      p.n_stages = un(rng);
      p.kappa_a = ukap(rng);
      p.kappa_b = ukap(rng);
      p.detunings.resize(p.total_modes());
      for (double& d : p.detunings) d = udet(rng);
      p.couplings.resize(p.n_stages + 1);
      for (double& g : p.couplings) g = ug(rng);
      const double lk2 = log_peak_numerator(p);
      for (int j = 0; j < 8; ++j) {
        const double w = uw(rng);
        const double ld2 = chain_determinant_scaled(p, w).log_abs2();
        const double lm2 = reflection_numerator_scaled(p, w).log_abs2();
        worst = std::max(worst, std::fabs(1.0 - std::exp(lm2 - ld2) -
                                          std::exp(lk2 - ld2)));
      }
    }
    add(rep, "determinant splits into reflection plus conversion", worst, 1e-12,
        "100 random chains");
  }

  if (opt.optimizer_smoke) {
    SearchSpace space;
    space.axes = {{"kappa_a", 1.0, 3.0, 9}, {"kappa_b", 1.0, 3.0, 9},
                  {"delta", -1.0, 1.0, 9}};
    const SearchResult r = grid_search_0stage(Objective::q2, space, cfg, 1);
    const double dev = std::max({std::fabs(r.best_point[0] - 2.0),
                                 std::fabs(r.best_point[1] - 2.0),
                                 std::fabs(r.best_point[2])});
    add(rep, "coarse search recovers the known 0-stage optimum", dev, 0.051,
        "grid spacing 0.05 after refinement");
  }

  return rep;
}

ValidationReport audit_design(const TransducerParams& p, double omega_c) {
  p.validate();
  if (!std::isfinite(omega_c))
    throw std::invalid_argument("omega_c must be finite");
  ValidationReport rep;

  double det_dev = 0.0;
  for (double d : p.detunings) det_dev = std::max(det_dev, std::fabs(d + omega_c));
  add(rep, "detunings sit at the working point", det_dev,
      1e-9 * std::max(1.0, std::fabs(omega_c)));

  add(rep, "matching polynomial nilpotent", nilpotency_residual(p), 1e-8);

  const int m = p.total_modes();
  const double gbar = std::exp(log_peak_numerator(p) / (2.0 * m));
  double worst = 0.0;
  for (int i = 0; i <= 200; ++i) {
    const double w = omega_c - 5.0 * gbar + 10.0 * gbar * i / 200.0;
    const double x = (w - omega_c) / gbar;
    const double t = 2.0 * m * std::log(std::fabs(x));
    const double closed =
        (x == 0.0 || t < 0.0) ? 1.0 / (std::exp(std::max(t, -745.0)) + 1.0)
                              : std::exp(-t) / (1.0 + std::exp(-t));
    worst = std::max(worst, std::fabs(conversion_efficiency(p, w) - closed));
  }
  add(rep, "line shape matches the flat closed form", worst, 1e-9);
  return rep;
}

std::string report_to_text(const ValidationReport& rep) {
  std::string out;
  for (const ValidationCheck& c : rep.checks) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s  %-58s  observed %.3e  limit %.3e%s%s\n",
                  c.pass ? "PASS" : "FAIL", c.name.c_str(), c.observed, c.limit,
                  c.note.empty() ? "" : "  ", c.note.c_str());
    out += buf;
  }
  char tail[96];
  std::snprintf(tail, sizeof tail, "%d passed, %d failed\n", rep.n_pass, rep.n_fail);
  out += tail;
  return out;
}

std::string report_to_json(const ValidationReport& rep) {
  nlohmann::json j;
  j["n_pass"] = rep.n_pass;
  j["n_fail"] = rep.n_fail;
  nlohmann::json arr = nlohmann::json::array();
  for (const ValidationCheck& c : rep.checks)
    arr.push_back({{"name", c.name},
                   {"observed", c.observed},
                   {"limit", c.limit},
                   {"pass", c.pass},
                   {"note", c.note}});
  j["checks"] = arr;
  return j.dump(2) + "\n";
}

}  // namespace qtcap
