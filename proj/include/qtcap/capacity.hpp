#pragma once

#include <stdexcept>

#include "qtcap/chain.hpp"

namespace qtcap {

enum class Protocol { one_way, two_way };
enum class Bound { pure, thermal_lower, thermal_upper };
enum class Method { numeric_quadrature, closed_form };

// The degradable-extension upper bound appears in print with the entropy
// terms inside the log bracket; the sources it cites put them outside.
// Both readings are implemented; outside is the default. Never silently mix.
enum class DEConvention { h_outside_log, h_inside_log };

// Single-frequency thermal-loss channel.
struct ChannelPoint {
  double eta = 0.0;   // transmittance in [0,1]
  double nbar = 0.0;  // mean thermal photon number, >= 0
};

struct CapacityEstimate {
  double value = 0.0;      // qubits per second, units of g_max
  double abs_error = 0.0;  // quadrature + truncation error bound, 0 for closed forms
  Method method = Method::numeric_quadrature;
};

struct QuadratureConfig {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  // truncation half-width for infinite-support integrands, in units of the
  // half-width at half maximum of the efficiency line
  double window_halfwidth_bandwidths = 50.0;
  bool singularity_split = true;  // split integration intervals at the matched peak
  int max_intervals = 4000;
};

struct convergence_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Per-channel-use capacities at one frequency. eta=1 returns +inf.
double q1(double eta);
double q2(double eta);

// bosonic entropy function (x+1)log2(x+1) - x log2 x, h(0)=0
double entropy_h(double x);
// (1+x)(1+1/x)^x - 1 = 2^h(x) - 1, k(0)=0
double k_of(double x);

double q1_thermal_lower(const ChannelPoint& ch);
double q1_thermal_upper(const ChannelPoint& ch,
                        DEConvention conv = DEConvention::h_outside_log);
double q2_thermal_lower(const ChannelPoint& ch);
// Zero on entanglement-breaking channels (eta <= nbar/(1+nbar)); the raw
// formula diverges as eta -> 0 and only its positive branch above that
// threshold is a capacity bound.
double q2_thermal_upper(const ChannelPoint& ch);

// the two ingredients of q1_thermal_upper besides q2_thermal_upper,
// individually floored at zero
double q1_upper_twist(const ChannelPoint& ch);
double q1_upper_de(const ChannelPoint& ch,
                   DEConvention conv = DEConvention::h_outside_log);

// Gauss hypergeometric 2F1(1, s; 1+s; -z) for 0 < s < 1, z >= 0. Equals
// s * int_0^1 t^(s-1)/(1+z t) dt.
double hyp2f1_special(double s, double z);

// Continuous-time capacity: adaptive quadrature of the selected
// per-frequency capacity over all omega. Compact-support integrands are
// integrated over their exact support; the two-way pure-loss integrand has
// power-law tails which are truncated at the window with an analytic tail
// bound folded into abs_error. Throws convergence_error when the refinement
// budget is exhausted before reaching tolerance.
CapacityEstimate integrate_capacity(const TransducerParams& p, Protocol protocol,
                                    Bound bound, double nbar,
                                    const QuadratureConfig& cfg = {},
                                    DEConvention conv = DEConvention::h_outside_log);

// Closed forms for maximally flat designs, in units of g_max.
double mf_Q1_closed(int n_stages);
double mf_Q2_closed(int n_stages);
double q_max();  // common large-N limit 4*sqrt(3)*pi/ln2 of the two above
double mf_Q1_thermal_lower_closed(int n_stages, double nbar);
double mf_Q2_thermal_lower_closed(int n_stages, double nbar);
double mf_Q2_thermal_upper_closed(int n_stages, double nbar);

}  // namespace qtcap
