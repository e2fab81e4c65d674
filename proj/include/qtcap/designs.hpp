#pragma once

#include <string>
#include <vector>

#include "qtcap/chain.hpp"

namespace qtcap {

// Maximally flat transducer: extraction rates and couplings chosen so the
// efficiency is 1/(((omega-omega_c)/bandwidth_hwhm)^(2(N+2)) + 1).
struct MFDesign {
  int n_stages = 0;
  double g_max = 1.0;
  double omega_c = 0.0;
  double bandwidth = 0.0;  // half width at half maximum
  TransducerParams params;
};

MFDesign maximally_flat_params(int n_stages, double g_max, double omega_c);

// 2 sqrt(sin(pi/(2(N+2))) sin(3 pi/(2(N+2)))) * g_max
double mf_bandwidth(int n_stages, double g_max);

double mf_efficiency_closed_form(int n_stages, double g_max, double omega_c,
                                 double omega);

// All couplings saturated at g_max, resonant, extraction rate set by the
// stage-count parity. Coincides with the maximally flat design at N=0 and 1.
TransducerParams uniform_params(int n_stages, double g_max, double omega_c);

// Largest k <= max_order such that the first k derivatives of the efficiency
// vanish at omega_c, decided from the exact polynomial coefficients of
// |D(omega)|^2 after scaling omega by the line width. Throws when the
// coefficient magnitudes straddle the decision threshold.
int flatness_order(const TransducerParams& p, double omega_c, int max_order);

// Doubly terminated LC ladder with a maximally flat transmission response,
// normalized to unit resistances and unit cutoff. Series inductor first:
// odd positions are inductors, even positions are capacitors.
struct LadderNetwork {
  int order = 2;
  double resistance_in = 1.0;
  double resistance_out = 1.0;
  std::vector<double> inductances;    // positions 1, 3, 5, ...
  std::vector<double> capacitances;   // positions 2, 4, 6, ...
  // element value by 1-based ladder position
  double element(int position) const;
};

LadderNetwork butterworth_elements(int order);

// power transmission 1/((omega/omega_cut)^(2 order) + 1)
double butterworth_gain(int order, double omega, double omega_cut);

struct IdentityCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
};

// Checks the dictionary between the maximally flat chain and the ladder:
// kappa_a/(2 gbar) = 1/e_1, g_j^2/gbar^2 = 1/(e_j e_{j+1}),
// kappa_b/(2 gbar) = 1/e_{N+2}, plus a pointwise gain comparison.
struct CorrespondenceReport {
  int n_stages = 0;
  double max_mismatch = 0.0;
  std::vector<IdentityCheck> identities;
};

CorrespondenceReport verify_butterworth_correspondence(int n_stages);

}  // namespace qtcap
