#pragma once

#include <string>
#include <vector>

#include "qtcap/capacity.hpp"

namespace qtcap {

struct ValidationCheck {
  std::string name;
  double observed = 0.0;  // measured discrepancy (or value, see note)
  double limit = 0.0;     // pass when observed <= limit
  bool pass = false;
  std::string note;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  int n_pass = 0;
  int n_fail = 0;
  bool all_pass() const { return n_fail == 0; }
};

struct ValidationOptions {
  int max_stages = 6;          // largest chain exercised by the battery
  bool optimizer_smoke = false;  // adds a coarse 0-stage recovery check
  // report the one-way thermal upper bound under both entropy-placement
  // readings of its second candidate
  bool both_de_conventions = true;
};

// Cross-checks the numeric machinery against every closed form: line shape,
// pure and thermal capacities, the large-N limit, nilpotency of the matching
// polynomial, the ladder correspondence, flatness orders, family comparison,
// bound ordering on a channel grid, and the hypergeometric kernel against
// its integral representation.
ValidationReport run_validation(const ValidationOptions& opt = {});

// Audits one design against the maximally flat contract: equal detunings,
// nilpotent matching polynomial, line shape equal to the closed form.
// A perturbed or generic design fails here; use it as a negative control.
ValidationReport audit_design(const TransducerParams& p, double omega_c);

std::string report_to_text(const ValidationReport& rep);
std::string report_to_json(const ValidationReport& rep);

}  // namespace qtcap
