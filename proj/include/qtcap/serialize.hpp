#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qtcap/capacity.hpp"
#include "qtcap/designs.hpp"
#include "qtcap/optimize.hpp"

namespace qtcap {

// file access problems and malformed input files
struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParamsFile {
  TransducerParams params;
  double omega_c = 0.0;
};

// JSON with keys n_stages, kappa_a, kappa_b, detunings, couplings, omega_c.
// Doubles are written shortest-round-trip, so load(save(x)) == x bit for bit.
std::string params_to_json(const TransducerParams& p, double omega_c);
ParamsFile params_from_json(const std::string& text);
ParamsFile load_params_file(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

const char* protocol_name(Protocol p);
const char* bound_name(Bound b);
const char* method_name(Method m);
Protocol protocol_from_name(const std::string& s);
Bound bound_from_name(const std::string& s);

std::string capacity_to_json(const CapacityEstimate& est, Protocol protocol,
                             Bound bound, double nbar);

// header omega,efficiency
std::string spectrum_to_csv(const std::vector<std::pair<double, double>>& rows);

struct SweepRow {
  int n_stages = 0;
  double value = 0.0;
  double abs_error = 0.0;
  double closed = 0.0;
  bool has_closed = false;
};

// header N,Q,abs_error and a Q_closed column when any row carries one
std::string sweep_to_csv(const std::vector<SweepRow>& rows);

// keys order, R, L, C
std::string ladder_to_json(const LadderNetwork& net);

std::string search_to_json(const SearchResult& r);
// one row per evaluated grid point: the axis values, then value, then ok
std::string search_samples_to_csv(const SearchResult& r);

}  // namespace qtcap
