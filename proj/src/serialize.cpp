#include "qtcap/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace qtcap {

namespace {

using nlohmann::json;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json require_key(const json& j, const char* key) {
  if (!j.contains(key))
    throw io_error(std::string("missing key '") + key + "'");
  return j.at(key);
}

double number_at(const json& j, const char* key) {
  const json v = require_key(j, key);
  if (!v.is_number()) throw io_error(std::string("key '") + key + "' must be a number");
  return v.get<double>();
}

}  // namespace

std::string params_to_json(const TransducerParams& p, double omega_c) {
  json j;
  j["n_stages"] = p.n_stages;
  j["kappa_a"] = p.kappa_a;
  j["kappa_b"] = p.kappa_b;
  j["detunings"] = p.detunings;
  j["couplings"] = p.couplings;
  j["omega_c"] = omega_c;
  return j.dump(2) + "\n";
}

ParamsFile params_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw io_error(std::string("malformed design file: ") + e.what());
  }
  if (!j.is_object()) throw io_error("design file must hold a JSON object");

  ParamsFile f;
  try {
    const json ns = require_key(j, "n_stages");
    if (!ns.is_number_integer() || ns.get<long long>() < 0)
      throw io_error("n_stages must be a non-negative integer");
    f.params.n_stages = ns.get<int>();
    f.params.kappa_a = number_at(j, "kappa_a");
    f.params.kappa_b = number_at(j, "kappa_b");
    const json det = require_key(j, "detunings");
    const json cpl = require_key(j, "couplings");
    if (!det.is_array() || !cpl.is_array())
      throw io_error("detunings and couplings must be arrays");
    f.params.detunings = det.get<std::vector<double>>();
    f.params.couplings = cpl.get<std::vector<double>>();
    f.omega_c = number_at(j, "omega_c");
  } catch (const json::exception& e) {
    throw io_error(std::string("malformed design file: ") + e.what());
  }
  try {
    f.params.validate();
  } catch (const std::invalid_argument& e) {
    throw io_error(std::string("invalid design: ") + e.what());
  }
  if (!std::isfinite(f.omega_c)) throw io_error("invalid design: omega_c must be finite");
  return f;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw io_error("failed reading '" + path + "'");
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw io_error("failed writing '" + path + "'");
}

ParamsFile load_params_file(const std::string& path) {
  return params_from_json(read_text_file(path));
}

const char* protocol_name(Protocol p) {
  return p == Protocol::one_way ? "one-way" : "two-way";
}

const char* bound_name(Bound b) {
  switch (b) {
    case Bound::pure: return "pure";
    case Bound::thermal_lower: return "thermal-lower";
    default: return "thermal-upper";
  }
}

const char* method_name(Method m) {
  return m == Method::numeric_quadrature ? "numeric-quadrature" : "closed-form";
}

Protocol protocol_from_name(const std::string& s) {
  if (s == "one-way") return Protocol::one_way;
  if (s == "two-way") return Protocol::two_way;
  throw std::invalid_argument("unknown protocol '" + s + "'");
}

Bound bound_from_name(const std::string& s) {
  if (s == "pure") return Bound::pure;
  if (s == "thermal-lower") return Bound::thermal_lower;
  if (s == "thermal-upper") return Bound::thermal_upper;
  throw std::invalid_argument("unknown bound '" + s + "'");
}

std::string capacity_to_json(const CapacityEstimate& est, Protocol protocol,
                             Bound bound, double nbar) {
  json j;
  j["value"] = est.value;
  j["abs_error"] = est.abs_error;
  j["method"] = method_name(est.method);
  j["protocol"] = protocol_name(protocol);
  j["bound"] = bound_name(bound);
  j["nbar"] = nbar;
  return j.dump(2) + "\n";
}

std::string spectrum_to_csv(const std::vector<std::pair<double, double>>& rows) {
  std::string out = "omega,efficiency\n";
  for (const auto& [w, eta] : rows)
    out += fmt17(w) + "," + fmt17(eta) + "\n";
  return out;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  bool closed = false;
  for (const SweepRow& r : rows) closed = closed || r.has_closed;
  std::string out = closed ? "N,Q,abs_error,Q_closed\n" : "N,Q,abs_error\n";
  for (const SweepRow& r : rows) {
    out += std::to_string(r.n_stages) + "," + fmt17(r.value) + "," +
           fmt17(r.abs_error);
    if (closed) out += "," + (r.has_closed ? fmt17(r.closed) : std::string());
    out += "\n";
  }
  return out;
}

std::string ladder_to_json(const LadderNetwork& net) {
  json j;
  j["order"] = net.order;
  j["R"] = std::vector<double>{net.resistance_in, net.resistance_out};
  j["L"] = net.inductances;
  j["C"] = net.capacitances;
  return j.dump(2) + "\n";
}

std::string search_to_json(const SearchResult& r) {
  json j;
  j["axes"] = r.axis_names;
  json best = json::object();
  for (size_t a = 0; a < r.axis_names.size(); ++a)
    best[r.axis_names[a]] = r.best_point[a];
  j["best_point"] = best;
  j["best_value"] = r.best_value;
  j["best_abs_error"] = r.best_abs_error;
  j["failed_points"] = r.failed_points;
  j["n_samples"] = r.grid_samples.size();
  json hist = json::array();
  for (const RefinementStep& s : r.refinement_history)
    hist.push_back({{"max_spacing", s.max_spacing}, {"best_value", s.best_value}});
  j["refinement"] = hist;
  return j.dump(2) + "\n";
}

std::string search_samples_to_csv(const SearchResult& r) {
  std::string out;
  for (size_t a = 0; a < r.axis_names.size(); ++a)
    out += r.axis_names[a] + ",";
  out += "value,ok\n";
  for (const SearchSample& s : r.grid_samples) {
    for (double v : s.point) out += fmt17(v) + ",";
    out += fmt17(s.value);
    out += s.ok ? ",1\n" : ",0\n";
  }
  return out;
}

}  // namespace qtcap
