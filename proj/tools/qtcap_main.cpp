#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qtcap/capacity.hpp"
#include "qtcap/chain.hpp"
#include "qtcap/designs.hpp"
#include "qtcap/optimize.hpp"
#include "qtcap/serialize.hpp"
#include "qtcap/validation.hpp"

namespace {

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  qtcap::write_text_file(out_path, text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"capacities and optimal designs for multistage quantum transducers\n"
               "rates are reported in units of the coupling budget g_max"};
  app.require_subcommand(1);

  // design
  auto* design = app.add_subcommand("design", "emit a named chain design as JSON");
  std::string d_family;
  int d_stages = 0;
  double d_gmax = 1.0, d_omega_c = 0.0;
  std::string d_out;
  design->add_option("family", d_family, "design family")
      ->required()
      ->check(CLI::IsMember({"mf", "uniform"}));
  design->add_option("--stages", d_stages, "number of intermediate stages N")
      ->required()
      ->check(CLI::Range(0, 200));
  design->add_option("--gmax", d_gmax, "coupling budget")->check(CLI::PositiveNumber);
  design->add_option("--omega-c", d_omega_c, "working frequency");
  design->add_option("-o,--output", d_out, "write to file instead of stdout");

  // spectrum
  auto* spectrum = app.add_subcommand("spectrum", "tabulate the efficiency line as CSV");
  std::string s_design, s_out;
  double s_min = 0.0, s_max = 0.0;
  int s_points = 1001;
  spectrum->add_option("--design", s_design, "design JSON file")->required();
  spectrum->add_option("--omega-min", s_min)->required();
  spectrum->add_option("--omega-max", s_max)->required();
  spectrum->add_option("--points", s_points)->check(CLI::Range(2, 10000000));
  spectrum->add_option("-o,--output", s_out);

  // capacity
  auto* capacity = app.add_subcommand("capacity", "integrate a capacity for a design file");
  std::string c_design, c_protocol, c_bound = "pure", c_conv = "outside", c_out;
  double c_nbar = 0.0, c_rel = 1e-8, c_abs = 1e-10, c_window = 50.0;
  int c_max_intervals = 4000;
  bool c_no_split = false;
  capacity->add_option("--design", c_design, "design JSON file")->required();
  capacity->add_option("--protocol", c_protocol)
      ->required()
      ->check(CLI::IsMember({"one-way", "two-way"}));
  capacity->add_option("--bound", c_bound)
      ->check(CLI::IsMember({"pure", "thermal-lower", "thermal-upper"}));
  capacity->add_option("--nbar", c_nbar, "thermal occupation of the loss channel")
      ->check(CLI::NonNegativeNumber);
  capacity->add_option("--rel-tol", c_rel)->check(CLI::PositiveNumber);
  capacity->add_option("--abs-tol", c_abs)->check(CLI::NonNegativeNumber);
  capacity->add_option("--window", c_window,
                       "truncation half-width in line widths (two-way pure only)")
      ->check(CLI::PositiveNumber);
  capacity->add_option("--max-intervals", c_max_intervals)->check(CLI::Range(8, 1000000));
  capacity->add_flag("--no-split", c_no_split, "do not split intervals at the peak");
  capacity->add_option("--de-convention", c_conv,
                       "entropy placement in the second one-way upper-bound candidate")
      ->check(CLI::IsMember({"outside", "inside"}));
  capacity->add_option("-o,--output", c_out);

  // closed-form
  auto* closed = app.add_subcommand("closed-form", "closed-form capacity of the flat design");
  int f_stages = 0;
  std::string f_protocol, f_bound = "pure", f_out;
  double f_nbar = 0.0, f_gmax = 1.0;
  closed->add_option("--stages", f_stages)->required()->check(CLI::Range(0, 100000));
  closed->add_option("--protocol", f_protocol)
      ->required()
      ->check(CLI::IsMember({"one-way", "two-way"}));
  closed->add_option("--bound", f_bound)
      ->check(CLI::IsMember({"pure", "thermal-lower", "thermal-upper"}));
  closed->add_option("--nbar", f_nbar)->check(CLI::NonNegativeNumber);
  closed->add_option("--gmax", f_gmax, "coupling budget the rate scales with")
      ->check(CLI::PositiveNumber);
  closed->add_option("-o,--output", f_out);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "pure-loss capacity of a family over N, as CSV");
  int w_max = 8;
  std::string w_protocol, w_family = "mf", w_out;
  sweep->add_option("--stages-max", w_max)->required()->check(CLI::Range(0, 20));
  sweep->add_option("--protocol", w_protocol)
      ->required()
      ->check(CLI::IsMember({"one-way", "two-way"}));
  sweep->add_option("--family", w_family)->check(CLI::IsMember({"mf", "uniform"}));
  sweep->add_option("-o,--output", w_out);

  // optimize
  auto* optimize = app.add_subcommand("optimize", "exhaustive coupling search with refinement");
  int o_stages = 0, o_points = 21, o_refine = 1;
  std::string o_objective, o_out, o_samples;
  double o_kmin = 0.5, o_kmax = 4.0, o_dmin = -2.0, o_dmax = 2.0, o_glo = 0.05,
         o_ghi = 1.0;
  optimize->add_option("--stages", o_stages)->required()->check(CLI::Range(0, 12));
  optimize->add_option("--objective", o_objective)
      ->required()
      ->check(CLI::IsMember({"q1", "q2"}));
  optimize->add_option("--points", o_points)->check(CLI::Range(2, 201));
  optimize->add_option("--refine", o_refine)->check(CLI::Range(0, 8));
  optimize->add_option("--kappa-min", o_kmin)->check(CLI::PositiveNumber);
  optimize->add_option("--kappa-max", o_kmax)->check(CLI::PositiveNumber);
  optimize->add_option("--delta-min", o_dmin);
  optimize->add_option("--delta-max", o_dmax);
  optimize->add_option("--g-lo", o_glo)->check(CLI::PositiveNumber);
  optimize->add_option("--g-hi", o_ghi)->check(CLI::PositiveNumber);
  optimize->add_option("--samples-csv", o_samples, "also dump every grid sample");
  optimize->add_option("-o,--output", o_out);

  // butterworth
  auto* ladder = app.add_subcommand("butterworth", "maximally flat ladder element values");
  int l_order = 2;
  std::string l_out;
  ladder->add_option("--order", l_order)->required()->check(CLI::Range(2, 500));
  ladder->add_option("-o,--output", l_out);

  // validate
  auto* validate = app.add_subcommand("validate", "cross-check numerics against closed forms");
  int v_stages = 6;
  std::string v_design;
  bool v_smoke = false, v_json = false;
  validate->add_option("--stages-max", v_stages)->check(CLI::Range(2, 64));
  validate->add_option("--design", v_design, "audit one design file instead");
  validate->add_flag("--optimizer-smoke", v_smoke);
  validate->add_flag("--json", v_json);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*design) {
      if (d_family == "mf") {
        const qtcap::MFDesign d =
            qtcap::maximally_flat_params(d_stages, d_gmax, d_omega_c);
        emit(qtcap::params_to_json(d.params, d_omega_c), d_out);
      } else {
        emit(qtcap::params_to_json(
                 qtcap::uniform_params(d_stages, d_gmax, d_omega_c), d_omega_c),
             d_out);
      }
    } else if (*spectrum) {
      const qtcap::ParamsFile f = qtcap::load_params_file(s_design);
      emit(qtcap::spectrum_to_csv(
               qtcap::efficiency_spectrum(f.params, s_min, s_max, s_points)),
           s_out);
    } else if (*capacity) {
      const qtcap::ParamsFile f = qtcap::load_params_file(c_design);
      qtcap::QuadratureConfig cfg;
      cfg.rel_tol = c_rel;
      cfg.abs_tol = c_abs;
      cfg.window_halfwidth_bandwidths = c_window;
      cfg.singularity_split = !c_no_split;
      cfg.max_intervals = c_max_intervals;
      const qtcap::Protocol proto = qtcap::protocol_from_name(c_protocol);
      const qtcap::Bound bnd = qtcap::bound_from_name(c_bound);
      const qtcap::DEConvention conv = c_conv == "inside"
                                           ? qtcap::DEConvention::h_inside_log
                                           : qtcap::DEConvention::h_outside_log;
      const qtcap::CapacityEstimate est =
          qtcap::integrate_capacity(f.params, proto, bnd, c_nbar, cfg, conv);
      emit(qtcap::capacity_to_json(est, proto, bnd, c_nbar), c_out);
    } else if (*closed) {
      const qtcap::Protocol proto = qtcap::protocol_from_name(f_protocol);
      const qtcap::Bound bnd = qtcap::bound_from_name(f_bound);
      double v = 0.0;
      if (bnd == qtcap::Bound::pure) {
        v = proto == qtcap::Protocol::one_way ? qtcap::mf_Q1_closed(f_stages)
                                              : qtcap::mf_Q2_closed(f_stages);
      } else if (bnd == qtcap::Bound::thermal_lower) {
        v = proto == qtcap::Protocol::one_way
                ? qtcap::mf_Q1_thermal_lower_closed(f_stages, f_nbar)
                : qtcap::mf_Q2_thermal_lower_closed(f_stages, f_nbar);
      } else {
        if (proto == qtcap::Protocol::one_way)
          throw std::invalid_argument(
              "the one-way thermal upper bound has no closed form; use "
              "'capacity' to integrate it");
        v = qtcap::mf_Q2_thermal_upper_closed(f_stages, f_nbar);
      }
      qtcap::CapacityEstimate est;
      est.value = v * f_gmax;
      est.abs_error = 0.0;
      est.method = qtcap::Method::closed_form;
      emit(qtcap::capacity_to_json(est, proto, bnd, f_nbar), f_out);
    } else if (*sweep) {
      const qtcap::Protocol proto = qtcap::protocol_from_name(w_protocol);
      std::vector<qtcap::SweepRow> rows;
      for (int n = 0; n <= w_max; ++n) {
        const qtcap::TransducerParams p =
            w_family == "mf" ? qtcap::maximally_flat_params(n, 1.0, 0.0).params
                             : qtcap::uniform_params(n, 1.0, 0.0);
        const qtcap::CapacityEstimate est =
            qtcap::integrate_capacity(p, proto, qtcap::Bound::pure, 0.0);
        qtcap::SweepRow row;
        row.n_stages = n;
        row.value = est.value;
        row.abs_error = est.abs_error;
        if (w_family == "mf") {
          row.closed = proto == qtcap::Protocol::one_way ? qtcap::mf_Q1_closed(n)
                                                         : qtcap::mf_Q2_closed(n);
          row.has_closed = true;
        }
        rows.push_back(row);
      }
      emit(qtcap::sweep_to_csv(rows), w_out);
    } else if (*optimize) {
      const qtcap::Objective obj =
          o_objective == "q1" ? qtcap::Objective::q1 : qtcap::Objective::q2;
      qtcap::SearchSpace space;
      qtcap::SearchResult res;
      if (o_stages == 0) {
        space.axes = {{"kappa_a", o_kmin, o_kmax, o_points},
                      {"kappa_b", o_kmin, o_kmax, o_points},
                      {"delta", o_dmin, o_dmax, o_points}};
        res = qtcap::grid_search_0stage(obj, space, {}, o_refine);
      } else if (o_stages == 1) {
        space.axes = {{"kappa_a", o_kmin, o_kmax, o_points},
                      {"kappa_b", o_kmin, o_kmax, o_points},
                      {"g_b", o_glo, o_ghi, o_points}};
        res = qtcap::grid_search_1stage(obj, space, {}, o_refine);
      } else {
        space.axes.push_back({"kappa", o_kmin, o_kmax, o_points});
        const int half = (o_stages + 2) / 2;
        for (int j = 1; j <= half; ++j)
          space.axes.push_back({"g_" + std::to_string(j), o_glo, o_ghi, o_points});
        res = qtcap::symmetric_resonant_search(o_stages, obj, space, {}, o_refine);
      }
      if (!o_samples.empty())
        qtcap::write_text_file(o_samples, qtcap::search_samples_to_csv(res));
      emit(qtcap::search_to_json(res), o_out);
    } else if (*ladder) {
      emit(qtcap::ladder_to_json(qtcap::butterworth_elements(l_order)), l_out);
    } else if (*validate) {
      qtcap::ValidationReport rep;
      if (!v_design.empty()) {
        const qtcap::ParamsFile f = qtcap::load_params_file(v_design);
        rep = qtcap::audit_design(f.params, f.omega_c);
      } else {
        qtcap::ValidationOptions opt;
        opt.max_stages = v_stages;
        opt.optimizer_smoke = v_smoke;
        rep = qtcap::run_validation(opt);
      }
      std::cout << (v_json ? qtcap::report_to_json(rep) : qtcap::report_to_text(rep));
      return rep.all_pass() ? 0 : 5;
    }
  } catch (const qtcap::io_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const qtcap::convergence_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const qtcap::pole_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
