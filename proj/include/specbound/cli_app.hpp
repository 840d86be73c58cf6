#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "specbound/constants.hpp"
#include "specbound/core.hpp"
#include "specbound/curves.hpp"
#include "specbound/experiments.hpp"
#include "specbound/inequality_checks.hpp"
#include "specbound/optimizer.hpp"

namespace specbound::cli {

namespace detail {

/// %.*g formatting; all CLI numbers go through here so output is
/// byte-deterministic for a given configuration.
inline std::string num(double v, int significant_digits) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", significant_digits, v);
  return buf;
}

inline std::string num15(double v) { return num(v, 15); }
inline std::string num17(double v) { return num(v, 17); }

inline const char* branch_name(OptBranch b) {
  switch (b) {
    case OptBranch::kSingle: return "single";
    case OptBranch::kTwoBlock: return "two_block";
    case OptBranch::kTwoEqual: return "two_equal";
    case OptBranch::kThreeEqual: return "three_equal";
  }
  return "?";
}

inline void write_grid_report(std::ostream& out, const GridReport& r, const char* indent) {
  out << indent << "{\"lemma\": \"" << r.lemma << "\", \"grid\": " << r.grid_size
      << ", \"min_margin\": " << num17(r.min_margin)
      << ", \"worst_point\": " << num17(r.worst_point)
      << ", \"passed\": " << (r.passed ? "true" : "false") << "}";
}

inline void write_param_list(std::ostream& out, const std::vector<double>& params) {
  out << "[";
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i) out << ", ";
    out << num17(params[i]);
  }
  out << "]";
}

}  // namespace detail

/// Parses and runs one subcommand. Exit status: 0 on success, 1 on
/// domain/validation errors, 2 on internal numerical failures.
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  using detail::num15;
  using detail::num17;

  CLI::App app{"Optimal estimates for the rotation of spectral subspaces "
               "under symmetric perturbations"};
  app.require_subcommand(1);

  double tol = 1e-12;
  app.add_option("--tol", tol, "root-finding tolerance")->capture_default_str();

  auto* cmd_constants = app.add_subcommand(
      "constants", "print the solved constants and breakpoints as JSON");

  auto* cmd_curve = app.add_subcommand("curve", "tabulate all four bound curves");
  double curve_from = 0.0, curve_to = 0.5;
  std::size_t curve_points = 500;
  std::string curve_format = "csv";
  cmd_curve->add_option("--from", curve_from, "first abscissa")->capture_default_str();
  cmd_curve->add_option("--to", curve_to, "last abscissa")->capture_default_str();
  cmd_curve->add_option("--points", curve_points, "number of samples")
      ->check(CLI::Range(std::size_t{2}, std::size_t{10000000}))
      ->capture_default_str();
  cmd_curve->add_option("--format", curve_format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();

  auto* cmd_optimize =
      app.add_subcommand("optimize", "solve the budgeted partition problem at one angle");
  double opt_theta = 0.0;
  cmd_optimize->add_option("--theta", opt_theta, "angle budget in [0, pi/2]")->required();

  auto* cmd_brute = app.add_subcommand("brute", "grid-search oracle for T_n");
  double brute_theta = 0.0;
  int brute_n = 2, brute_steps = 1500;
  cmd_brute->add_option("--theta", brute_theta, "angle budget in [0, pi/2]")->required();
  cmd_brute->add_option("--n", brute_n, "sequence length minus one (0..4)")->required();
  cmd_brute->add_option("--steps", brute_steps, "grid steps per coordinate")
      ->capture_default_str();

  auto* cmd_appendix =
      app.add_subcommand("verify-appendix", "certify the appendix inequalities on grids");
  std::string appendix_lemma = "all";
  std::size_t appendix_grid = 10000;
  cmd_appendix->add_option("--lemma", appendix_lemma, "a1a|a1b|a1c|a1d|a1e|a2|a3|a4|all")
      ->check(CLI::IsMember({"a1a", "a1b", "a1c", "a1d", "a1e", "a2", "a3", "a4", "all"}))
      ->capture_default_str();
  cmd_appendix->add_option("--grid", appendix_grid, "grid points per interval")
      ->capture_default_str();

  auto* cmd_remark =
      app.add_subcommand("verify-remark-am", "witness sequence showing x < T(M*(x))");
  double remark_x = 0.0;
  cmd_remark->add_option("--x", remark_x, "abscissa in (4/(pi^2+4), c*]")->required();

  auto* cmd_experiment =
      app.add_subcommand("experiment", "randomized matrix trials against the bound");
  std::size_t exp_dim = 8, exp_trials = 1000;
  double exp_ratio = 0.3, exp_gap = 1.0;
  std::uint64_t exp_seed = 0;
  bool exp_split = false;
  std::string exp_csv;
  cmd_experiment->add_option("--dim", exp_dim, "matrix dimension")->capture_default_str();
  cmd_experiment->add_option("--ratio", exp_ratio, "perturbation ratio ||V||/d")
      ->capture_default_str();
  cmd_experiment->add_option("--trials", exp_trials, "number of seeded trials")
      ->capture_default_str();
  cmd_experiment->add_option("--seed", exp_seed, "first seed")->capture_default_str();
  cmd_experiment->add_option("--gap", exp_gap, "spectral gap d")->capture_default_str();
  cmd_experiment->add_flag("--split-sigma", exp_split,
                           "place Sigma on both sides of sigma (needs dim >= 3)");
  cmd_experiment->add_option("--csv", exp_csv, "write CSV to this path instead of stdout");

  auto* cmd_path = app.add_subcommand(
      "path", "check the interpolation-path structure along B_t");
  std::size_t path_dim = 8, path_segments = 4;
  double path_ratio = 0.4, path_gap = 1.0;
  std::uint64_t path_seed = 0;
  bool path_split = false;
  cmd_path->add_option("--dim", path_dim, "matrix dimension")->capture_default_str();
  cmd_path->add_option("--ratio", path_ratio, "endpoint t of the path, in (0, 1/2)")
      ->capture_default_str();
  cmd_path->add_option("--segments", path_segments, "number of uniform steps")
      ->check(CLI::Range(std::size_t{1}, std::size_t{1000}))
      ->capture_default_str();
  cmd_path->add_option("--seed", path_seed, "trial seed")->capture_default_str();
  cmd_path->add_option("--gap", path_gap, "spectral gap d")->capture_default_str();
  cmd_path->add_flag("--split-sigma", path_split, "split spectral layout");

  for (CLI::App* sub : {cmd_constants, cmd_curve, cmd_optimize, cmd_brute, cmd_appendix,
                        cmd_remark, cmd_experiment, cmd_path}) {
    sub->fallthrough();  // let --tol appear after the subcommand as well
  }

  std::reverse(args.begin(), args.end());
  try {
    app.parse(std::move(args));
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return 1;
  }

  try {
    if (cmd_constants->parsed()) {
      const BoundConstants c = compute_constants(tol);
      out << "{\n";
      out << "  \"kappa\": " << num15(c.kappa) << ",\n";
      out << "  \"vartheta\": " << num15(c.vartheta) << ",\n";
      out << "  \"c_crit\": " << num15(c.c_crit) << ",\n";
      out << "  \"c_star\": " << num15(c.c_star) << ",\n";
      out << "  \"c_kmm\": " << num15(c.c_kmm) << ",\n";
      out << "  \"c_ms\": " << num15(c.c_ms) << ",\n";
      out << "  \"breakpoints\": {\n";
      const char* names[7] = {"4/(pi^2+4)",        "4(pi^2-2)/pi^4", "8pi^2/(pi^2+4)^2",
                              "2(pi-1)/pi^2",      "arctan(2/pi)",   "arcsin(2/pi)",
                              "arcsin(4pi/(pi^2+4))"};
      for (int i = 0; i < 7; ++i) {
        out << "    \"" << names[i] << "\": " << num15(c.breakpoints[i])
            << (i + 1 < 7 ? ",\n" : "\n");
      }
      out << "  }\n}\n";
      return 0;
    }

    if (cmd_curve->parsed()) {
      if (!(curve_from >= 0.0 && curve_from < curve_to && curve_to <= 0.5)) {
        err << "curve: need 0 <= from < to <= 0.5\n";
        return 1;
      }
      const double kappa = solve_kappa(tol);
      const auto cell = [&](const std::optional<double>& v) {
        return v ? num17(*v) : std::string{};
      };
      if (curve_format == "csv") {
        out << "x,kmm,ms,am,new\n";
        for (std::size_t i = 0; i < curve_points; ++i) {
          const double x =
              curve_from + (curve_to - curve_from) * static_cast<double>(i) / (curve_points - 1);
          const CurveSample s = compare_bounds(Ratio(x), kappa);
          out << num17(s.x) << ',' << cell(s.kmm) << ',' << cell(s.ms) << ',' << cell(s.am)
              << ',' << cell(s.new_bound) << "\n";
        }
      } else {
        out << "[\n";
        for (std::size_t i = 0; i < curve_points; ++i) {
          const double x =
              curve_from + (curve_to - curve_from) * static_cast<double>(i) / (curve_points - 1);
          const CurveSample s = compare_bounds(Ratio(x), kappa);
          const auto field = [&](const char* name, const std::optional<double>& v) {
            return std::string(", \"") + name + "\": " + (v ? num17(*v) : "null");
          };
          out << "  {\"x\": " << num17(s.x) << field("kmm", s.kmm) << field("ms", s.ms)
              << field("am", s.am) << field("new", s.new_bound) << "}"
              << (i + 1 < curve_points ? ",\n" : "\n");
        }
        out << "]\n";
      }
      return 0;
    }

    if (cmd_optimize->parsed()) {
      const BoundConstants c = compute_constants(tol);
      const OptResult r = T_closed(Angle(opt_theta), c.vartheta);
      out << "{\"theta\": " << num17(r.theta.radians()) << ", \"value\": " << num17(r.value)
          << ", \"branch\": \"" << detail::branch_name(r.branch) << "\", \"argmax\": ";
      detail::write_param_list(out, r.argmax.params());
      out << "}\n";
      return 0;
    }

    if (cmd_brute->parsed()) {
      const double value = brute_force_Tn(Angle(brute_theta), brute_n, brute_steps);
      out << "{\"theta\": " << num17(brute_theta) << ", \"n\": " << brute_n
          << ", \"steps\": " << brute_steps << ", \"value\": " << num17(value) << "}\n";
      return 0;
    }

    if (cmd_appendix->parsed()) {
      const double vartheta = solve_vartheta(tol);
      std::vector<GridReport> reports;
      const auto want = [&](const char* name) {
        return appendix_lemma == "all" || appendix_lemma == name;
      };
      if (want("a1a")) reports.push_back(check_A1(A1Variant::kA, appendix_grid));
      if (want("a1b")) reports.push_back(check_A1(A1Variant::kB, appendix_grid));
      if (want("a1c")) reports.push_back(check_A1(A1Variant::kC, appendix_grid));
      if (want("a1d")) reports.push_back(check_A1(A1Variant::kD, appendix_grid));
      if (want("a1e")) reports.push_back(check_A1(A1Variant::kE, appendix_grid));
      if (want("a2")) reports.push_back(check_A2(appendix_grid, vartheta));
      if (want("a3")) reports.push_back(check_A3(appendix_grid));
      if (want("a4")) reports.push_back(check_A4(appendix_grid));
      out << "[\n";
      for (std::size_t i = 0; i < reports.size(); ++i) {
        detail::write_grid_report(out, reports[i], "  ");
        out << (i + 1 < reports.size() ? ",\n" : "\n");
      }
      out << "]\n";
      return 0;
    }

    if (cmd_remark->parsed()) {
      const BoundConstants c = compute_constants(tol);
      const auto [lambda, value] = am_comparison_points(Ratio(remark_x));
      const double theta = eval_am(Ratio(remark_x)).radians();
      const double t_theta = T_closed(Angle(theta), c.vartheta).value;
      out << "{\"x\": " << num17(remark_x) << ", \"theta\": " << num17(theta)
          << ", \"lambda\": ";
      detail::write_param_list(out, lambda.params());
      out << ", \"max_w\": " << num17(value) << ", \"t_at_theta\": " << num17(t_theta)
          << ", \"strict_gap\": " << num17(t_theta - remark_x) << "}\n";
      return 0;
    }

    if (cmd_experiment->parsed()) {
      const BoundConstants c = compute_constants(tol);
      std::ofstream file;
      if (!exp_csv.empty()) {
        file.open(exp_csv);
        if (!file) {
          err << "experiment: cannot open " << exp_csv << " for writing\n";
          return 1;
        }
      }
      std::ostream& sink = exp_csv.empty() ? out : file;
      sink << "seed,dim,ratio,measured,bound,slack\n";
      for (std::uint64_t s = exp_seed; s < exp_seed + exp_trials; ++s) {
        const AngleRecord rec = run_trial(s, exp_dim, exp_gap, exp_ratio, c, exp_split);
        sink << s << ',' << exp_dim << ',' << num17(rec.ratio) << ','
             << num17(rec.measured.radians()) << ',' << num17(rec.bound.radians()) << ','
             << num17(rec.slack) << "\n";
      }
      return 0;
    }

    if (cmd_path->parsed()) {
      std::vector<double> partition(path_segments + 1);
      for (std::size_t j = 0; j <= path_segments; ++j) {
        partition[j] = path_ratio * static_cast<double>(j) / path_segments;
      }
      const PathReport r =
          path_experiment(path_seed, path_dim, path_gap, path_ratio, partition, path_split);
      out << "{\"seed\": " << path_seed << ", \"dim\": " << path_dim
          << ", \"gap\": " << num17(path_gap) << ", \"ratio\": " << num17(path_ratio)
          << ", \"partition\": ";
      detail::write_param_list(out, r.ts);
      out << ", \"gap_margin_min\": " << num17(r.gap_margin_min)
          << ", \"triangle_slack\": " << num17(r.triangle_slack)
          << ", \"local_margin_min\": " << num17(r.local_margin_min)
          << ", \"passed\": " << (r.passed ? "true" : "false") << "}\n";
      return 0;
    }
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 2;
  }
  err << "unknown subcommand\n";
  return 1;
}

}  // namespace specbound::cli
