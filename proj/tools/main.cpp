#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <Eigen/Eigenvalues>

#include "phtune/config.hpp"
#include "phtune/errors.hpp"
#include "phtune/pipeline.hpp"
#include "phtune/report.hpp"

namespace {

using namespace phtune;

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string resolve_out(const RunConfig& cfg, const std::string& key,
                        const std::string& cli_out) {
  if (!cli_out.empty()) return cli_out;
  const auto it = cfg.outputs.find(key);
  return it != cfg.outputs.end() ? it->second : std::string();
}

std::string sibling_svg(const std::string& csv_path) {
  const auto dot = csv_path.rfind('.');
  if (dot == std::string::npos) return csv_path + ".svg";
  return csv_path.substr(0, dot) + ".svg";
}

AnalysisOptions analysis_options(const RunConfig& cfg) {
  AnalysisOptions opts;
  opts.theta = cfg.theta;
  if (cfg.has_x0) opts.x0 = cfg.x0;
  opts.disturbance = cfg.sim.disturbance;
  return opts;
}

/// Analysis exit code: 2 when an admissibility/structural check failed,
/// 3 when the certificate search failed numerically, 0 otherwise.
int analysis_exit_code(const AnalysisResult& result) {
  if (!result.kint.ok) return 2;
  if (result.stars.mass.size() == 0) return 2;  // target never built
  if (!result.conditions.ok) return 2;
  if (!result.es_iss_ok) return 3;
  return 0;
}

int cmd_analyze(const RunConfig& cfg, const std::string& cli_out) {
  const AnalysisResult result = run_analysis(
      cfg.model, cfg.gains, cfg.q_star, cfg.region, cfg.generator,
      analysis_options(cfg));
  const nlohmann::ordered_json doc = analysis_report(cfg, result);
  const std::string path = resolve_out(cfg, "report", cli_out);
  if (path.empty()) {
    std::cout << doc.dump(2) << '\n';
  } else {
    write_json(path, doc);
    std::cout << "analysis report written to " << path << '\n';
  }
  const int code = analysis_exit_code(result);
  if (code != 0 && !result.es_iss_error.empty()) {
    std::cerr << "analysis incomplete: " << result.es_iss_error << '\n';
  }
  return code;
}

int cmd_simulate(const RunConfig& cfg, const std::string& cli_out) {
  const TargetDynamics target = build_target(cfg.model, cfg.gains, cfg.q_star);
  const Trajectory traj =
      simulate_closedloop(cfg.model, target, cfg.x0, cfg.sim);
  const TrajectoryMetrics tm = metrics(traj, cfg.q_star);

  std::string csv = resolve_out(cfg, "trajectory_csv", cli_out);
  if (csv.empty()) csv = "trajectory.csv";
  write_trajectory_csv(csv, traj);

  const nlohmann::ordered_json doc = metrics_report(traj, tm, cfg.q_star);
  const std::string report_path = resolve_out(cfg, "report", "");
  if (!report_path.empty()) write_json(report_path, doc);
  std::cout << doc.dump(2) << '\n';
  std::cerr << "trajectory written to " << csv << '\n';
  return 0;
}

int cmd_circles(const RunConfig& cfg, const std::string& cli_out,
                bool want_svg) {
  const TargetDynamics target = build_target(cfg.model, cfg.gains, cfg.q_star);
  const SaddleForm sf = saddle_form(target, cfg.model);
  const EigenCircleSet set = eigen_circles(sf);

  std::string csv = resolve_out(cfg, "circles_csv", cli_out);
  if (csv.empty()) csv = "circles.csv";
  write_circles_csv(csv, set);
  std::cout << set.circles.size() << " circles written to " << csv << '\n';

  const std::string configured_svg = resolve_out(cfg, "circles_svg", "");
  if (want_svg || !configured_svg.empty()) {
    const std::string svg =
        configured_svg.empty() ? sibling_svg(csv) : configured_svg;
    const Eigen::EigenSolver<Mat> es(linearize_star(sf.star));
    write_circles_svg(svg, es.eigenvalues(), set);
    std::cout << "circle plot written to " << svg << '\n';
  }
  if (set.defective_warning) {
    std::cerr << "warning: near-defective eigenvector basis; circle data may "
                 "be ill-conditioned\n";
  }
  return 0;
}

int cmd_tune_damping(const RunConfig& cfg, const std::string& cli_out) {
  const TargetDynamics target = build_target(cfg.model, cfg.gains, cfg.q_star);
  const StarMatrices star = evaluate_stars(target, cfg.model);
  const double exact = min_damping_for_p5(star);
  const OscillationCheck check = oscillation_free(star);
  const double conservative = std::sqrt(check.rhs_conservative);

  std::cout << "min_damping_for_p5 = " << fmt_double(exact) << '\n';
  std::cout << "conservative (extreme-eigenvalue) value = "
            << fmt_double(conservative) << '\n';
  std::cout << "current damping " << (check.holds ? "passes" : "fails")
            << " the oscillation-free test (margin "
            << fmt_double(check.margin) << ")\n";

  if (!cli_out.empty()) {
    nlohmann::ordered_json doc;
    doc["min_damping_for_p5"] = exact;
    doc["conservative"] = conservative;
    doc["holds"] = check.holds;
    doc["lhs"] = check.lhs;
    doc["rhs"] = check.rhs;
    doc["margin"] = check.margin;
    doc["holds_conservative"] = check.holds_conservative;
    doc["rhs_conservative"] = check.rhs_conservative;
    doc["margin_conservative"] = check.margin_conservative;
    write_json(cli_out, doc);
  }
  return 0;
}

int cmd_report(const RunConfig& cfg, const std::string& cli_out,
               bool want_svg) {
  const AnalysisResult result = run_analysis(
      cfg.model, cfg.gains, cfg.q_star, cfg.region, cfg.generator,
      analysis_options(cfg));
  nlohmann::ordered_json doc = analysis_report(cfg, result);

  const int code = analysis_exit_code(result);
  if (code == 0) {
    const TargetDynamics target =
        build_target(cfg.model, cfg.gains, cfg.q_star);
    const Trajectory traj =
        simulate_closedloop(cfg.model, target, cfg.x0, cfg.sim);
    const TrajectoryMetrics tm = metrics(traj, cfg.q_star);
    doc["simulation"] = metrics_report(traj, tm, cfg.q_star);

    const std::string csv = resolve_out(cfg, "trajectory_csv", "");
    if (!csv.empty()) write_trajectory_csv(csv, traj);

    const std::string circles_csv = resolve_out(cfg, "circles_csv", "");
    if (!circles_csv.empty()) {
      write_circles_csv(circles_csv, result.spectral.circles);
    }
    const std::string configured_svg = resolve_out(cfg, "circles_svg", "");
    if (want_svg || !configured_svg.empty()) {
      const std::string svg = !configured_svg.empty() ? configured_svg
                              : !circles_csv.empty()  ? sibling_svg(circles_csv)
                                                      : "circles.svg";
      write_circles_svg(svg, result.spectral.eigenvalues,
                        result.spectral.circles);
    }
  }

  const std::string path = resolve_out(cfg, "report", cli_out);
  if (path.empty()) {
    std::cout << doc.dump(2) << '\n';
  } else {
    write_json(path, doc);
    std::cout << "report written to " << path << '\n';
  }
  if (code != 0 && !result.es_iss_error.empty()) {
    std::cerr << "analysis incomplete: " << result.es_iss_error << '\n';
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "phtune: tuning and stability analysis for passivity-based "
      "controllers on port-Hamiltonian mechanical systems"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_path;
  int region_samples = 7;
  double theta = 0.5;
  int seed = 0;
  bool want_svg = false;

  app.add_option("--config", config_path, "JSON run configuration")
      ->required();
  app.add_option("--out", out_path, "primary output path");
  auto* opt_samples = app.add_option("--region-samples", region_samples,
                                     "grid samples per region axis");
  auto* opt_theta =
      app.add_option("--theta", theta, "disturbance mixing parameter, (0,1)");
  auto* opt_seed = app.add_option("--seed", seed, "sampling seed");
  app.add_flag("--svg", want_svg, "also write an SVG circle plot");

  auto* sub_analyze =
      app.add_subcommand("analyze", "stability/performance analysis report");
  auto* sub_simulate =
      app.add_subcommand("simulate", "integrate the closed loop");
  auto* sub_circles =
      app.add_subcommand("circles", "per-eigenvalue enclosing circles");
  auto* sub_tune = app.add_subcommand(
      "tune-damping", "minimum damping for an oscillation-free response");
  auto* sub_report =
      app.add_subcommand("report", "analysis + simulation + circles bundle");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    RunConfig cfg = load_run_config(config_path);
    if (opt_samples->count() > 0) {
      cfg.region.samples_per_axis = region_samples;
      cfg.region.validate();
    }
    if (opt_theta->count() > 0) {
      if (!(theta > 0.0 && theta < 1.0)) {
        throw InputError("--theta must lie strictly between 0 and 1");
      }
      cfg.theta = theta;
    }
    if (opt_seed->count() > 0) cfg.seed = seed;

    if (sub_analyze->parsed()) return cmd_analyze(cfg, out_path);
    if (sub_simulate->parsed()) return cmd_simulate(cfg, out_path);
    if (sub_circles->parsed()) return cmd_circles(cfg, out_path, want_svg);
    if (sub_tune->parsed()) return cmd_tune_damping(cfg, out_path);
    if (sub_report->parsed()) return cmd_report(cfg, out_path, want_svg);
    return 1;
  } catch (const InputError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const ScopeError& e) {
    std::cerr << "scope error: " << e.what() << '\n';
    return 1;
  } catch (const AdmissibilityError& e) {
    std::cerr << "admissibility failure: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const ModelInvariantError& e) {
    std::cerr << "model invariant violated: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "unexpected failure: " << e.what() << '\n';
    return 3;
  }
}
