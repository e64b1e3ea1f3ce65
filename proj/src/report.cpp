#include "phtune/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "phtune/errors.hpp"

namespace phtune {

namespace {

using nlohmann::ordered_json;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw InputError("cannot open output file '" + path + "'");
  }
  return out;
}

ordered_json number_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

ordered_json condition_json(const ConditionCheck& c) {
  ordered_json j;
  j["ok"] = c.ok;
  j["value"] = c.value;
  j["witness"] = to_json_vector(c.witness);
  return j;
}

}  // namespace

ordered_json to_json_vector(const Vec& v) {
  ordered_json j = ordered_json::array();
  for (int i = 0; i < v.size(); ++i) j.push_back(v(i));
  return j;
}

ordered_json to_json_matrix(const Mat& m) {
  ordered_json j = ordered_json::array();
  for (int r = 0; r < m.rows(); ++r) {
    ordered_json row = ordered_json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    j.push_back(row);
  }
  return j;
}

ordered_json to_json_spectrum(const CVec& eigenvalues) {
  ordered_json j = ordered_json::array();
  for (int i = 0; i < eigenvalues.size(); ++i) {
    ordered_json e;
    e["re"] = eigenvalues(i).real();
    e["im"] = eigenvalues(i).imag();
    j.push_back(e);
  }
  return j;
}

ordered_json analysis_report(const RunConfig& cfg,
                             const AnalysisResult& result) {
  ordered_json doc;

  ordered_json meta;
  meta["tool"] = "phtune";
  meta["model"] = cfg.model_name;
  meta["dof"] = cfg.model.n;
  meta["actuated"] = cfg.model.m;
  meta["generator"] = cfg.generator_kind;
  meta["seed"] = cfg.seed;
  meta["theta"] = cfg.theta;
  ordered_json region;
  region["center"] = to_json_vector(cfg.region.center);
  region["half_widths"] = to_json_vector(cfg.region.half_widths);
  region["samples_per_axis"] = cfg.region.samples_per_axis;
  meta["region"] = region;
  doc["meta"] = meta;

  ordered_json eq;
  eq["ok"] = result.equilibrium.ok;
  eq["residual"] = result.equilibrium.residual;
  doc["equilibrium"] = eq;

  ordered_json kint;
  kint["applicable"] = result.kint_applicable;
  kint["ok"] = result.kint.ok;
  kint["margin"] = result.kint.margin;
  doc["kint_admissibility"] = kint;

  ordered_json cond;
  cond["ok"] = result.conditions.ok;
  cond["c1_convexity"] = condition_json(result.conditions.c1_convexity);
  cond["c2_mass"] = condition_json(result.conditions.c2_mass);
  cond["c3_damping"] = condition_json(result.conditions.c3_damping);
  doc["target_conditions"] = cond;

  ordered_json stars;
  stars["mass"] = to_json_matrix(result.stars.mass);
  stars["md"] = to_json_matrix(result.stars.md);
  stars["hess_ud"] = to_json_matrix(result.stars.hess);
  stars["dd"] = to_json_matrix(result.stars.dd);
  stars["j2"] = to_json_matrix(result.stars.j2);
  doc["target_at_equilibrium"] = stars;

  const SpectralReport& sp = result.spectral;
  ordered_json spectral;
  spectral["eigenvalues"] = to_json_spectrum(sp.eigenvalues);
  double abscissa = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < sp.eigenvalues.size(); ++i) {
    abscissa = std::max(abscissa, sp.eigenvalues(i).real());
  }
  spectral["spectral_abscissa"] = number_or_null(abscissa);
  spectral["linearization"] = to_json_matrix(sp.linearization);
  spectral["saddle"] = to_json_matrix(sp.saddle.a_mat);
  ordered_json circles;
  circles["count"] = sp.circles.circles.size();
  circles["defective_warning"] = sp.circles.defective_warning;
  ordered_json items = ordered_json::array();
  for (const EigenCircle& c : sp.circles.circles) {
    ordered_json item;
    item["eig_re"] = c.eigenvalue.real();
    item["eig_im"] = c.eigenvalue.imag();
    item["center_re"] = c.center_re;
    item["center_im"] = c.center_im;
    item["radius"] = c.radius;
    item["defined"] = c.defined;
    items.push_back(item);
  }
  circles["items"] = items;
  spectral["circles"] = circles;
  spectral["p5_applicable"] = sp.p5_applicable;
  ordered_json p5;
  p5["holds"] = sp.p5.holds;
  p5["lhs"] = sp.p5.lhs;
  p5["rhs"] = sp.p5.rhs;
  p5["margin"] = sp.p5.margin;
  p5["holds_conservative"] = sp.p5.holds_conservative;
  p5["rhs_conservative"] = sp.p5.rhs_conservative;
  p5["margin_conservative"] = sp.p5.margin_conservative;
  spectral["p5"] = p5;
  spectral["min_damping_for_p5"] = number_or_null(sp.min_damping);
  spectral["rise_applicable"] = sp.rise_applicable;
  ordered_json rise;
  rise["delta"] = sp.rise.delta;
  rise["discriminant"] = sp.rise.discriminant;
  rise["lambda_tr"] = sp.rise.lambda_tr;
  rise["t_rise"] = number_or_null(sp.rise.t_rise);
  spectral["rise"] = rise;
  doc["spectral"] = spectral;

  const EsIssReport& es = result.es_iss;
  ordered_json ei;
  ei["ok"] = result.es_iss_ok;
  ei["error"] = result.es_iss_error;
  ei["epsilon"] = es.epsilon;
  ei["mu"] = es.mu;
  ei["beta_min"] = es.beta_min;
  ei["beta_max"] = es.beta_max;
  ei["sigma_a"] = es.sigma_a;
  ei["k1"] = es.k1;
  ei["k2"] = es.k2;
  ei["rate_paper"] = es.rate_paper;
  ei["rate_sound"] = es.rate_sound;
  ei["xi"] = es.xi;
  ei["theta"] = es.theta;
  ei["varphi"] = es.varphi;
  ei["gain_margin"] = number_or_null(es.gain_margin);
  ei["rate2"] = es.rate2;
  ei["ultimate_radius"] = number_or_null(es.ultimate_radius);
  ei["l2_state_bound"] = number_or_null(es.l2_state_bound);
  ei["l2_dist_bound"] = number_or_null(es.l2_dist_bound);
  ei["s0"] = es.s0;
  ei["xhat0_norm"] = es.xhat0_norm;
  ei["dhat_norm"] = es.dhat_norm;
  doc["es_iss"] = ei;

  ordered_json canon;
  canon["applicable"] = result.canonical.applicable;
  canon["message"] = result.canonical.message;
  canon["intrinsic"] = result.canonical.intrinsic;
  canon["saddle"] = to_json_matrix(result.canonical.saddle);
  canon["linearization"] = to_json_matrix(result.canonical.linearization);
  canon["eigenvalues"] = to_json_spectrum(result.canonical.eigenvalues);
  doc["canonical"] = canon;

  return doc;
}

ordered_json metrics_report(const Trajectory& traj, const TrajectoryMetrics& tm,
                            const Vec& q_star) {
  ordered_json doc;
  doc["samples"] = traj.times.size();
  doc["t_final"] = traj.times.empty() ? 0.0 : traj.times.back();
  doc["q_star"] = to_json_vector(q_star);
  ordered_json overshoot = ordered_json::array();
  ordered_json rise = ordered_json::array();
  ordered_json reached = ordered_json::array();
  ordered_json l2 = ordered_json::array();
  for (int i = 0; i < tm.overshoot.size(); ++i) {
    overshoot.push_back(tm.overshoot(i));
    rise.push_back(number_or_null(tm.rise_time_98(i)));
    reached.push_back(static_cast<bool>(tm.rise_reached[i]));
    l2.push_back(tm.l2_energy(i));
  }
  doc["overshoot"] = overshoot;
  doc["rise_time_98"] = rise;
  doc["rise_reached"] = reached;
  doc["l2_energy"] = l2;
  doc["max_output_norm"] = tm.max_output_norm;
  doc["converged"] = tm.converged;
  if (!traj.states.empty()) {
    doc["final_q"] = to_json_vector(traj.states.back().q);
    doc["final_p"] = to_json_vector(traj.states.back().p);
    doc["final_hat_norm"] = traj.hat_norms.back();
  }
  return doc;
}

void write_json(const std::string& path, const ordered_json& doc) {
  std::ofstream out = open_out(path);
  out << doc.dump(2) << '\n';
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
  std::ofstream out = open_out(path);
  const int n = traj.n;
  const int m = traj.outputs.empty() ? 0
                                     : static_cast<int>(traj.outputs[0].size());
  out << "t";
  for (int i = 1; i <= n; ++i) out << ",q" << i;
  for (int i = 1; i <= n; ++i) out << ",p" << i;
  for (int i = 1; i <= m; ++i) out << ",y" << i;
  out << ",hat_norm\n";
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    out << fmt17(traj.times[k]);
    for (int i = 0; i < n; ++i) out << ',' << fmt17(traj.states[k].q(i));
    for (int i = 0; i < n; ++i) out << ',' << fmt17(traj.states[k].p(i));
    for (int i = 0; i < m; ++i) out << ',' << fmt17(traj.outputs[k](i));
    out << ',' << fmt17(traj.hat_norms[k]) << '\n';
  }
}

void write_circles_csv(const std::string& path, const EigenCircleSet& set) {
  std::ofstream out = open_out(path);
  out << "eig_re,eig_im,center_re,center_im,radius,defined\n";
  for (const EigenCircle& c : set.circles) {
    out << fmt17(c.eigenvalue.real()) << ',' << fmt17(c.eigenvalue.imag())
        << ',' << fmt17(c.center_re) << ',' << fmt17(c.center_im) << ','
        << fmt17(c.radius) << ',' << (c.defined ? 1 : 0) << '\n';
  }
}

void write_circles_svg(const std::string& path, const CVec& eigenvalues,
                       const EigenCircleSet& set) {
  double xmin = -1.0, xmax = 1.0, ymin = -1.0, ymax = 1.0;
  bool have = false;
  const auto grow = [&](double x, double y) {
    if (!have) {
      xmin = xmax = x;
      ymin = ymax = y;
      have = true;
    } else {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  };
  for (int i = 0; i < eigenvalues.size(); ++i) {
    grow(eigenvalues(i).real(), eigenvalues(i).imag());
  }
  for (const EigenCircle& c : set.circles) {
    if (!c.defined) continue;
    grow(-c.center_re - c.radius, -c.center_im - c.radius);
    grow(-c.center_re + c.radius, -c.center_im + c.radius);
  }
  grow(0.0, 0.0);  // keep the origin visible
  const double pad_x = 0.1 * std::max(xmax - xmin, 1e-6);
  const double pad_y = 0.1 * std::max(ymax - ymin, 1e-6);
  xmin -= pad_x;
  xmax += pad_x;
  ymin -= pad_y;
  ymax += pad_y;

  const double width = 640.0, height = 480.0;
  const auto sx = [&](double x) {
    return (x - xmin) / (xmax - xmin) * width;
  };
  const auto sy = [&](double y) {
    return height - (y - ymin) / (ymax - ymin) * height;
  };
  const double rx = width / (xmax - xmin);
  const double ry = height / (ymax - ymin);

  std::ofstream out = open_out(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' '
      << height << "\">\n";
  out << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "  <line x1=\"" << sx(0) << "\" y1=\"0\" x2=\"" << sx(0)
      << "\" y2=\"" << height << "\" stroke=\"#999\" stroke-width=\"1\"/>\n";
  out << "  <line x1=\"0\" y1=\"" << sy(0) << "\" x2=\"" << width
      << "\" y2=\"" << sy(0) << "\" stroke=\"#999\" stroke-width=\"1\"/>\n";
  for (const EigenCircle& c : set.circles) {
    if (!c.defined) continue;
    out << "  <ellipse cx=\"" << sx(-c.center_re) << "\" cy=\""
        << sy(-c.center_im) << "\" rx=\"" << c.radius * rx << "\" ry=\""
        << c.radius * ry
        << "\" fill=\"none\" stroke=\"#4878a8\" stroke-width=\"1.2\"/>\n";
  }
  for (int i = 0; i < eigenvalues.size(); ++i) {
    out << "  <circle cx=\"" << sx(eigenvalues(i).real()) << "\" cy=\""
        << sy(eigenvalues(i).imag())
        << "\" r=\"3\" fill=\"#c03030\"/>\n";
  }
  out << "  <text x=\"6\" y=\"16\" font-family=\"monospace\" font-size=\"12\""
         " fill=\"#333\">closed-loop spectrum (dots) and enclosing circles"
         "</text>\n";
  out << "  <text x=\"6\" y=\"" << height - 8
      << "\" font-family=\"monospace\" font-size=\"11\" fill=\"#333\">re in ["
      << fmt17(xmin) << ", " << fmt17(xmax) << "], im in [" << fmt17(ymin)
      << ", " << fmt17(ymax) << "]</text>\n";
  out << "</svg>\n";
}

}  // namespace phtune
