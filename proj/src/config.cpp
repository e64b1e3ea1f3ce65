#include "phtune/config.hpp"

#include <fstream>
#include <set>

#include "phtune/errors.hpp"
#include "phtune/models.hpp"

namespace phtune {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::set<std::string>& allowed,
                const std::string& where) {
  if (!j.is_object()) {
    throw InputError("config section '" + where + "' must be an object");
  }
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) {
      throw InputError("unknown config key '" + item.key() + "' in '" + where +
                       "'");
    }
  }
}

double get_number(const json& j, const std::string& where) {
  if (!j.is_number()) {
    throw InputError("config value '" + where + "' must be a number");
  }
  return j.get<double>();
}

int get_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) {
    throw InputError("config value '" + where + "' must be an integer");
  }
  return j.get<int>();
}

Vec get_vector(const json& j, const std::string& where) {
  if (!j.is_array()) {
    throw InputError("config value '" + where + "' must be an array of "
                     "numbers");
  }
  Vec v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    v(static_cast<int>(i)) = get_number(j[i], where);
  }
  return v;
}

/// A matrix is a number (1 x 1), an array of equal-length rows, or
/// {"diag": [...]}.
Mat get_matrix(const json& j, const std::string& where) {
  if (j.is_number()) {
    return Mat::Constant(1, 1, j.get<double>());
  }
  if (j.is_object()) {
    check_keys(j, {"diag"}, where);
    if (!j.contains("diag")) {
      throw InputError("matrix object '" + where + "' must contain 'diag'");
    }
    return Mat(get_vector(j["diag"], where + ".diag").asDiagonal());
  }
  if (!j.is_array() || j.empty()) {
    throw InputError("config value '" + where +
                     "' must be a matrix (rows, diag object, or scalar)");
  }
  const std::size_t rows = j.size();
  if (!j[0].is_array()) {
    throw InputError("config value '" + where + "' must be an array of rows");
  }
  const std::size_t cols = j[0].size();
  Mat m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) {
      throw InputError("matrix rows in '" + where +
                       "' must all have the same length");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<int>(r), static_cast<int>(c)) =
          get_number(j[r][c], where);
    }
  }
  return m;
}

MechanicalModel parse_model(const json& j, std::string* name_out) {
  check_keys(j, {"name", "mass", "stiffness", "damping", "count"}, "model");
  if (!j.contains("name") || !j["name"].is_string()) {
    throw InputError("model.name is required and must be a string");
  }
  const std::string name = j["name"].get<std::string>();
  *name_out = name;

  const auto num_or = [&](const char* key, double fallback) {
    return j.contains(key) ? get_number(j[key], std::string("model.") + key)
                           : fallback;
  };

  if (name == "point_mass") {
    return make_point_mass(num_or("mass", 1.0), num_or("damping", 0.0));
  }
  if (name == "mass_spring_damper") {
    return make_mass_spring_damper(num_or("mass", 1.0),
                                   num_or("stiffness", 1.0),
                                   num_or("damping", 0.0));
  }
  if (name == "planar_manipulator") {
    for (const char* key : {"mass", "stiffness", "damping", "count"}) {
      if (j.contains(key)) {
        throw InputError("model.planar_manipulator accepts no parameters");
      }
    }
    return make_planar_manipulator();
  }
  if (name == "spring_chain" || name == "spring_chain_full") {
    const int count =
        j.contains("count") ? get_int(j["count"], "model.count") : 3;
    if (name == "spring_chain") {
      return make_spring_chain(count, num_or("mass", 1.0),
                               num_or("stiffness", 1.0),
                               num_or("damping", 0.5));
    }
    return make_spring_chain_full(count, num_or("mass", 1.0),
                                  num_or("stiffness", 1.0),
                                  num_or("damping", 0.5));
  }
  throw InputError("unknown model name '" + name + "'");
}

ControllerGains parse_gains(const json& j, int m, int l) {
  check_keys(j, {"kes", "kdi", "kint", "feedforward"}, "gains");
  if (!j.contains("kes") || !j.contains("kdi")) {
    throw InputError("gains.kes and gains.kdi are required");
  }
  ControllerGains gains;
  gains.kes = get_matrix(j["kes"], "gains.kes");
  gains.kdi = get_matrix(j["kdi"], "gains.kdi");
  if (j.contains("kint")) {
    gains.kint = get_matrix(j["kint"], "gains.kint");
  } else {
    gains.kint = Mat::Zero(m, l);
  }
  if (j.contains("feedforward")) {
    const std::string ff = j["feedforward"].get<std::string>();
    if (ff == "none") {
      gains.feedforward = ControllerGains::Feedforward::none;
    } else if (ff == "gravity_compensation") {
      gains.feedforward = ControllerGains::Feedforward::gravity_compensation;
    } else {
      throw InputError("gains.feedforward must be 'none' or "
                       "'gravity_compensation'");
    }
  }
  return gains;
}

GyroGenerator parse_generator(const json& j, int n, std::string* kind_out) {
  check_keys(j, {"kind", "value", "matrix"}, "qd_generator");
  if (!j.contains("kind") || !j["kind"].is_string()) {
    throw InputError("qd_generator.kind is required");
  }
  const std::string kind = j["kind"].get<std::string>();
  *kind_out = kind;
  if (kind == "zero") {
    return zero_generator(n);
  }
  if (kind == "constant") {
    if (!j.contains("value")) {
      throw InputError("qd_generator.value is required for kind 'constant'");
    }
    const Vec v = get_vector(j["value"], "qd_generator.value");
    if (v.size() != n) {
      throw InputError("qd_generator.value must have length n");
    }
    return constant_generator(v);
  }
  if (kind == "linear") {
    if (!j.contains("matrix")) {
      throw InputError("qd_generator.matrix is required for kind 'linear'");
    }
    const Mat s = get_matrix(j["matrix"], "qd_generator.matrix");
    if (s.rows() != n || s.cols() != n) {
      throw InputError("qd_generator.matrix must be n x n");
    }
    return linear_generator(s);
  }
  throw InputError("qd_generator.kind must be 'zero', 'constant' or 'linear'");
}

Disturbance parse_disturbance(const json& j, int n) {
  check_keys(j, {"kind", "value", "amplitude", "frequency"},
             "sim.disturbance");
  Disturbance d;
  if (!j.contains("kind") || !j["kind"].is_string()) {
    throw InputError("sim.disturbance.kind is required");
  }
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "none") {
    d.kind = Disturbance::Kind::none;
    return d;
  }
  if (kind == "constant") {
    d.kind = Disturbance::Kind::constant;
    if (!j.contains("value")) {
      throw InputError("sim.disturbance.value is required for kind "
                       "'constant'");
    }
    d.amplitude = get_vector(j["value"], "sim.disturbance.value");
  } else if (kind == "sinusoid") {
    d.kind = Disturbance::Kind::sinusoid;
    if (!j.contains("amplitude") || !j.contains("frequency")) {
      throw InputError("sim.disturbance needs amplitude and frequency for "
                       "kind 'sinusoid'");
    }
    d.amplitude = get_vector(j["amplitude"], "sim.disturbance.amplitude");
    d.frequency = get_number(j["frequency"], "sim.disturbance.frequency");
  } else {
    throw InputError("sim.disturbance.kind must be 'none', 'constant' or "
                     "'sinusoid'");
  }
  if (d.amplitude.size() != 2 * n) {
    throw InputError("sim.disturbance vector must have length 2n");
  }
  return d;
}

SimConfig parse_sim(const json& j, int n) {
  check_keys(j,
             {"t_final", "dt", "method", "abs_tol", "rel_tol", "disturbance"},
             "sim");
  SimConfig cfg;
  if (j.contains("t_final")) cfg.t_final = get_number(j["t_final"], "sim.t_final");
  if (j.contains("dt")) cfg.dt = get_number(j["dt"], "sim.dt");
  if (j.contains("method")) {
    const std::string method = j["method"].get<std::string>();
    if (method == "rk4_fixed") {
      cfg.method = SimConfig::Method::rk4;
    } else if (method == "rk45_adaptive") {
      cfg.method = SimConfig::Method::rk45;
    } else {
      throw InputError("sim.method must be 'rk4_fixed' or 'rk45_adaptive'");
    }
  }
  if (j.contains("abs_tol")) cfg.abs_tol = get_number(j["abs_tol"], "sim.abs_tol");
  if (j.contains("rel_tol")) cfg.rel_tol = get_number(j["rel_tol"], "sim.rel_tol");
  if (j.contains("disturbance")) {
    cfg.disturbance = parse_disturbance(j["disturbance"], n);
  }
  if (cfg.t_final <= 0.0 || cfg.dt <= 0.0) {
    throw InputError("sim.t_final and sim.dt must be positive");
  }
  return cfg;
}

}  // namespace

RunConfig parse_run_config(const json& j) {
  check_keys(j,
             {"model", "q_star", "gains", "qd_generator", "region", "theta",
              "x0", "sim", "seed", "outputs"},
             "config");
  if (!j.contains("model") || !j.contains("q_star") || !j.contains("gains")) {
    throw InputError("config requires model, q_star and gains");
  }

  RunConfig cfg;
  cfg.model = parse_model(j["model"], &cfg.model_name);
  const int n = cfg.model.n;

  cfg.q_star = get_vector(j["q_star"], "q_star");
  if (cfg.q_star.size() != n) {
    throw InputError("q_star must have length n = " + std::to_string(n));
  }

  cfg.gains = parse_gains(j["gains"], cfg.model.m, cfg.model.unactuated());

  if (j.contains("qd_generator")) {
    cfg.generator = parse_generator(j["qd_generator"], n, &cfg.generator_kind);
  } else {
    cfg.generator = zero_generator(n);
  }

  if (j.contains("region")) {
    check_keys(j["region"], {"center", "half_widths", "samples_per_axis"},
               "region");
    cfg.region.center = j["region"].contains("center")
                            ? get_vector(j["region"]["center"], "region.center")
                            : cfg.q_star;
    if (!j["region"].contains("half_widths")) {
      throw InputError("region.half_widths is required when region is given");
    }
    cfg.region.half_widths =
        get_vector(j["region"]["half_widths"], "region.half_widths");
    if (j["region"].contains("samples_per_axis")) {
      cfg.region.samples_per_axis =
          get_int(j["region"]["samples_per_axis"], "region.samples_per_axis");
    }
  } else {
    cfg.region.center = cfg.q_star;
    cfg.region.half_widths = Vec::Constant(n, 0.5);
  }
  cfg.region.validate();
  if (cfg.region.center.size() != n) {
    throw InputError("region.center must have length n");
  }

  if (j.contains("theta")) {
    cfg.theta = get_number(j["theta"], "theta");
    if (!(cfg.theta > 0.0 && cfg.theta < 1.0)) {
      throw InputError("theta must lie strictly between 0 and 1");
    }
  }

  if (j.contains("x0")) {
    check_keys(j["x0"], {"q", "p"}, "x0");
    if (!j["x0"].contains("q") || !j["x0"].contains("p")) {
      throw InputError("x0 requires both q and p");
    }
    cfg.x0.q = get_vector(j["x0"]["q"], "x0.q");
    cfg.x0.p = get_vector(j["x0"]["p"], "x0.p");
    if (cfg.x0.q.size() != n || cfg.x0.p.size() != n) {
      throw InputError("x0.q and x0.p must have length n");
    }
    cfg.has_x0 = true;
  } else {
    cfg.x0.q = cfg.q_star;
    cfg.x0.p = Vec::Zero(n);
  }

  if (j.contains("sim")) {
    cfg.sim = parse_sim(j["sim"], n);
  }

  if (j.contains("seed")) {
    cfg.seed = get_int(j["seed"], "seed");
  }

  if (j.contains("outputs")) {
    check_keys(j["outputs"],
               {"report", "trajectory_csv", "circles_csv", "circles_svg"},
               "outputs");
    for (const auto& item : j["outputs"].items()) {
      if (!item.value().is_string()) {
        throw InputError("outputs entries must be path strings");
      }
      cfg.outputs[item.key()] = item.value().get<std::string>();
    }
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw InputError("cannot open config file '" + path + "'");
  }
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw InputError("config file '" + path + "' is not valid JSON: " +
                     e.what());
  }
  return parse_run_config(j);
}

}  // namespace phtune
