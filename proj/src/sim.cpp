#include "phtune/sim.hpp"

#include <cmath>
#include <limits>

#include "phtune/errors.hpp"
#include "phtune/lyap.hpp"

namespace phtune {

Vec Disturbance::eval(double t, int dim2n) const {
  switch (kind) {
    case Kind::none:
      return Vec::Zero(dim2n);
    case Kind::constant:
      if (amplitude.size() != dim2n) {
        throw InputError("constant disturbance must be a 2n-vector");
      }
      return amplitude;
    case Kind::sinusoid:
      if (amplitude.size() != dim2n) {
        throw InputError("sinusoid disturbance amplitude must be a 2n-vector");
      }
      return amplitude * std::sin(frequency * t);
  }
  return Vec::Zero(dim2n);
}

namespace {

void check_finite(const Vec& x, double t, double divergence_norm) {
  if (!x.allFinite() || x.norm() > divergence_norm) {
    throw NumericalError("trajectory diverged at t = " + std::to_string(t));
  }
}

Vec rk4_step(const std::function<Vec(double, const Vec&)>& f, double t,
             const Vec& x, double h) {
  const Vec k1 = f(t, x);
  const Vec k2 = f(t + 0.5 * h, x + 0.5 * h * k1);
  const Vec k3 = f(t + 0.5 * h, x + 0.5 * h * k2);
  const Vec k4 = f(t + h, x + h * k3);
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

RawTrajectory integrate_rk4(const std::function<Vec(double, const Vec&)>& f,
                            const Vec& x0, const SimConfig& cfg) {
  RawTrajectory out;
  double t = 0.0;
  Vec x = x0;
  out.times.push_back(t);
  out.states.push_back(x);
  check_finite(x, t, cfg.divergence_norm);
  while (t < cfg.t_final - 1e-12) {
    const double h = std::min(cfg.dt, cfg.t_final - t);
    x = rk4_step(f, t, x, h);
    t += h;
    check_finite(x, t, cfg.divergence_norm);
    out.times.push_back(t);
    out.states.push_back(x);
  }
  return out;
}

// Dormand-Prince 5(4) embedded pair.
RawTrajectory integrate_rk45(const std::function<Vec(double, const Vec&)>& f,
                             const Vec& x0, const SimConfig& cfg) {
  static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static const double a21 = 1.0 / 5;
  static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                      a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                      a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                      a65 = -5103.0 / 18656;
  static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                      b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static const double e1 = 5179.0 / 57600, e3 = 7571.0 / 16695,
                      e4 = 393.0 / 640, e5 = -92097.0 / 339200,
                      e6 = 187.0 / 2100, e7 = 1.0 / 40;

  RawTrajectory out;
  double t = 0.0;
  Vec x = x0;
  check_finite(x, t, cfg.divergence_norm);
  out.times.push_back(t);
  out.states.push_back(x);

  double h = std::min(cfg.dt, cfg.t_final);
  std::size_t steps = 0;
  const std::size_t max_steps = 10000000;
  while (t < cfg.t_final - 1e-12) {
    if (++steps > max_steps) {
      throw NumericalError("adaptive integrator exceeded the step limit");
    }
    h = std::min(h, cfg.t_final - t);
    const Vec k1 = f(t, x);
    const Vec k2 = f(t + c2 * h, x + h * (a21 * k1));
    const Vec k3 = f(t + c3 * h, x + h * (a31 * k1 + a32 * k2));
    const Vec k4 = f(t + c4 * h, x + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Vec k5 =
        f(t + c5 * h, x + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Vec k6 = f(t + h, x + h * (a61 * k1 + a62 * k2 + a63 * k3 +
                                     a64 * k4 + a65 * k5));
    const Vec x5 = x + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Vec k7 = f(t + h, x5);
    const Vec x4 = x + h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 +
                            e7 * k7);

    const double sc =
        cfg.abs_tol + cfg.rel_tol * std::max(x.norm(), x5.norm());
    const double err = (x5 - x4).norm() / sc;
    if (err <= 1.0) {
      t += h;
      x = x5;
      check_finite(x, t, cfg.divergence_norm);
      out.times.push_back(t);
      out.states.push_back(x);
    }
    const double factor =
        err == 0.0 ? 5.0 : 0.9 * std::pow(err, -0.2);
    h *= std::clamp(factor, 0.2, 5.0);
    if (h < 1e-14) {
      throw NumericalError("adaptive integrator step size underflow at t = " +
                           std::to_string(t));
    }
  }
  return out;
}

}  // namespace

RawTrajectory integrate(const std::function<Vec(double, const Vec&)>& field,
                        const Vec& x0, const SimConfig& cfg) {
  if (cfg.t_final < 0.0 || cfg.dt <= 0.0) {
    throw InputError("simulation horizon and step must be positive");
  }
  if (cfg.method == SimConfig::Method::rk4) {
    return integrate_rk4(field, x0, cfg);
  }
  return integrate_rk45(field, x0, cfg);
}

Trajectory simulate_closedloop(const MechanicalModel& model,
                               const TargetDynamics& target, const StateQP& x0,
                               const SimConfig& cfg) {
  const int n = target.n;
  if (x0.q.size() != n || x0.p.size() != n) {
    throw InputError("initial state must match the target dimension");
  }
  Vec z0(2 * n);
  z0.head(n) = x0.q;
  z0.tail(n) = x0.p;

  const auto field = [&](double t, const Vec& z) -> Vec {
    StateQP s{z.head(n), z.tail(n)};
    return closedloop_vector_field(target, model, s,
                                   cfg.disturbance.eval(t, 2 * n));
  };
  const RawTrajectory raw = integrate(field, z0, cfg);

  const HatSystem hat = build_hat_system(model, target);
  Trajectory traj;
  traj.n = n;
  traj.times = raw.times;
  traj.states.reserve(raw.states.size());
  traj.outputs.reserve(raw.states.size());
  traj.hat_norms.reserve(raw.states.size());
  const Mat g = model.input_matrix();
  for (const Vec& z : raw.states) {
    StateQP s{z.head(n), z.tail(n)};
    traj.outputs.push_back(g.transpose() * model.velocity(s));
    traj.hat_norms.push_back(hat.to_hat(s).norm());
    traj.states.push_back(std::move(s));
  }
  return traj;
}

TrajectoryMetrics metrics(const Trajectory& traj, const Vec& q_star) {
  if (traj.states.empty()) throw InputError("trajectory is empty");
  const int n = traj.n;
  if (q_star.size() != n) {
    throw InputError("q_star must match the trajectory dimension");
  }
  const std::size_t len = traj.states.size();

  TrajectoryMetrics out;
  out.overshoot = Vec::Zero(n);
  out.rise_time_98 =
      Vec::Constant(n, std::numeric_limits<double>::quiet_NaN());
  out.rise_reached.assign(n, false);
  out.l2_energy = Vec::Zero(n);

  const Vec q0 = traj.states.front().q;
  for (int i = 0; i < n; ++i) {
    const double travel = q_star(i) - q0(i);
    const double band = 0.02 * std::abs(travel);
    const bool trivial = std::abs(travel) < 1e-12;

    double peak = 0.0;
    for (std::size_t k = 0; k < len; ++k) {
      const double err = traj.states[k].q(i) - q_star(i);
      if (trivial) {
        peak = std::max(peak, std::abs(err));
      } else {
        const double beyond = travel > 0.0 ? err : -err;
        peak = std::max(peak, beyond);
      }
    }
    out.overshoot(i) = std::max(0.0, peak);

    if (!trivial) {
      std::size_t last_bad = 0;
      bool any_bad = false;
      for (std::size_t k = 0; k < len; ++k) {
        if (std::abs(traj.states[k].q(i) - q_star(i)) > band) {
          last_bad = k;
          any_bad = true;
        }
      }
      if (!any_bad) {
        out.rise_reached[i] = true;
        out.rise_time_98(i) = traj.times.front();
      } else if (last_bad + 1 < len) {
        out.rise_reached[i] = true;
        out.rise_time_98(i) = traj.times[last_bad + 1];
      }
    } else {
      out.rise_reached[i] = true;
      out.rise_time_98(i) = traj.times.front();
    }

    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < len; ++k) {
      const double f0 = traj.states[k].q(i) * traj.states[k].q(i);
      const double f1 = traj.states[k + 1].q(i) * traj.states[k + 1].q(i);
      acc += 0.5 * (f0 + f1) * (traj.times[k + 1] - traj.times[k]);
    }
    out.l2_energy(i) = acc;
  }

  for (const Vec& y : traj.outputs) {
    out.max_output_norm = std::max(out.max_output_norm, y.norm());
  }

  const double initial_err = (q0 - q_star).norm();
  const double final_err = (traj.states.back().q - q_star).norm();
  out.converged = initial_err < 1e-12 ? final_err < 1e-9
                                      : final_err <= 0.02 * initial_err;
  return out;
}

EnvelopeResult envelope_check(const Trajectory& traj, const EsIssReport& report,
                              const Region* region) {
  if (traj.hat_norms.empty()) throw InputError("trajectory is empty");
  EnvelopeResult out;
  const double amp =
      std::sqrt(report.k2 / report.k1) * traj.hat_norms.front();
  for (std::size_t k = 0; k < traj.hat_norms.size(); ++k) {
    const double bound =
        amp * std::exp(-report.rate_sound * traj.times[k]) * (1.0 + 1e-6);
    if (traj.hat_norms[k] > bound) ++out.violations;
    if (region != nullptr) {
      const Vec& q = traj.states[k].q;
      for (int i = 0; i < q.size(); ++i) {
        if (std::abs(q(i) - region->center(i)) >
            region->half_widths(i) + 1e-12) {
          out.conclusive = false;
        }
      }
    }
  }
  return out;
}

}  // namespace phtune
