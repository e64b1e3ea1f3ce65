#pragma once

#include <functional>
#include <vector>

#include "phtune/closedloop.hpp"
#include "phtune/lyap.hpp"
#include "phtune/model.hpp"

namespace phtune {

/// Additive disturbance on the full state derivative (2n-vector).
struct Disturbance {
  enum class Kind { none, constant, sinusoid } kind = Kind::none;
  Vec amplitude;           ///< 2n-vector (constant value or sine amplitude)
  double frequency = 0.0;  ///< rad/s, sinusoid only

  Vec eval(double t, int dim2n) const;
};

struct SimConfig {
  double t_final = 10.0;
  double dt = 1e-3;  ///< fixed step (rk4) or initial step (rk45)
  enum class Method { rk4, rk45 } method = Method::rk4;
  double abs_tol = 1e-8;  ///< rk45 only
  double rel_tol = 1e-8;  ///< rk45 only
  Disturbance disturbance;
  double divergence_norm = 1e8;
};

/// Generic explicit integration of xdot = f(t, x).  Every accepted step is
/// recorded.  Throws NumericalError when the state norm passes
/// cfg.divergence_norm or stops being finite.
struct RawTrajectory {
  std::vector<double> times;
  std::vector<Vec> states;
};

RawTrajectory integrate(const std::function<Vec(double, const Vec&)>& field,
                        const Vec& x0, const SimConfig& cfg);

struct Trajectory {
  int n = 0;
  std::vector<double> times;
  std::vector<StateQP> states;
  std::vector<Vec> outputs;       ///< y = G' inv(M) p
  std::vector<double> hat_norms;  ///< |(q - q_star, Td(q)' p)|
};

/// Integrates the closed loop defined by (target, model) from x0.
Trajectory simulate_closedloop(const MechanicalModel& model,
                               const TargetDynamics& target, const StateQP& x0,
                               const SimConfig& cfg);

struct TrajectoryMetrics {
  Vec overshoot;               ///< per coordinate, beyond the goal, >= 0
  Vec rise_time_98;            ///< NaN when the 2% band is never held
  std::vector<bool> rise_reached;
  Vec l2_energy;               ///< per coordinate trapezoid of q_i^2
  double max_output_norm = 0.0;
  bool converged = false;      ///< final position error below 2% of initial
};

TrajectoryMetrics metrics(const Trajectory& traj, const Vec& q_star);

struct EnvelopeResult {
  int violations = 0;
  bool conclusive = true;  ///< false when the trajectory leaves the region
};

/// Counts samples where |xhat(t)| exceeds
/// sqrt(k2/k1) |xhat0| exp(-rate_sound t) with a 1e-6 relative slack.
EnvelopeResult envelope_check(const Trajectory& traj, const EsIssReport& report,
                              const Region* region = nullptr);

}  // namespace phtune
