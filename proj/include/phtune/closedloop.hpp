#pragma once

#include "phtune/model.hpp"

namespace phtune {

/// Static output-feedback gains: energy shaping (kes), damping injection
/// (kdi), both m x m SPD, and an optional coupling gain kint (m x (n-m))
/// acting on unactuated velocities.
struct ControllerGains {
  Mat kes;
  Mat kdi;
  Mat kint;  ///< may be 0 x 0 when unused

  enum class Feedforward { none, gravity_compensation };
  Feedforward feedforward = Feedforward::none;

  void validate(const MechanicalModel& model) const;
};

/// Closed-loop target: a mechanical system with energy
/// Hd = p' * inverse(Md(q)) * p / 2 + Ud(q), damping Dd and gyroscopic
/// coupling J2 (skew), so that
///   [qdot; pdot] = (Jd - Rd) * grad Hd,
///   Jd = [[0, inv(M) Md], [-Md inv(M), J2]],  Rd = [[0, 0], [0, Dd]].
struct TargetDynamics {
  enum class Provenance {
    fully_actuated,  ///< gravity compensation + quadratic shaping (m = n)
    shaped,          ///< potential shaping on the actuated channel
    custom,          ///< user-supplied target
  };

  int n = 0;
  Vec q_star;
  std::function<Mat(const Vec&)> md;
  std::function<Mat(const Vec&, int)> md_partial;
  std::function<double(const Vec&)> ud;
  std::function<Vec(const Vec&)> ud_grad;
  std::function<Mat(const Vec&)> ud_hess;
  std::function<Mat(const Vec&, const Vec&)> dd;
  std::function<Mat(const Vec&, const Vec&)> j2;
  Provenance provenance = Provenance::custom;
};

/// Static feedback u = -kes G'(q - q_star) - kdi G' qdot - kint Gperp qdot
/// plus the optional gravity feedforward G' grad U.
Vec control_law(const MechanicalModel& model, const ControllerGains& gains,
                const Vec& q_star, const StateQP& s);

/// Target dynamics realized by control_law in closed loop with the model.
/// Throws InputError if q_star is not an assignable equilibrium and
/// ModelInvariantError if the shaped potential is not stationary at q_star.
TargetDynamics build_target(const MechanicalModel& model,
                            const ControllerGains& gains, const Vec& q_star);

/// Closed-loop vector field [qdot; pdot] with additive disturbance d
/// (2n-vector; pass an empty vector for none).
Vec closedloop_vector_field(const TargetDynamics& target,
                            const MechanicalModel& model, const StateQP& s,
                            const Vec& d = Vec());

struct KintCheck {
  bool ok = false;
  double margin = 0.0;  ///< smallest eigenvalue of the damping Schur complement
};

/// Admissibility of the coupling gain: the actuated damping block must
/// dominate the coupling through the unactuated damping,
///   Da + G1 kdi G1' - (G1 kint) inv(Du) (G1 kint)' / 4 > 0.
/// The damping matrix is evaluated at (q_ref, 0); q_ref defaults to zero,
/// which is exact for state-independent damping.
KintCheck kint_admissible(const MechanicalModel& model,
                          const ControllerGains& gains,
                          const Vec& q_ref = Vec());

struct ConditionCheck {
  bool ok = false;
  double value = 0.0;
  Vec witness;  ///< grid point attaining the extreme value
};

/// Region-wise structural conditions on a target:
/// c1 strong convexity of Ud, c2 positive-definite bounded Md, c3 PSD Dd.
struct TargetConditions {
  ConditionCheck c1_convexity;
  ConditionCheck c2_mass;
  ConditionCheck c3_damping;
  bool ok = false;
};

TargetConditions check_assumption2(const TargetDynamics& target,
                                   const Region& region,
                                   double tol_psd = 1e-10);

}  // namespace phtune
