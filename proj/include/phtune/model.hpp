#pragma once

#include <functional>
#include <string>
#include <vector>

#include "phtune/linalg.hpp"

namespace phtune {

/// Phase-space point of an n-degree-of-freedom mechanical system.
struct StateQP {
  Vec q;  ///< generalized positions
  Vec p;  ///< generalized momenta
};

/// Axis-aligned box of positions, sampled on a regular grid.
struct Region {
  Vec center;
  Vec half_widths;
  int samples_per_axis = 7;

  /// Grid points (cartesian product of per-axis linspaces).  Axes with zero
  /// half-width contribute a single sample.  Throws InputError when the
  /// total count would exceed max_points.
  std::vector<Vec> grid(std::size_t max_points = 1000000) const;

  void validate() const;
};

/// Mechanical system in port-Hamiltonian form:
///   H(q, p) = p' * inverse(M(q)) * p / 2 + U(q),
///   qdot = dH/dp,   pdot = -dH/dq - D(q,p) * dH/dp + G * u,
/// with input map G = [0; G1] acting on the last m coordinates.
struct MechanicalModel {
  std::string name;
  int n = 0;  ///< degrees of freedom
  int m = 0;  ///< actuated coordinates (last m of q)

  std::function<Mat(const Vec&)> mass;               ///< M(q), SPD
  std::function<Mat(const Vec&, int)> mass_partial;  ///< dM/dq_i
  std::function<double(const Vec&)> potential;       ///< U(q)
  std::function<Vec(const Vec&)> potential_grad;
  std::function<Mat(const Vec&)> potential_hess;
  std::function<Mat(const Vec&, const Vec&)> damping;  ///< D(q,p), PSD
  Mat actuator_block;                                  ///< G1 (m x m, invertible)

  int unactuated() const { return n - m; }

  /// Full input matrix G = [0; G1]  (n x m).
  Mat input_matrix() const;

  /// Annihilator G_perp = [I 0]  ((n-m) x n), so G_perp * G = 0.
  Mat unactuated_projector() const;

  /// Velocity map qdot = inverse(M(q)) * p.
  Vec velocity(const StateQP& s) const;

  void validate() const;
};

struct EquilibriumCheck {
  bool ok = false;
  double residual = 0.0;  ///< norm of the unactuated force balance
};

/// Total energy H(q, p).  Throws ModelInvariantError if M(q) is not SPD.
double eval_hamiltonian(const MechanicalModel& model, const StateQP& s);

/// Tests membership of (q_star, 0) in the assignable equilibrium set:
/// the unactuated rows of the potential force must vanish.
EquilibriumCheck check_equilibrium(const MechanicalModel& model,
                                   const Vec& q_star, double tol = 1e-9);

struct MassBounds {
  double lower = 0.0;  ///< min over the region of lambda_min(M(q))
  double upper = 0.0;  ///< max over the region of lambda_max(M(q))
};

/// Uniform spectral bounds of the mass matrix over a sampled region.
/// Throws ModelInvariantError (naming the sample) if M is not PD somewhere.
MassBounds mass_bounds(const MechanicalModel& model, const Region& region);

/// Open-loop vector field [qdot; pdot] for input u (m-vector) and an
/// additive disturbance d (2n-vector, optional).
Vec openloop_vector_field(const MechanicalModel& model, const StateQP& s,
                          const Vec& u);

}  // namespace phtune
