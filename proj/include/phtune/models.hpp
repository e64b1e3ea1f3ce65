#pragma once

#include "phtune/model.hpp"

namespace phtune {

/// Fully actuated unit point mass (no potential) with optional viscous
/// damping: n = m = 1, M = mass, U = 0, D = damping.
MechanicalModel make_point_mass(double mass = 1.0, double damping = 0.0);

/// Fully actuated mass-spring-damper: n = m = 1,
/// U = stiffness * q^2 / 2, D = damping.
MechanicalModel make_mass_spring_damper(double mass = 1.0,
                                        double stiffness = 1.0,
                                        double damping = 0.0);

/// Two-link planar manipulator with elastic joints driven through motor
/// coordinates: n = 4, m = 2, q = (link angles, motor angles).  The link
/// inertia depends on the elbow angle q2; motors couple to links through
/// joint springs.  Gear ratios enter as the actuator block.
MechanicalModel make_planar_manipulator();

/// Chain of `count` unit masses coupled to ground and neighbors by springs,
/// actuated at the last coordinate: n = count, m = 1, constant mass matrix.
MechanicalModel make_spring_chain(int count, double mass = 1.0,
                                  double stiffness = 1.0,
                                  double damping = 0.5);

/// Fully actuated variant of the chain (m = n), same mechanics.
MechanicalModel make_spring_chain_full(int count, double mass = 1.0,
                                       double stiffness = 1.0,
                                       double damping = 0.5);

/// Lookup by name ("point_mass", "mass_spring_damper", "planar_manipulator",
/// "spring_chain", "spring_chain_full").  Throws InputError for unknown names.
MechanicalModel make_model(const std::string& name);

}  // namespace phtune
