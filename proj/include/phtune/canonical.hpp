#pragma once

#include "phtune/closedloop.hpp"
#include "phtune/model.hpp"

namespace phtune {

/// Generator of a momentum translation p_c = M inv(Md) p + qd(q).
struct GyroGenerator {
  std::function<Vec(const Vec&)> qd;      ///< qd(q), n-vector
  std::function<Mat(const Vec&)> qd_jac;  ///< Jacobian d qd / d q
};

GyroGenerator zero_generator(int n);
GyroGenerator constant_generator(const Vec& value);
GyroGenerator linear_generator(const Mat& coeff);  ///< qd(q) = coeff * q

/// Momentum part of the canonical change of coordinates.
Vec canonical_momentum(const MechanicalModel& model,
                       const TargetDynamics& target, const GyroGenerator& gen,
                       const StateQP& s);

/// Gyroscopic term induced by the momentum translation: the skew matrix
/// J2(q, p) that makes the translated dynamics canonical.
std::function<Mat(const Vec&, const Vec&)> build_j2_from_generator(
    const MechanicalModel& model, const TargetDynamics& target,
    const GyroGenerator& gen);

/// True when the generator produces coupling that no further canonical
/// momentum translation can remove (its Jacobian is non-symmetric somewhere
/// on the region).
bool is_intrinsic(const GyroGenerator& gen, const Region& region,
                  double tol = 1e-9);

/// Target dynamics rewritten in canonical coordinates (q, p_c):
///   Hc = (p_c - qd)' inv(Mc) (p_c - qd) / 2 + Ud,
///   [qdot; pcdot] = (Jc - Rc) grad Hc with symplectic Jc.
struct CanonicalForm {
  int n = 0;
  Vec q_star;
  std::function<Mat(const Vec&)> mc;                     ///< M inv(Md) M
  std::function<Mat(const Vec&, const Vec&)> dc;         ///< (q, p_c)
  std::function<double(const Vec&, const Vec&)> hc;      ///< (q, p_c)
  std::function<Mat(const Vec&)> jg;                     ///< generator skew part
  std::function<Vec(const StateQP&)> to_canonical_momentum;
  std::function<Vec(const Vec&, const Vec&)> from_canonical_momentum;
  std::function<Vec(const Vec&, const Vec&)> field;      ///< (q, p_c) -> 2n
  bool intrinsic = false;
};

/// Builds the canonical form after verifying (at 20 pseudo-random states in
/// the region) that the target's gyroscopic term matches the generator's,
/// relative tolerance 1e-8.  Throws ScopeError with the max deviation when
/// the target is not canonicalizable by this generator.
CanonicalForm to_canonical(const MechanicalModel& model,
                           const TargetDynamics& target,
                           const GyroGenerator& gen, const Region& region);

}  // namespace phtune
