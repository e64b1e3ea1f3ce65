#pragma once

#include <random>

#include "phtune/closedloop.hpp"
#include "phtune/model.hpp"
#include "phtune/spectral.hpp"

namespace testutil {

using phtune::Mat;
using phtune::MechanicalModel;
using phtune::StarMatrices;
using phtune::TargetDynamics;
using phtune::Vec;

inline Mat random_square(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g(0.0, 1.0);
  Mat a(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) a(r, c) = g(rng);
  }
  return a;
}

inline Vec random_vector(std::mt19937_64& rng, int n, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = g(rng);
  return v;
}

inline Mat random_spd(std::mt19937_64& rng, int n, double shift = 0.5) {
  const Mat a = random_square(rng, n);
  return a * a.transpose() + shift * Mat::Identity(n, n);
}

inline Mat random_skew(std::mt19937_64& rng, int n) {
  const Mat a = random_square(rng, n);
  return a - a.transpose();
}

/// Random equilibrium-evaluated closed-loop matrices.
inline StarMatrices random_star(std::mt19937_64& rng, int n, bool with_gyro) {
  StarMatrices s;
  s.mass = random_spd(rng, n);
  s.md = random_spd(rng, n);
  s.hess = random_spd(rng, n);
  s.dd = random_spd(rng, n, 0.0);  // PSD (almost surely PD)
  s.j2 = with_gyro ? random_skew(rng, n) : Mat::Zero(n, n);
  return s;
}

/// Model with constant mass, zero potential, zero damping — enough to pair
/// with a hand-built target when only the starred matrices matter.
inline MechanicalModel constant_model(const Mat& mass) {
  const int n = static_cast<int>(mass.rows());
  MechanicalModel mdl;
  mdl.name = "constant";
  mdl.n = n;
  mdl.m = n;
  mdl.mass = [mass](const Vec&) { return mass; };
  mdl.mass_partial = [n](const Vec&, int) { return Mat::Zero(n, n); };
  mdl.potential = [](const Vec&) { return 0.0; };
  mdl.potential_grad = [n](const Vec&) { return Vec::Zero(n); };
  mdl.potential_hess = [n](const Vec&) { return Mat::Zero(n, n); };
  mdl.damping = [n](const Vec&, const Vec&) { return Mat::Zero(n, n); };
  mdl.actuator_block = Mat::Identity(n, n);
  return mdl;
}

/// Target with constant matrices and the quadratic potential
/// Ud = (q - q_star)' hess (q - q_star) / 2.
inline TargetDynamics constant_target(const StarMatrices& s,
                                      const Vec& q_star) {
  const int n = s.dof();
  TargetDynamics t;
  t.n = n;
  t.q_star = q_star;
  const Mat md = s.md;
  const Mat hess = s.hess;
  const Mat dd = s.dd;
  const Mat j2 = s.j2;
  t.md = [md](const Vec&) { return md; };
  t.md_partial = [n](const Vec&, int) { return Mat::Zero(n, n); };
  t.ud = [hess, q_star](const Vec& q) {
    const Vec e = q - q_star;
    return 0.5 * e.dot(hess * e);
  };
  t.ud_grad = [hess, q_star](const Vec& q) -> Vec {
    return hess * (q - q_star);
  };
  t.ud_hess = [hess](const Vec&) { return hess; };
  t.dd = [dd](const Vec&, const Vec&) { return dd; };
  t.j2 = [j2](const Vec&, const Vec&) { return j2; };
  t.provenance = TargetDynamics::Provenance::custom;
  return t;
}

inline phtune::ControllerGains diag_gains(const Vec& kes, const Vec& kdi) {
  phtune::ControllerGains g;
  g.kes = Mat(kes.asDiagonal());
  g.kdi = Mat(kdi.asDiagonal());
  return g;
}

inline Vec manipulator_goal() {
  Vec q(4);
  q << 0.6, 0.8, 0.6, 0.8;
  return q;
}

/// Planar-manipulator gain presets used throughout the tests.
inline phtune::ControllerGains gains_case_d() {
  Vec kes(2), kdi(2);
  kes << 3.5, 3.5;
  kdi << 1.5, 1.5;
  return diag_gains(kes, kdi);
}

inline phtune::ControllerGains gains_case_e() {
  Vec kes(2), kdi(2);
  kes << 12.0, 15.0;
  kdi << 1.5, 1.5;
  return diag_gains(kes, kdi);
}

inline phtune::ControllerGains gains_case_f() {
  Vec kes(2), kdi(2);
  kes << 12.0, 15.0;
  kdi << 7.0, 5.0;
  return diag_gains(kes, kdi);
}

inline phtune::ControllerGains gains_case_g(double kint_scale = 1.0) {
  phtune::ControllerGains g = gains_case_f();
  Vec kint(2);
  kint << 1.1, 0.43;
  g.kint = Mat((kint_scale * kint).asDiagonal());
  return g;
}

}  // namespace testutil
