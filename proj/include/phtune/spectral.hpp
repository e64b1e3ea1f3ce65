#pragma once

#include <complex>
#include <vector>

#include "phtune/canonical.hpp"
#include "phtune/closedloop.hpp"
#include "phtune/model.hpp"

namespace phtune {

/// Equilibrium-evaluated data of a closed loop: M* = M(q*), Md* = Md(q*),
/// hess* = hess Ud(q*), Dd* = Dd(q*, 0), J2* = J2(q*, 0).
struct StarMatrices {
  Mat mass;
  Mat md;
  Mat hess;
  Mat dd;
  Mat j2;
  int dof() const { return static_cast<int>(mass.rows()); }
};

StarMatrices evaluate_stars(const TargetDynamics& target,
                            const MechanicalModel& model);

/// Closed-loop Jacobian at the goal,
///   [[0, inv(M*)], [-Md* inv(M*) hess*, (J2* - Dd*) inv(Md*)]].
Mat linearize(const TargetDynamics& target, const MechanicalModel& model);
Mat linearize_star(const StarMatrices& star);

/// Congruence-normalized form: with phiM' phiM = inv(Md*) and
/// phiP' phiP = hess*, the matrix
///   A = [[phiM (Dd* - J2*) phiM',  inv-transpose(phiM) inv(M*) phiP'],
///        [-phiP inv(M*) inv(phiM),  0]]
/// is similar to minus the closed-loop Jacobian via t_mat = [[0, phiM],
/// [phiP, 0]].
struct SaddleForm {
  Mat a_mat;
  Mat phi_m;
  Mat phi_p;
  Mat psi;    ///< damping block phiM Dd* phiM' minus gyro part
  Mat t_mat;
  StarMatrices star;
};

SaddleForm saddle_form(const StarMatrices& star);
SaddleForm saddle_form(const TargetDynamics& target,
                       const MechanicalModel& model);

/// Per-eigenvalue enclosing circle: the eigenvalue of A lies exactly on a
/// circle whose center depends only on damping and gyro quadratic forms of
/// the eigenvector's position part.
struct EigenCircle {
  std::complex<double> eigenvalue;
  double center_re = 0.0;
  double center_im = 0.0;
  double radius = 0.0;
  bool defined = true;  ///< false when the eigenvector has no position part
};

struct EigenCircleSet {
  std::vector<EigenCircle> circles;
  bool defective_warning = false;  ///< near-defective eigenvector basis
};

EigenCircleSet eigen_circles(const SaddleForm& sf);

/// Row-sum Gershgorin disks (center, radius) of a square matrix.
struct GershgorinDisk {
  double center = 0.0;
  double radius = 0.0;
};

std::vector<GershgorinDisk> gershgorin(const Mat& a);

/// Damping-dominance test for real (oscillation-free) closed-loop spectrum;
/// requires J2* = 0.  Also evaluates the coarser single-sided bound that
/// needs only extreme eigenvalues of Md*, M* and hess*.
struct OscillationCheck {
  bool holds = false;
  double lhs = 0.0;  ///< lambda_min(Dd*)^2
  double rhs = 0.0;
  double margin = 0.0;
  bool holds_conservative = false;
  double rhs_conservative = 0.0;
  double margin_conservative = 0.0;
};

OscillationCheck oscillation_free(const StarMatrices& star);

/// Smallest uniform damping level delta such that Dd* = delta I passes the
/// oscillation-free test (square root of its right-hand side).
double min_damping_for_p5(const StarMatrices& star);

/// Exponential rate lower bound and the induced 2%-settling estimate
/// t = 4 / lambda_tr; requires J2* = 0 and the oscillation-free test to hold.
struct RiseTimeBound {
  double delta = 0.0;       ///< lambda_min(phiP inv(M*) Md* inv(Dd*) Md* inv(M*) phiP')
  double discriminant = 0.0;
  double lambda_tr = 0.0;
  double t_rise = 0.0;
};

RiseTimeBound rise_time_bound(const SaddleForm& sf);

/// Saddle form of the canonical (momentum-translated) closed loop.  With
/// S* the generator Jacobian at the goal, Mc* = M* inv(Md*) M* and
/// Dc* = M* inv(Md*) Dd* inv(Md*) M*:
///   A = [[phiMc (Dc* + S* - S*') phiMc',  phiMc phiPc'],
///        [-phiPc phiMc',                  0]].
struct CanonicalSaddle {
  SaddleForm form;
  Mat generator_jac;   ///< S*
  Mat linearization;   ///< Jacobian of the canonical closed loop at the goal
  bool intrinsic = false;
};

CanonicalSaddle canonical_saddle(const TargetDynamics& target,
                                 const MechanicalModel& model,
                                 const GyroGenerator& gen,
                                 const Region& region);

/// Bundle emitted by the analysis pipeline.
struct SpectralReport {
  Mat linearization;
  CVec eigenvalues;  ///< of the linearization (left half plane when stable)
  SaddleForm saddle;
  EigenCircleSet circles;
  bool p5_applicable = false;  ///< J2* = 0
  OscillationCheck p5;
  double min_damping = 0.0;
  bool rise_applicable = false;
  RiseTimeBound rise;
};

SpectralReport spectral_report(const TargetDynamics& target,
                               const MechanicalModel& model);

}  // namespace phtune
