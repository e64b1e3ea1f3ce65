#pragma once

#include <vector>

#include "phtune/closedloop.hpp"
#include "phtune/model.hpp"

namespace phtune {

/// Target dynamics in error coordinates (qhat, phat) with normalized
/// kinetic energy:  qhat = q - q_star,  phat = Td(q)' p,  where Td is the
/// upper-triangular factor with inv(Md) = Td Td'.  The transformed system is
///   qhat_dot = Ahat phat,
///   phat_dot = -Ahat' grad Uhat + (Jhat - Dhat) phat,
/// with Hamiltonian Hhat = |phat|^2 / 2 + Uhat(qhat) and Uhat normalized to
/// vanish at the goal.
class HatSystem {
 public:
  HatSystem(const MechanicalModel& model, const TargetDynamics& target);

  int dof() const { return n_; }
  const Vec& goal() const { return q_star_; }
  const Mat& input_matrix() const { return g_; }

  /// Upper-triangular momentum factor at q = qhat + q_star.
  Mat td(const Vec& qhat) const;

  /// Ahat = inv(M) * inv-transpose(Td).
  Mat a_hat(const Vec& qhat) const;

  /// d Ahat / d qhat_i (central finite differences).
  Mat a_hat_partial(const Vec& qhat, int i) const;

  /// Time derivative of Ahat along the flow at (qhat, phat).
  Mat a_hat_dot(const Vec& qhat, const Vec& phat) const;

  double u_hat(const Vec& qhat) const;
  Vec u_hat_grad(const Vec& qhat) const;
  Mat u_hat_hess(const Vec& qhat) const;

  /// Dhat = Td' Dd Td, Jhat = Td' J2 Td + momentum-gradient correction.
  Mat d_hat(const Vec& qhat, const Vec& phat) const;
  Mat j_hat(const Vec& qhat, const Vec& phat) const;

  /// Coordinate maps.
  Vec to_hat(const StateQP& s) const;          // (qhat; phat)
  StateQP from_hat(const Vec& xhat) const;

  /// Vector field in hat coordinates (xhat = [qhat; phat]).
  Vec field(const Vec& xhat) const;

  /// Velocity-type output G' Td(q) phat.
  Vec output(const Vec& qhat, const Vec& phat) const;

  /// Hamiltonian and shifted Lyapunov candidate
  /// S = Hhat + eps * phat' Ahat' grad Uhat.
  double hamiltonian(const Vec& xhat) const;
  double candidate(const Vec& xhat, double eps) const;

  double fd_step = 1e-6;

 private:
  int n_;
  Vec q_star_;
  Mat g_;
  double ud_at_goal_;
  std::function<Mat(const Vec&)> mass_;
  std::function<Mat(const Vec&)> md_;
  std::function<double(const Vec&)> ud_;
  std::function<Vec(const Vec&)> ud_grad_;
  std::function<Mat(const Vec&)> ud_hess_;
  std::function<Mat(const Vec&, const Vec&)> dd_;
  std::function<Mat(const Vec&, const Vec&)> j2_;
};

HatSystem build_hat_system(const MechanicalModel& model,
                           const TargetDynamics& target);

struct Betas {
  double beta_min = 1.0;  ///< min{1, min lambda_min(hess Uhat)} over region
  double beta_max = 1.0;  ///< max{1, max lambda_max(hess Uhat)} over region
};

/// Gradient-sandwich constants of Hhat over the region.  Throws
/// ModelInvariantError when the shaped potential is not strongly convex.
Betas compute_betas(const HatSystem& hat, const Region& region);

/// Momentum samples: origin plus `radii` shells of `directions` unit vectors
/// spread over coordinate planes, scaled up to `radius`.
struct MomentumBall {
  double radius = 0.0;
  int radii = 5;
  int directions = 8;
};

std::vector<Vec> momentum_ball_samples(int n, const MomentumBall& ball);

/// One evaluation point with the epsilon-independent blocks of the decay
/// quadratic form cached.
struct LyapSample {
  Vec qhat;
  Vec phat;
  double sigma_a = 0.0;  ///< sigma_max(Ahat)
  Mat a;                 ///< Ahat
  Mat k1;                ///< Ahat Ahat' + Ahat' Ahat
  Mat k12;               ///< Ahat (Dhat - Jhat) - Ahat_dot
  Mat dhat;
  Mat k22;               ///< Ahat' hess(Uhat) Ahat
  Mat hess_a;            ///< hess(Uhat) Ahat
};

struct LyapSampleSet {
  int n = 0;
  std::vector<LyapSample> samples;
  double beta_min = 1.0;
  double beta_max = 1.0;
  double sigma_a = 0.0;   ///< max over samples of sigma_max(Ahat)
  double sigma_gt = 0.0;  ///< max over region of sigma_max(G' Td)
};

LyapSampleSet build_sample_set(const HatSystem& hat, const Region& region,
                               const MomentumBall& ball);

/// Decay quadratic-form matrix at one state:
///   [[eps (A A' + A' A),        eps/2 (A (Dhat - Jhat) - Adot)],
///    [sym',                     Dhat - eps A' hessU A        ]].
Mat upsilon_sym(const HatSystem& hat, double eps, const Vec& qhat,
                const Vec& phat);

/// Largest eps in (0, eps_hi] for which, at every sample, the candidate is a
/// quadratic sandwich (k1 > 0) and the decay form is PD (checked via its
/// momentum block and Schur complement).  Bisection to relative tolerance
/// rel_tol after a downward probe; throws NumericalError if infeasible down
/// to eps_min.
double find_epsilon(const LyapSampleSet& set, double eps_hi = 1.0,
                    double rel_tol = 1e-6, double eps_min = 1e-12);

/// mu = min over samples of lambda_min(upsilon_sym).  Throws NumericalError
/// naming the violating sample when the minimum is not positive.
double estimate_mu(const LyapSampleSet& set, double eps);

struct EsBounds {
  double k1 = 0.0;
  double k2 = 0.0;
  double rate_paper = 0.0;  ///< mu beta_max / (1 + eps sigma_a beta_max)
  double rate_sound = 0.0;  ///< mu beta_min^2 / (beta_max (1 + eps sigma_a beta_max))
  double xi = 0.0;          ///< output envelope sigma_gt sqrt(k2/k1) |xhat0|
};

EsBounds es_bounds(double eps, double mu, const Betas& betas, double sigma_a,
                   double sigma_gt, double xhat0_norm);

struct IssBounds {
  double theta = 0.5;
  double varphi = 1.0;          ///< max sigma_max of the coupling block matrix
  double gain_margin = 0.0;     ///< mu beta_max theta / varphi
  double rate2 = 0.0;           ///< rate_paper (1 - theta)
  double ultimate_radius = 0.0; ///< |dhat| / gain_margin
  double l2_state_bound = 0.0;
  double l2_dist_bound = 0.0;
};

/// Disturbance bounds for a given mixing parameter theta in (0,1), initial
/// candidate value s0 = S(xhat0) and disturbance norm.
IssBounds iss_bounds(const LyapSampleSet& set, double eps, double mu,
                     const EsBounds& es, double theta, double s0,
                     double dhat_norm);

/// Everything the analysis emits about exponential stability and ISS.
struct EsIssReport {
  double epsilon = 0.0;
  double mu = 0.0;
  double beta_min = 1.0;
  double beta_max = 1.0;
  double sigma_a = 0.0;
  double k1 = 0.0;
  double k2 = 0.0;
  double rate_paper = 0.0;
  double rate_sound = 0.0;
  double xi = 0.0;
  double theta = 0.5;
  double varphi = 1.0;
  double gain_margin = 0.0;
  double rate2 = 0.0;
  double ultimate_radius = 0.0;
  double l2_state_bound = 0.0;
  double l2_dist_bound = 0.0;
  double s0 = 0.0;
  double xhat0_norm = 0.0;
  double dhat_norm = 0.0;
};

}  // namespace phtune
