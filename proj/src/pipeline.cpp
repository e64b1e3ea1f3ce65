#include "phtune/pipeline.hpp"

#include <Eigen/Eigenvalues>

#include "phtune/errors.hpp"

namespace phtune {

double hat_disturbance_norm(const HatSystem& hat, const Region& region,
                            const Disturbance& dist) {
  if (dist.kind == Disturbance::Kind::none) return 0.0;
  const int n = hat.dof();
  if (dist.amplitude.size() != 2 * n) {
    throw InputError("disturbance must be a 2n-vector");
  }
  const Vec dq = dist.amplitude.head(n);
  const Vec dp = dist.amplitude.tail(n);
  double best = 0.0;
  for (const Vec& q : region.grid()) {
    const Vec qhat = q - hat.goal();
    Vec dhat(2 * n);
    dhat.head(n) = dq;
    dhat.tail(n) = hat.td(qhat).transpose() * dp;
    best = std::max(best, dhat.norm());
  }
  return best;
}

AnalysisResult run_analysis(const MechanicalModel& model,
                            const ControllerGains& gains, const Vec& q_star,
                            const Region& region, const GyroGenerator& gen,
                            const AnalysisOptions& options) {
  model.validate();
  AnalysisResult out;
  out.equilibrium = check_equilibrium(model, q_star);
  out.kint_applicable = model.m < model.n;
  out.kint = kint_admissible(model, gains, q_star);

  // Analysis mode treats an inadmissible coupling gain as a diagnostic, not
  // a hard failure: record it and skip everything that needs the target.
  TargetDynamics target;
  try {
    target = build_target(model, gains, q_star);
  } catch (const AdmissibilityError& e) {
    out.es_iss_error = e.what();
    return out;
  }
  out.stars = evaluate_stars(target, model);
  out.spectral = spectral_report(target, model);

  out.conditions = check_assumption2(target, region);

  // Canonical section: meaningful only when the target's gyroscopic term is
  // exactly the one generated by `gen`.
  try {
    const CanonicalForm form = to_canonical(model, target, gen, region);
    const CanonicalSaddle cs = canonical_saddle(target, model, gen, region);
    out.canonical.applicable = true;
    out.canonical.intrinsic = cs.intrinsic;
    out.canonical.saddle = cs.form.a_mat;
    out.canonical.linearization = cs.linearization;
    Eigen::EigenSolver<Mat> es(cs.form.a_mat);
    out.canonical.eigenvalues = es.eigenvalues();
    (void)form;
  } catch (const ScopeError& e) {
    out.canonical.applicable = false;
    out.canonical.message = e.what();
  }

  if (!out.kint.ok) {
    out.es_iss_error =
        "coupling gain inadmissible (damping Schur complement eigenvalue " +
        std::to_string(out.kint.margin) + ")";
    return out;
  }
  if (!out.conditions.ok) {
    out.es_iss_error =
        "structural conditions fail on the region (convexity/mass/damping)";
    return out;
  }

  try {
    const HatSystem hat = build_hat_system(model, target);
    StateQP x0;
    if (options.x0.has_value()) {
      x0 = *options.x0;
    } else {
      x0.q = q_star;
      x0.p = Vec::Zero(model.n);
    }
    const Vec xhat0 = hat.to_hat(x0);
    const double phat0_norm = xhat0.tail(model.n).norm();

    MomentumBall ball;
    ball.radii = options.momentum_radii;
    ball.directions = options.momentum_directions;
    ball.radius = options.momentum_scale *
                  (phat0_norm > 1e-12 ? phat0_norm : xhat0.norm());

    const LyapSampleSet set = build_sample_set(hat, region, ball);
    const double eps = find_epsilon(set);
    const double mu = estimate_mu(set, eps);
    const Betas betas{set.beta_min, set.beta_max};
    const EsBounds es =
        es_bounds(eps, mu, betas, set.sigma_a, set.sigma_gt, xhat0.norm());
    const double s0 = hat.candidate(xhat0, eps);
    const double dhat_norm =
        hat_disturbance_norm(hat, region, options.disturbance);
    const IssBounds iss =
        iss_bounds(set, eps, mu, es, options.theta, s0, dhat_norm);

    out.es_iss.epsilon = eps;
    out.es_iss.mu = mu;
    out.es_iss.beta_min = set.beta_min;
    out.es_iss.beta_max = set.beta_max;
    out.es_iss.sigma_a = set.sigma_a;
    out.es_iss.k1 = es.k1;
    out.es_iss.k2 = es.k2;
    out.es_iss.rate_paper = es.rate_paper;
    out.es_iss.rate_sound = es.rate_sound;
    out.es_iss.xi = es.xi;
    out.es_iss.theta = iss.theta;
    out.es_iss.varphi = iss.varphi;
    out.es_iss.gain_margin = iss.gain_margin;
    out.es_iss.rate2 = iss.rate2;
    out.es_iss.ultimate_radius = iss.ultimate_radius;
    out.es_iss.l2_state_bound = iss.l2_state_bound;
    out.es_iss.l2_dist_bound = iss.l2_dist_bound;
    out.es_iss.s0 = s0;
    out.es_iss.xhat0_norm = xhat0.norm();
    out.es_iss.dhat_norm = dhat_norm;
    out.es_iss_ok = true;
  } catch (const NumericalError& e) {
    out.es_iss_error = e.what();
  } catch (const ModelInvariantError& e) {
    out.es_iss_error = e.what();
  }
  return out;
}

}  // namespace phtune
