#include "phtune/closedloop.hpp"

#include <limits>
#include <sstream>

#include "phtune/errors.hpp"

namespace phtune {

namespace {

void require_symmetric_pd(const Mat& a, const std::string& what) {
  if (a.rows() != a.cols()) throw InputError(what + " must be square");
  if (symmetry_defect(a) > 1e-12 * (1.0 + max_abs(a))) {
    throw InputError(what + " must be symmetric");
  }
  if (!is_pd(a)) throw InputError(what + " must be positive definite");
}

std::string format_point(const Vec& q) {
  std::ostringstream oss;
  oss << "(";
  for (int i = 0; i < q.size(); ++i) {
    if (i) oss << ", ";
    oss << q(i);
  }
  oss << ")";
  return oss.str();
}

}  // namespace

void ControllerGains::validate(const MechanicalModel& model) const {
  const int m = model.m;
  const int l = model.unactuated();
  if (kes.rows() != m || kes.cols() != m) {
    throw InputError("kes must be m x m");
  }
  if (kdi.rows() != m || kdi.cols() != m) {
    throw InputError("kdi must be m x m");
  }
  require_symmetric_pd(kes, "kes");
  require_symmetric_pd(kdi, "kdi");
  if (kint.size() != 0 && (kint.rows() != m || kint.cols() != l)) {
    throw InputError("kint must be m x (n - m)");
  }
}

Vec control_law(const MechanicalModel& model, const ControllerGains& gains,
                const Vec& q_star, const StateQP& s) {
  model.validate();
  gains.validate(model);
  if (q_star.size() != model.n || s.q.size() != model.n ||
      s.p.size() != model.n) {
    throw InputError("state and q_star must match the model dimension");
  }

  const Mat g = model.input_matrix();
  const Vec qdot = model.velocity(s);
  Vec u = -gains.kes * (g.transpose() * (s.q - q_star)) -
          gains.kdi * (g.transpose() * qdot);
  if (gains.kint.size() != 0) {
    u -= gains.kint * (model.unactuated_projector() * qdot);
  }
  if (gains.feedforward == ControllerGains::Feedforward::gravity_compensation) {
    if (model.m < model.n) {
      throw ScopeError(
          "gravity compensation requires a fully actuated model (m = n)");
    }
    if (!model.actuator_block.isIdentity(1e-12)) {
      throw ScopeError(
          "gravity compensation is supported only for an identity actuator "
          "block");
    }
    u += g.transpose() * model.potential_grad(s.q);
  }
  return u;
}

TargetDynamics build_target(const MechanicalModel& model,
                            const ControllerGains& gains, const Vec& q_star) {
  model.validate();
  gains.validate(model);
  if (q_star.size() != model.n) {
    throw InputError("q_star must match the model dimension");
  }
  const EquilibriumCheck eq = check_equilibrium(model, q_star);
  if (!eq.ok) {
    throw InputError("q_star = " + format_point(q_star) +
                     " is not an assignable equilibrium (unactuated force "
                     "residual " +
                     std::to_string(eq.residual) + ")");
  }

  const int n = model.n;
  const int m = model.m;
  const int l = model.unactuated();
  const bool gravity =
      gains.feedforward == ControllerGains::Feedforward::gravity_compensation;

  TargetDynamics target;
  target.n = n;
  target.q_star = q_star;
  target.md = model.mass;
  target.md_partial = model.mass_partial;

  if (gravity) {
    if (m < n) {
      throw ScopeError(
          "gravity compensation requires a fully actuated model (m = n)");
    }
    if (!model.actuator_block.isIdentity(1e-12)) {
      throw ScopeError(
          "gravity compensation is supported only for an identity actuator "
          "block");
    }
    const Mat kes = gains.kes;
    const Mat kdi = gains.kdi;
    target.ud = [kes, q_star](const Vec& q) {
      const Vec e = q - q_star;
      return 0.5 * e.dot(kes * e);
    };
    target.ud_grad = [kes, q_star](const Vec& q) -> Vec {
      return kes * (q - q_star);
    };
    target.ud_hess = [kes](const Vec&) { return kes; };
    const auto damping = model.damping;
    target.dd = [damping, kdi](const Vec& q, const Vec& p) -> Mat {
      return damping(q, p) + kdi;
    };
    target.j2 = [n](const Vec&, const Vec&) { return Mat::Zero(n, n); };
    target.provenance = TargetDynamics::Provenance::fully_actuated;
  } else {
    const Mat g = model.input_matrix();
    const Mat shape = g * gains.kes * g.transpose();
    const Mat g1kdi =
        model.actuator_block * gains.kdi * model.actuator_block.transpose();
    Mat coupling = Mat::Zero(n, n);
    coupling.bottomRightCorner(m, m) = g1kdi;
    Mat gyro = Mat::Zero(n, n);
    if (gains.kint.size() != 0 && l > 0) {
      const Mat g1kint = model.actuator_block * gains.kint;  // m x l
      coupling.topRightCorner(l, m) = 0.5 * g1kint.transpose();
      coupling.bottomLeftCorner(m, l) = 0.5 * g1kint;
      gyro.topRightCorner(l, m) = 0.5 * g1kint.transpose();
      gyro.bottomLeftCorner(m, l) = -0.5 * g1kint;
    }

    const auto potential = model.potential;
    const auto potential_grad = model.potential_grad;
    const auto potential_hess = model.potential_hess;
    target.ud = [potential, shape, q_star](const Vec& q) {
      const Vec e = q - q_star;
      return potential(q) + 0.5 * e.dot(shape * e);
    };
    target.ud_grad = [potential_grad, shape, q_star](const Vec& q) -> Vec {
      return potential_grad(q) + shape * (q - q_star);
    };
    target.ud_hess = [potential_hess, shape](const Vec& q) -> Mat {
      return potential_hess(q) + shape;
    };
    const auto damping = model.damping;
    target.dd = [damping, coupling](const Vec& q, const Vec& p) -> Mat {
      return damping(q, p) + coupling;
    };
    target.j2 = [gyro](const Vec&, const Vec&) { return gyro; };
    target.provenance = TargetDynamics::Provenance::shaped;
  }

  const Mat dd_star = target.dd(q_star, Vec::Zero(n));
  if (lambda_min_sym(dd_star) < -1e-12 * (1.0 + max_abs(dd_star))) {
    throw AdmissibilityError(
        "shaped damping is indefinite at the goal; the coupling gain is too "
        "large (check kint_admissible for the acceptable range)");
  }

  const double stationarity = target.ud_grad(q_star).norm();
  if (stationarity > 1e-9) {
    throw ModelInvariantError(
        "shaped potential is not stationary at the goal (gradient norm " +
        std::to_string(stationarity) + "); the chosen feedforward cannot "
        "assign this equilibrium");
  }
  return target;
}

Vec closedloop_vector_field(const TargetDynamics& target,
                            const MechanicalModel& model, const StateQP& s,
                            const Vec& d) {
  const int n = target.n;
  if (s.q.size() != n || s.p.size() != n) {
    throw InputError("state must match the target dimension");
  }
  if (d.size() != 0 && d.size() != 2 * n) {
    throw InputError("disturbance must be a 2n-vector");
  }

  const Mat md = target.md(s.q);
  Eigen::LLT<Mat> md_llt(md);
  if (md_llt.info() != Eigen::Success) {
    throw ModelInvariantError("target mass matrix is not positive definite");
  }
  const Vec vd = md_llt.solve(s.p);  // grad_p Hd = inv(Md) p

  Vec dhd_dq = target.ud_grad(s.q);
  for (int i = 0; i < n; ++i) {
    dhd_dq(i) -= 0.5 * vd.dot(target.md_partial(s.q, i) * vd);
  }

  const Mat m_mat = model.mass(s.q);
  Vec out(2 * n);
  out.head(n) = m_mat.llt().solve(md * vd);  // inv(M) Md grad_p Hd = inv(M) p
  out.tail(n) = -md * m_mat.llt().solve(dhd_dq) +
                (target.j2(s.q, s.p) - target.dd(s.q, s.p)) * vd;
  if (d.size() != 0) out += d;
  return out;
}

KintCheck kint_admissible(const MechanicalModel& model,
                          const ControllerGains& gains, const Vec& q_ref) {
  model.validate();
  gains.validate(model);
  const int m = model.m;
  const int l = model.unactuated();
  const Vec q = q_ref.size() == 0 ? Vec::Zero(model.n) : q_ref;
  const Mat d_mat = model.damping(q, Vec::Zero(model.n));
  const Mat da = d_mat.bottomRightCorner(m, m);
  const Mat g1kdi =
      model.actuator_block * gains.kdi * model.actuator_block.transpose();

  Mat schur = da + g1kdi;
  if (l > 0 && gains.kint.size() != 0 && max_abs(gains.kint) > 0.0) {
    const Mat du = d_mat.topLeftCorner(l, l);
    if (!is_pd(du)) {
      throw ModelInvariantError(
          "unactuated damping block must be positive definite for the "
          "coupling-gain admissibility test");
    }
    const Mat g1kint = model.actuator_block * gains.kint;  // m x l
    schur -= 0.25 * g1kint * du.llt().solve(g1kint.transpose());
  }

  KintCheck out;
  out.margin = lambda_min_sym(schur);
  out.ok = out.margin > 0.0;
  return out;
}

TargetConditions check_assumption2(const TargetDynamics& target,
                                   const Region& region, double tol_psd) {
  if (region.center.size() != target.n) {
    throw InputError("region dimension does not match the target dimension");
  }
  TargetConditions out;
  out.c1_convexity.value = std::numeric_limits<double>::infinity();
  out.c2_mass.value = std::numeric_limits<double>::infinity();
  out.c3_damping.value = std::numeric_limits<double>::infinity();

  for (const Vec& q : region.grid()) {
    const double hess_min = lambda_min_sym(target.ud_hess(q));
    if (hess_min < out.c1_convexity.value) {
      out.c1_convexity.value = hess_min;
      out.c1_convexity.witness = q;
    }
    const double md_min = lambda_min_sym(target.md(q));
    if (md_min < out.c2_mass.value) {
      out.c2_mass.value = md_min;
      out.c2_mass.witness = q;
    }
    const double dd_min = lambda_min_sym(target.dd(q, Vec::Zero(target.n)));
    if (dd_min < out.c3_damping.value) {
      out.c3_damping.value = dd_min;
      out.c3_damping.witness = q;
    }
  }

  out.c1_convexity.ok = out.c1_convexity.value > 0.0;
  out.c2_mass.ok = out.c2_mass.value > 0.0;
  out.c3_damping.ok = out.c3_damping.value >= -tol_psd;
  out.ok = out.c1_convexity.ok && out.c2_mass.ok && out.c3_damping.ok;
  return out;
}

}  // namespace phtune
