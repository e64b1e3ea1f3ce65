#include "phtune/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "phtune/errors.hpp"

namespace phtune {

namespace {

constexpr double kGyroTol = 1e-12;

void require_no_gyro(const StarMatrices& star, const char* what) {
  if (max_abs(star.j2) > kGyroTol * (1.0 + max_abs(star.dd))) {
    throw ScopeError(std::string(what) +
                     " requires a closed loop without gyroscopic coupling "
                     "(J2* = 0)");
  }
}

}  // namespace

StarMatrices evaluate_stars(const TargetDynamics& target,
                            const MechanicalModel& model) {
  StarMatrices star;
  const Vec& qs = target.q_star;
  const Vec zero = Vec::Zero(target.n);
  star.mass = model.mass(qs);
  star.md = target.md(qs);
  star.hess = target.ud_hess(qs);
  star.dd = target.dd(qs, zero);
  star.j2 = target.j2(qs, zero);
  return star;
}

Mat linearize_star(const StarMatrices& star) {
  const int n = star.dof();
  Eigen::LLT<Mat> m_llt(star.mass);
  Eigen::LLT<Mat> md_llt(star.md);
  if (m_llt.info() != Eigen::Success || md_llt.info() != Eigen::Success) {
    throw NumericalError("mass matrices must be positive definite at the goal");
  }
  Mat out = Mat::Zero(2 * n, 2 * n);
  out.topRightCorner(n, n) = m_llt.solve(Mat::Identity(n, n));
  out.bottomLeftCorner(n, n) = -star.md * m_llt.solve(star.hess);
  out.bottomRightCorner(n, n) =
      md_llt.solve((star.j2 - star.dd).transpose()).transpose();
  return out;
}

Mat linearize(const TargetDynamics& target, const MechanicalModel& model) {
  return linearize_star(evaluate_stars(target, model));
}

SaddleForm saddle_form(const StarMatrices& star) {
  const int n = star.dof();
  SaddleForm sf;
  sf.star = star;

  Eigen::LLT<Mat> md_llt(star.md);
  if (md_llt.info() != Eigen::Success) {
    throw NumericalError("target mass matrix must be positive definite at the "
                         "goal");
  }
  const Mat md_inv = md_llt.solve(Mat::Identity(n, n));
  sf.phi_m = ut_left_factor(md_inv, "inverse target mass at the goal");
  sf.phi_p = ut_left_factor(star.hess, "shaped potential Hessian at the goal");

  const Mat m_inv = star.mass.llt().solve(Mat::Identity(n, n));
  sf.psi = sf.phi_m * (star.dd - star.j2) * sf.phi_m.transpose();

  // top-right block: inv-transpose(phiM) inv(M*) phiP'
  const Mat b12 = sf.phi_m.transpose()
                      .triangularView<Eigen::Lower>()
                      .solve(Mat(m_inv * sf.phi_p.transpose()));

  sf.a_mat = Mat::Zero(2 * n, 2 * n);
  sf.a_mat.topLeftCorner(n, n) = sf.psi;
  sf.a_mat.topRightCorner(n, n) = b12;
  sf.a_mat.bottomLeftCorner(n, n) = -b12.transpose();

  sf.t_mat = Mat::Zero(2 * n, 2 * n);
  sf.t_mat.topRightCorner(n, n) = sf.phi_m;
  sf.t_mat.bottomLeftCorner(n, n) = sf.phi_p;
  return sf;
}

SaddleForm saddle_form(const TargetDynamics& target,
                       const MechanicalModel& model) {
  return saddle_form(evaluate_stars(target, model));
}

EigenCircleSet eigen_circles(const SaddleForm& sf) {
  const int n = sf.star.dof();
  Eigen::EigenSolver<Mat> es(sf.a_mat);
  if (es.info() != Eigen::Success) {
    throw NumericalError("eigenvalue decomposition of the saddle form failed");
  }

  const Mat damping_form = sf.phi_m * sf.star.dd * sf.phi_m.transpose();
  const Mat gyro_form = sf.phi_m * sf.star.j2 * sf.phi_m.transpose();
  const Mat b12 = sf.a_mat.topRightCorner(n, n);

  EigenCircleSet out;
  {
    Eigen::JacobiSVD<CMat> svd(es.eigenvectors());
    const auto& sv = svd.singularValues();
    if (sv(0) > 0.0 && sv(sv.size() - 1) / sv(0) < 1e-8) {
      out.defective_warning = true;
    }
  }

  for (int k = 0; k < 2 * n; ++k) {
    EigenCircle c;
    c.eigenvalue = es.eigenvalues()(k);
    const CVec z = es.eigenvectors().col(k);
    const CVec v = z.head(n);
    const CVec w = z.tail(n);
    const double v2 = v.squaredNorm();
    if (v2 <= 1e-24 * z.squaredNorm()) {
      c.defined = false;
      out.circles.push_back(c);
      continue;
    }
    const std::complex<double> dq = (v.adjoint() * (damping_form * v))(0);
    const std::complex<double> jq = (v.adjoint() * (gyro_form * v))(0);
    c.center_re = dq.real() / v2;
    c.center_im = -jq.imag() / v2;  // i * (skew-Hermitian form) is real
    const double expr = ((b12 * w).squaredNorm() - (sf.psi * v).squaredNorm()) / v2 +
                        c.center_re * c.center_re + c.center_im * c.center_im;
    c.radius = std::sqrt(std::max(0.0, expr));
    out.circles.push_back(c);
  }

  std::sort(out.circles.begin(), out.circles.end(),
            [](const EigenCircle& a, const EigenCircle& b) {
              if (a.eigenvalue.real() != b.eigenvalue.real()) {
                return a.eigenvalue.real() < b.eigenvalue.real();
              }
              return a.eigenvalue.imag() < b.eigenvalue.imag();
            });
  return out;
}

std::vector<GershgorinDisk> gershgorin(const Mat& a) {
  if (a.rows() != a.cols()) throw InputError("matrix must be square");
  std::vector<GershgorinDisk> disks(a.rows());
  for (int i = 0; i < a.rows(); ++i) {
    disks[i].center = a(i, i);
    double r = 0.0;
    for (int j = 0; j < a.cols(); ++j) {
      if (j != i) r += std::abs(a(i, j));
    }
    disks[i].radius = r;
  }
  return disks;
}

OscillationCheck oscillation_free(const StarMatrices& star) {
  require_no_gyro(star, "the oscillation-free damping test");
  Eigen::LLT<Mat> m_llt(star.mass);
  const Mat inner = star.md * m_llt.solve(star.hess * m_llt.solve(star.md));

  OscillationCheck out;
  const double dmin = lambda_min_sym(star.dd);
  out.lhs = dmin * dmin;
  out.rhs = 4.0 * lambda_max_sym(inner) * lambda_max_sym(star.md);
  out.margin = out.lhs - out.rhs;
  out.holds = out.lhs >= out.rhs;

  const double md_max = lambda_max_sym(star.md);
  const double m_min = lambda_min_sym(star.mass);
  out.rhs_conservative =
      4.0 * md_max * md_max * md_max * lambda_max_sym(star.hess) /
      (m_min * m_min);
  out.margin_conservative = out.lhs - out.rhs_conservative;
  out.holds_conservative = out.lhs >= out.rhs_conservative;
  return out;
}

double min_damping_for_p5(const StarMatrices& star) {
  require_no_gyro(star, "the oscillation-free damping threshold");
  Eigen::LLT<Mat> m_llt(star.mass);
  const Mat inner = star.md * m_llt.solve(star.hess * m_llt.solve(star.md));
  return 2.0 * std::sqrt(lambda_max_sym(inner) * lambda_max_sym(star.md));
}

RiseTimeBound rise_time_bound(const SaddleForm& sf) {
  const StarMatrices& star = sf.star;
  require_no_gyro(star, "the rise-time bound");
  const OscillationCheck check = oscillation_free(star);
  if (!check.holds) {
    throw ScopeError(
        "the rise-time bound requires the oscillation-free damping test to "
        "hold (margin " +
        std::to_string(check.margin) + ")");
  }
  Eigen::LLT<Mat> dd_llt(star.dd);
  if (dd_llt.info() != Eigen::Success) {
    throw NumericalError("damping must be positive definite at the goal for "
                         "the rise-time bound");
  }

  Eigen::LLT<Mat> m_llt(star.mass);
  const Mat inner =
      sf.phi_p *
      m_llt.solve(star.md * dd_llt.solve(star.md * m_llt.solve(
                                             sf.phi_p.transpose())));

  RiseTimeBound out;
  out.delta = lambda_min_sym(inner);
  const Mat damping_form = sf.phi_m * star.dd * sf.phi_m.transpose();
  const double psi_max = lambda_max_sym(damping_form);
  const double psi_min = lambda_min_sym(damping_form);
  out.discriminant = 1.0 - 4.0 * out.delta / psi_max;
  if (out.discriminant >= 0.0) {
    out.lambda_tr = std::min(
        psi_min, 2.0 * out.delta / (1.0 + std::sqrt(out.discriminant)));
  } else {
    out.lambda_tr = psi_min;
  }
  out.t_rise = 4.0 / out.lambda_tr;
  return out;
}

CanonicalSaddle canonical_saddle(const TargetDynamics& target,
                                 const MechanicalModel& model,
                                 const GyroGenerator& gen,
                                 const Region& region) {
  const int n = target.n;
  const StarMatrices star = evaluate_stars(target, model);
  Eigen::LLT<Mat> md_llt(star.md);
  if (md_llt.info() != Eigen::Success) {
    throw NumericalError("target mass matrix must be positive definite at the "
                         "goal");
  }
  const Mat mc = star.mass * md_llt.solve(star.mass);
  const Mat dc = star.mass * md_llt.solve(star.dd * md_llt.solve(star.mass));
  const Mat s_jac = gen.qd_jac(target.q_star);

  CanonicalSaddle out;
  out.generator_jac = s_jac;
  out.intrinsic = is_intrinsic(gen, region);

  StarMatrices cstar;
  cstar.mass = mc;
  cstar.md = mc;
  cstar.hess = star.hess;
  cstar.dd = dc;
  cstar.j2 = Mat::Zero(n, n);

  SaddleForm sf;
  sf.star = cstar;
  const Mat mc_inv = mc.llt().solve(Mat::Identity(n, n));
  sf.phi_m = ut_left_factor(mc_inv, "inverse canonical mass at the goal");
  sf.phi_p = ut_left_factor(star.hess, "shaped potential Hessian at the goal");
  sf.psi = sf.phi_m * (dc + s_jac - s_jac.transpose()) * sf.phi_m.transpose();

  sf.a_mat = Mat::Zero(2 * n, 2 * n);
  sf.a_mat.topLeftCorner(n, n) = sf.psi;
  sf.a_mat.topRightCorner(n, n) = sf.phi_m * sf.phi_p.transpose();
  sf.a_mat.bottomLeftCorner(n, n) = -sf.phi_p * sf.phi_m.transpose();

  sf.t_mat = Mat::Zero(2 * n, 2 * n);
  sf.t_mat.topLeftCorner(n, n) = -sf.phi_m * s_jac;
  sf.t_mat.topRightCorner(n, n) = sf.phi_m;
  sf.t_mat.bottomLeftCorner(n, n) = sf.phi_p;
  out.form = sf;

  // Canonical closed-loop Jacobian at the goal: [[0, I], [-I, -Dc*]] times
  // the Hessian of Hc, whose blocks carry the generator coupling.
  Mat hess_c = Mat::Zero(2 * n, 2 * n);
  hess_c.topLeftCorner(n, n) =
      star.hess + s_jac.transpose() * mc.llt().solve(s_jac);
  hess_c.topRightCorner(n, n) = -(mc.llt().solve(s_jac)).transpose();
  hess_c.bottomLeftCorner(n, n) = -mc.llt().solve(s_jac);
  hess_c.bottomRightCorner(n, n) = mc_inv;

  Mat lin = Mat::Zero(2 * n, 2 * n);
  lin.topLeftCorner(n, n) = hess_c.bottomLeftCorner(n, n);
  lin.topRightCorner(n, n) = hess_c.bottomRightCorner(n, n);
  lin.bottomLeftCorner(n, n) =
      -hess_c.topLeftCorner(n, n) - dc * hess_c.bottomLeftCorner(n, n);
  lin.bottomRightCorner(n, n) =
      -hess_c.topRightCorner(n, n) - dc * hess_c.bottomRightCorner(n, n);
  out.linearization = lin;
  return out;
}

SpectralReport spectral_report(const TargetDynamics& target,
                               const MechanicalModel& model) {
  SpectralReport rep;
  const StarMatrices star = evaluate_stars(target, model);
  rep.linearization = linearize_star(star);
  {
    Eigen::EigenSolver<Mat> es(rep.linearization);
    rep.eigenvalues = es.eigenvalues();
    std::sort(rep.eigenvalues.data(),
              rep.eigenvalues.data() + rep.eigenvalues.size(),
              [](const std::complex<double>& a, const std::complex<double>& b) {
                if (a.real() != b.real()) return a.real() < b.real();
                return a.imag() < b.imag();
              });
  }
  rep.saddle = saddle_form(star);
  rep.circles = eigen_circles(rep.saddle);

  rep.p5_applicable = max_abs(star.j2) <= kGyroTol * (1.0 + max_abs(star.dd));
  if (rep.p5_applicable) {
    rep.p5 = oscillation_free(star);
    rep.min_damping = min_damping_for_p5(star);
    if (rep.p5.holds && lambda_min_sym(star.dd) > 0.0) {
      rep.rise_applicable = true;
      rep.rise = rise_time_bound(rep.saddle);
    }
  }
  return rep;
}

}  // namespace phtune
