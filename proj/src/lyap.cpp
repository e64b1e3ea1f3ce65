#include "phtune/lyap.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

#include "phtune/errors.hpp"

namespace phtune {

namespace {

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

HatSystem::HatSystem(const MechanicalModel& model, const TargetDynamics& target)
    : n_(target.n),
      q_star_(target.q_star),
      g_(model.input_matrix()),
      ud_at_goal_(target.ud(target.q_star)),
      mass_(model.mass),
      md_(target.md),
      ud_(target.ud),
      ud_grad_(target.ud_grad),
      ud_hess_(target.ud_hess),
      dd_(target.dd),
      j2_(target.j2) {
  if (model.n != target.n) {
    throw InputError("model and target dimensions do not match");
  }
}

HatSystem build_hat_system(const MechanicalModel& model,
                           const TargetDynamics& target) {
  return HatSystem(model, target);
}

Mat HatSystem::td(const Vec& qhat) const {
  const Vec q = qhat + q_star_;
  // Md = L L'  =>  inv(Md) = inv-transpose(L) inv(L), and inv-transpose(L)
  // is the upper-triangular factor with positive diagonal.
  const Mat md = md_(q);
  Eigen::LLT<Mat> llt(md);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("target mass matrix is not positive definite at q = " +
                         format_point(q));
  }
  const Mat l = llt.matrixL();
  return l.transpose()
      .triangularView<Eigen::Upper>()
      .solve(Mat::Identity(n_, n_));
}

Mat HatSystem::a_hat(const Vec& qhat) const {
  const Vec q = qhat + q_star_;
  const Mat l = Mat(md_(q).llt().matrixL());  // inv-transpose of Td
  return mass_(q).llt().solve(l);
}

Mat HatSystem::a_hat_partial(const Vec& qhat, int i) const {
  const double h = fd_step * (1.0 + std::abs(qhat(i)));
  Vec qp = qhat, qm = qhat;
  qp(i) += h;
  qm(i) -= h;
  return (a_hat(qp) - a_hat(qm)) / (2.0 * h);
}

Mat HatSystem::a_hat_dot(const Vec& qhat, const Vec& phat) const {
  const Vec qhat_dot = a_hat(qhat) * phat;
  Mat out = Mat::Zero(n_, n_);
  for (int i = 0; i < n_; ++i) {
    out += a_hat_partial(qhat, i) * qhat_dot(i);
  }
  return out;
}

double HatSystem::u_hat(const Vec& qhat) const {
  return ud_(qhat + q_star_) - ud_at_goal_;
}

Vec HatSystem::u_hat_grad(const Vec& qhat) const {
  return ud_grad_(qhat + q_star_);
}

Mat HatSystem::u_hat_hess(const Vec& qhat) const {
  return ud_hess_(qhat + q_star_);
}

Mat HatSystem::d_hat(const Vec& qhat, const Vec& phat) const {
  const Vec q = qhat + q_star_;
  const Mat t = td(qhat);
  const Mat l = Mat(md_(q).llt().matrixL());
  const Vec p = l * phat;  // inv-transpose(Td) phat
  return t.transpose() * dd_(q, p) * t;
}

Mat HatSystem::j_hat(const Vec& qhat, const Vec& phat) const {
  const Vec q = qhat + q_star_;
  const Mat t = td(qhat);
  const Mat l = Mat(md_(q).llt().matrixL());
  const Vec p = l * phat;

  Mat out = t.transpose() * j2_(q, p) * t;
  const Mat a = a_hat(qhat);
  for (int i = 0; i < n_; ++i) {
    const double h = fd_step * (1.0 + std::abs(qhat(i)));
    Vec qp = qhat, qm = qhat;
    qp(i) += h;
    qm(i) -= h;
    const Mat dtd = (td(qp) - td(qm)) / (2.0 * h);
    const Vec r = dtd.transpose() * p;
    const Vec c = a.row(i).transpose();
    out += r * c.transpose() - c * r.transpose();
  }
  return out;
}

Vec HatSystem::to_hat(const StateQP& s) const {
  Vec xhat(2 * n_);
  xhat.head(n_) = s.q - q_star_;
  xhat.tail(n_) = td(s.q - q_star_).transpose() * s.p;
  return xhat;
}

StateQP HatSystem::from_hat(const Vec& xhat) const {
  if (xhat.size() != 2 * n_) throw InputError("hat state must be a 2n-vector");
  StateQP s;
  s.q = xhat.head(n_) + q_star_;
  const Mat l = Mat(md_(s.q).llt().matrixL());
  s.p = l * xhat.tail(n_);
  return s;
}

Vec HatSystem::field(const Vec& xhat) const {
  if (xhat.size() != 2 * n_) throw InputError("hat state must be a 2n-vector");
  const Vec qhat = xhat.head(n_);
  const Vec phat = xhat.tail(n_);
  const Mat a = a_hat(qhat);
  Vec out(2 * n_);
  out.head(n_) = a * phat;
  out.tail(n_) = -a.transpose() * u_hat_grad(qhat) +
                 (j_hat(qhat, phat) - d_hat(qhat, phat)) * phat;
  return out;
}

Vec HatSystem::output(const Vec& qhat, const Vec& phat) const {
  return g_.transpose() * (td(qhat) * phat);
}

double HatSystem::hamiltonian(const Vec& xhat) const {
  const Vec qhat = xhat.head(n_);
  const Vec phat = xhat.tail(n_);
  return 0.5 * phat.squaredNorm() + u_hat(qhat);
}

double HatSystem::candidate(const Vec& xhat, double eps) const {
  const Vec qhat = xhat.head(n_);
  const Vec phat = xhat.tail(n_);
  return hamiltonian(xhat) +
         eps * phat.dot(a_hat(qhat).transpose() * u_hat_grad(qhat));
}

Betas compute_betas(const HatSystem& hat, const Region& region) {
  if (region.center.size() != hat.dof()) {
    throw InputError("region dimension does not match the system dimension");
  }
  double hess_min = std::numeric_limits<double>::infinity();
  double hess_max = -std::numeric_limits<double>::infinity();
  Vec witness;
  for (const Vec& q : region.grid()) {
    const Vec qhat = q - hat.goal();
    const Mat h = hat.u_hat_hess(qhat);
    const double lo = lambda_min_sym(h);
    if (lo < hess_min) {
      hess_min = lo;
      witness = q;
    }
    hess_max = std::max(hess_max, lambda_max_sym(h));
  }
  if (hess_min <= 0.0) {
    throw ModelInvariantError(
        "shaped potential is not strongly convex on the region (minimum "
        "Hessian eigenvalue " +
        std::to_string(hess_min) + " at q = " + format_point(witness) + ")");
  }
  Betas betas;
  betas.beta_min = std::min(1.0, hess_min);
  betas.beta_max = std::max(1.0, hess_max);
  return betas;
}

std::vector<Vec> momentum_ball_samples(int n, const MomentumBall& ball) {
  std::vector<Vec> out;
  out.push_back(Vec::Zero(n));
  if (ball.radius <= 0.0 || ball.radii < 1) return out;

  std::vector<Vec> dirs;
  if (n == 1) {
    dirs.push_back(Vec::Constant(1, 1.0));
    dirs.push_back(Vec::Constant(1, -1.0));
  } else {
    for (int a = 0; a + 1 < n; a += 2) {
      for (int k = 0; k < ball.directions; ++k) {
        const double phi = 2.0 * M_PI * k / ball.directions;
        Vec v = Vec::Zero(n);
        v(a) = std::cos(phi);
        v(a + 1) = std::sin(phi);
        dirs.push_back(v);
      }
    }
    if (n % 2 == 1) {
      Vec v = Vec::Zero(n);
      v(n - 1) = 1.0;
      dirs.push_back(v);
      dirs.push_back(-v);
    }
  }
  for (int j = 1; j <= ball.radii; ++j) {
    const double r = ball.radius * j / ball.radii;
    for (const Vec& v : dirs) out.push_back(r * v);
  }
  return out;
}

LyapSampleSet build_sample_set(const HatSystem& hat, const Region& region,
                               const MomentumBall& ball) {
  const int n = hat.dof();
  const Betas betas = compute_betas(hat, region);
  const std::vector<Vec> momenta = momentum_ball_samples(n, ball);

  LyapSampleSet set;
  set.n = n;
  set.beta_min = betas.beta_min;
  set.beta_max = betas.beta_max;

  for (const Vec& q : region.grid()) {
    const Vec qhat = q - hat.goal();
    const Mat a = hat.a_hat(qhat);
    const Mat hess = hat.u_hat_hess(qhat);
    const double sig = sigma_max(a);
    set.sigma_a = std::max(set.sigma_a, sig);
    set.sigma_gt = std::max(
        set.sigma_gt, sigma_max(hat.input_matrix().transpose() * hat.td(qhat)));

    std::vector<Mat> a_partials(n);
    for (int i = 0; i < n; ++i) a_partials[i] = hat.a_hat_partial(qhat, i);

    const Mat k1 = a * a.transpose() + a.transpose() * a;
    const Mat k22 = a.transpose() * hess * a;
    const Mat hess_a = hess * a;

    for (const Vec& phat : momenta) {
      LyapSample s;
      s.qhat = qhat;
      s.phat = phat;
      s.sigma_a = sig;
      s.a = a;
      s.k1 = k1;
      s.k22 = k22;
      s.hess_a = hess_a;
      s.dhat = hat.d_hat(qhat, phat);

      const Vec qhat_dot = a * phat;
      Mat a_dot = Mat::Zero(n, n);
      for (int i = 0; i < n; ++i) a_dot += a_partials[i] * qhat_dot(i);
      s.k12 = a * (s.dhat - hat.j_hat(qhat, phat)) - a_dot;
      set.samples.push_back(std::move(s));
    }
  }
  return set;
}

Mat upsilon_sym(const HatSystem& hat, double eps, const Vec& qhat,
                const Vec& phat) {
  const int n = hat.dof();
  const Mat a = hat.a_hat(qhat);
  const Mat hess = hat.u_hat_hess(qhat);
  const Mat dhat = hat.d_hat(qhat, phat);
  const Mat jhat = hat.j_hat(qhat, phat);
  const Mat a_dot = hat.a_hat_dot(qhat, phat);

  Mat u(2 * n, 2 * n);
  u.topLeftCorner(n, n) = eps * (a * a.transpose() + a.transpose() * a);
  u.topRightCorner(n, n) = 0.5 * eps * (a * (dhat - jhat) - a_dot);
  u.bottomLeftCorner(n, n) = u.topRightCorner(n, n).transpose();
  u.bottomRightCorner(n, n) = dhat - eps * a.transpose() * hess * a;
  return u;
}

namespace {

// Feasibility of one eps over the cached samples: candidate sandwich lower
// constant positive, momentum block PD, Schur complement PD.
bool eps_feasible(const LyapSampleSet& set, double eps, std::string* why) {
  if (set.beta_min - eps * set.sigma_a * set.beta_max * set.beta_max <= 0.0) {
    if (why) *why = "candidate sandwich constant k1 is not positive";
    return false;
  }
  for (std::size_t idx = 0; idx < set.samples.size(); ++idx) {
    const LyapSample& s = set.samples[idx];
    const Mat u22 = s.dhat - eps * s.k22;
    Eigen::SelfAdjointEigenSolver<Mat> es22(0.5 * (u22 + u22.transpose()),
                                            Eigen::EigenvaluesOnly);
    if (es22.eigenvalues().minCoeff() <= 0.0) {
      if (why) {
        *why = "momentum block of the decay form is not positive definite "
               "at sample " +
               std::to_string(idx) + " (qhat = " + format_point(s.qhat) + ")";
      }
      return false;
    }
    // eps K1 - (eps^2/4) K12 inv(U22) K12'  >  0, divided through by eps.
    const Mat x = u22.llt().solve(s.k12.transpose());
    const Mat schur = s.k1 - 0.25 * eps * s.k12 * x;
    if (lambda_min_sym(schur) <= 0.0) {
      if (why) {
        *why = "Schur complement of the decay form is not positive definite "
               "at sample " +
               std::to_string(idx) + " (qhat = " + format_point(s.qhat) + ")";
      }
      return false;
    }
  }
  return true;
}

}  // namespace

double find_epsilon(const LyapSampleSet& set, double eps_hi, double rel_tol,
                    double eps_min) {
  if (set.samples.empty()) throw InputError("sample set is empty");
  if (!(eps_hi > 0.0) || !(eps_min > 0.0) || eps_min > eps_hi) {
    throw InputError("invalid epsilon search interval");
  }
  if (eps_feasible(set, eps_hi, nullptr)) return eps_hi;

  double lo = eps_hi;
  double hi = eps_hi;
  bool found = false;
  while (lo > eps_min) {
    hi = lo;
    lo *= 0.1;
    if (lo < eps_min) lo = eps_min;
    if (eps_feasible(set, lo, nullptr)) {
      found = true;
      break;
    }
  }
  if (!found) {
    std::string why;
    eps_feasible(set, eps_min, &why);
    throw NumericalError(
        "no feasible epsilon found down to " + std::to_string(eps_min) +
        ": " + why);
  }
  while (hi - lo > rel_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    if (eps_feasible(set, mid, nullptr)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

double estimate_mu(const LyapSampleSet& set, double eps) {
  if (set.samples.empty()) throw InputError("sample set is empty");
  const int n = set.n;
  double mu = std::numeric_limits<double>::infinity();
  const LyapSample* worst = nullptr;
  for (const LyapSample& s : set.samples) {
    Mat u(2 * n, 2 * n);
    u.topLeftCorner(n, n) = eps * s.k1;
    u.topRightCorner(n, n) = 0.5 * eps * s.k12;
    u.bottomLeftCorner(n, n) = u.topRightCorner(n, n).transpose();
    u.bottomRightCorner(n, n) = s.dhat - eps * s.k22;
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (u + u.transpose()),
                                          Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    if (lo < mu) {
      mu = lo;
      worst = &s;
    }
  }
  if (mu <= 0.0 && worst != nullptr) {
    throw NumericalError(
        "decay form is not positive definite (lambda_min = " +
        std::to_string(mu) + " at qhat = " + format_point(worst->qhat) +
        ", phat = " + format_point(worst->phat) + ")");
  }
  return mu;
}

EsBounds es_bounds(double eps, double mu, const Betas& betas, double sigma_a,
                   double sigma_gt, double xhat0_norm) {
  if (eps < 0.0) throw InputError("epsilon must be non-negative");
  EsBounds out;
  const double cross = eps * sigma_a * betas.beta_max * betas.beta_max;
  out.k1 = 0.5 * (betas.beta_min - cross);
  out.k2 = 0.5 * (betas.beta_max + cross);
  if (out.k1 <= 0.0) {
    throw NumericalError(
        "candidate is not a quadratic sandwich at this epsilon (k1 = " +
        std::to_string(out.k1) + ")");
  }
  const double denom = 1.0 + eps * sigma_a * betas.beta_max;
  out.rate_paper = mu * betas.beta_max / denom;
  out.rate_sound = mu * betas.beta_min * betas.beta_min /
                   (betas.beta_max * denom);
  out.xi = sigma_gt * std::sqrt(out.k2 / out.k1) * xhat0_norm;
  return out;
}

IssBounds iss_bounds(const LyapSampleSet& set, double eps, double mu,
                     const EsBounds& es, double theta, double s0,
                     double dhat_norm) {
  if (!(theta > 0.0 && theta < 1.0)) {
    throw InputError("theta must lie strictly between 0 and 1");
  }
  const int n = set.n;
  IssBounds out;
  out.theta = theta;

  // varphi = max over position samples of sigma_max of
  // [[I, eps hessU Ahat], [eps Ahat', I]].
  double varphi = 0.0;
  for (const LyapSample& s : set.samples) {
    if (s.phat.squaredNorm() != 0.0) continue;  // position-dependent only
    Mat u(2 * n, 2 * n);
    u.setIdentity();
    u.topRightCorner(n, n) = eps * s.hess_a;
    u.bottomLeftCorner(n, n) = eps * s.a.transpose();
    varphi = std::max(varphi, sigma_max(u));
  }
  out.varphi = varphi;

  out.gain_margin = mu * set.beta_max * theta / varphi;
  out.rate2 = es.rate_paper * (1.0 - theta);
  out.ultimate_radius = dhat_norm == 0.0 ? 0.0 : dhat_norm / out.gain_margin;
  out.l2_state_bound = s0 / (mu * set.beta_max * set.beta_max * (1.0 - theta));
  out.l2_dist_bound =
      mu * theta * theta * s0 / (varphi * varphi * (1.0 - theta));
  return out;
}

}  // namespace phtune
