#include "phtune/canonical.hpp"

#include <random>
#include <sstream>

#include "phtune/errors.hpp"

namespace phtune {

GyroGenerator zero_generator(int n) {
  GyroGenerator gen;
  gen.qd = [n](const Vec&) { return Vec::Zero(n); };
  gen.qd_jac = [n](const Vec&) { return Mat::Zero(n, n); };
  return gen;
}

GyroGenerator constant_generator(const Vec& value) {
  const Vec v = value;
  const int n = static_cast<int>(v.size());
  GyroGenerator gen;
  gen.qd = [v](const Vec&) { return v; };
  gen.qd_jac = [n](const Vec&) { return Mat::Zero(n, n); };
  return gen;
}

GyroGenerator linear_generator(const Mat& coeff) {
  if (coeff.rows() != coeff.cols()) {
    throw InputError("linear generator coefficient must be square");
  }
  const Mat s = coeff;
  GyroGenerator gen;
  gen.qd = [s](const Vec& q) -> Vec { return s * q; };
  gen.qd_jac = [s](const Vec&) { return s; };
  return gen;
}

Vec canonical_momentum(const MechanicalModel& model,
                       const TargetDynamics& target, const GyroGenerator& gen,
                       const StateQP& s) {
  if (s.q.size() != target.n || s.p.size() != target.n) {
    throw InputError("state must match the target dimension");
  }
  const Mat m_mat = model.mass(s.q);
  const Mat md = target.md(s.q);
  return m_mat * md.llt().solve(s.p) + gen.qd(s.q);
}

std::function<Mat(const Vec&, const Vec&)> build_j2_from_generator(
    const MechanicalModel& model, const TargetDynamics& target,
    const GyroGenerator& gen) {
  const int n = target.n;
  const auto mass = model.mass;
  const auto mass_partial = model.mass_partial;
  const auto md_fn = target.md;
  const auto md_partial = target.md_partial;
  const auto jac = gen.qd_jac;

  return [=](const Vec& q, const Vec& p) -> Mat {
    const Mat m_mat = mass(q);
    const Mat md = md_fn(q);
    Eigen::LLT<Mat> md_llt(md);
    const Vec md_inv_p = md_llt.solve(p);

    // Column j of W = d/dq [M inv(Md) p].
    Mat w(n, n);
    for (int j = 0; j < n; ++j) {
      w.col(j) = mass_partial(q, j) * md_inv_p -
                 m_mat * md_llt.solve(md_partial(q, j) * md_inv_p);
    }
    const Mat jac_q = jac(q);
    const Mat combined = (w - w.transpose()) + (jac_q - jac_q.transpose());

    Eigen::LLT<Mat> m_llt(m_mat);
    // Md inv(M) [W' - W + (dqd)' - dqd] inv(M) Md, assembled via solves.
    const Mat inner = m_llt.solve(combined.transpose() * m_llt.solve(md));
    return md * inner;
  };
}

bool is_intrinsic(const GyroGenerator& gen, const Region& region, double tol) {
  for (const Vec& q : region.grid()) {
    if (symmetry_defect(gen.qd_jac(q)) > tol) return true;
  }
  return false;
}

CanonicalForm to_canonical(const MechanicalModel& model,
                           const TargetDynamics& target,
                           const GyroGenerator& gen, const Region& region) {
  if (region.center.size() != target.n) {
    throw InputError("region dimension does not match the target dimension");
  }
  const int n = target.n;
  const auto generated_j2 = build_j2_from_generator(model, target, gen);

  // The transform exists exactly when the target's gyroscopic term is the
  // one induced by this generator; probe at pseudo-random states.
  std::mt19937_64 rng(0);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  double max_dev = 0.0;
  double scale = 0.0;
  for (int k = 0; k < 20; ++k) {
    Vec q(n), p(n);
    for (int i = 0; i < n; ++i) {
      q(i) = region.center(i) + region.half_widths(i) * unit(rng);
    }
    for (int i = 0; i < n; ++i) p(i) = unit(rng);
    const Mat expected = generated_j2(q, p);
    max_dev = std::max(max_dev, max_abs(target.j2(q, p) - expected));
    scale = std::max(scale, max_abs(expected));
  }
  if (max_dev > 1e-8 * (1.0 + scale)) {
    std::ostringstream oss;
    oss << "target gyroscopic term is not generated by this momentum "
           "translation (max deviation "
        << max_dev << ")";
    throw ScopeError(oss.str());
  }

  const auto mass = model.mass;
  const auto mass_partial = model.mass_partial;
  const auto md_fn = target.md;
  const auto md_partial = target.md_partial;
  const auto qd = gen.qd;
  const auto qd_jac = gen.qd_jac;
  const auto ud = target.ud;
  const auto ud_grad = target.ud_grad;
  const auto dd = target.dd;

  auto mc = [mass, md_fn](const Vec& q) -> Mat {
    const Mat m_mat = mass(q);
    return m_mat * md_fn(q).llt().solve(m_mat);
  };
  auto mc_partial = [mass, mass_partial, md_fn, md_partial](const Vec& q,
                                                            int i) -> Mat {
    const Mat m_mat = mass(q);
    Eigen::LLT<Mat> md_llt(md_fn(q));
    const Mat dm = mass_partial(q, i);
    const Mat dmd = md_partial(q, i);
    return dm * md_llt.solve(m_mat) -
           m_mat * md_llt.solve(dmd * md_llt.solve(m_mat)) +
           m_mat * md_llt.solve(dm);
  };
  auto original_p = [mass, md_fn, qd](const Vec& q, const Vec& pc) -> Vec {
    return md_fn(q) * mass(q).llt().solve(pc - qd(q));
  };

  CanonicalForm form;
  form.n = n;
  form.q_star = target.q_star;
  form.mc = mc;
  form.dc = [mc, dd, original_p, mass, md_fn](const Vec& q,
                                              const Vec& pc) -> Mat {
    const Vec p = original_p(q, pc);
    const Mat m_mat = mass(q);
    Eigen::LLT<Mat> md_llt(md_fn(q));
    return m_mat * md_llt.solve(dd(q, p) * md_llt.solve(m_mat));
  };
  form.hc = [mc, qd, ud](const Vec& q, const Vec& pc) {
    const Vec shifted = pc - qd(q);
    return 0.5 * shifted.dot(mc(q).llt().solve(shifted)) + ud(q);
  };
  form.jg = [mass, md_fn, qd_jac](const Vec& q) -> Mat {
    const Mat m_mat = mass(q);
    const Mat md = md_fn(q);
    Eigen::LLT<Mat> m_llt(m_mat);
    const Mat jac_q = qd_jac(q);
    const Mat inner =
        m_llt.solve((jac_q.transpose() - jac_q) * m_llt.solve(md));
    return md * inner;
  };
  form.to_canonical_momentum = [mass, md_fn, qd](const StateQP& s) {
    return Vec(mass(s.q) * md_fn(s.q).llt().solve(s.p) + qd(s.q));
  };
  form.from_canonical_momentum = original_p;
  form.intrinsic = is_intrinsic(gen, region);

  form.field = [mc, mc_partial, qd, qd_jac, ud_grad,
                dc = form.dc, n](const Vec& q, const Vec& pc) -> Vec {
    const Vec shifted = pc - qd(q);
    Eigen::LLT<Mat> mc_llt(mc(q));
    const Vec vel = mc_llt.solve(shifted);  // grad_pc Hc

    Vec dhc_dq = ud_grad(q) - qd_jac(q).transpose() * vel;
    for (int i = 0; i < n; ++i) {
      dhc_dq(i) -= 0.5 * vel.dot(mc_partial(q, i) * vel);
    }

    Vec out(2 * n);
    out.head(n) = vel;
    out.tail(n) = -dhc_dq - dc(q, pc) * vel;
    return out;
  };
  return form;
}

}  // namespace phtune
