#include "phtune/model.hpp"

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

void Region::validate() const {
  if (center.size() == 0) throw InputError("region center must be non-empty");
  if (half_widths.size() != center.size()) {
    throw InputError("region half_widths dimension " +
                     std::to_string(half_widths.size()) +
                     " does not match center dimension " +
                     std::to_string(center.size()));
  }
  if ((half_widths.array() < 0.0).any()) {
    throw InputError("region half_widths must be non-negative");
  }
  if (samples_per_axis < 1) {
    throw InputError("region samples_per_axis must be at least 1");
  }
}

std::vector<Vec> Region::grid(std::size_t max_points) const {
  validate();
  const int n = static_cast<int>(center.size());

  std::vector<std::vector<double>> axes(n);
  std::size_t total = 1;
  for (int i = 0; i < n; ++i) {
    if (half_widths(i) == 0.0 || samples_per_axis == 1) {
      axes[i] = {center(i)};
    } else {
      axes[i].resize(samples_per_axis);
      const double lo = center(i) - half_widths(i);
      const double hi = center(i) + half_widths(i);
      for (int k = 0; k < samples_per_axis; ++k) {
        axes[i][k] = lo + (hi - lo) * k / (samples_per_axis - 1);
      }
    }
    total *= axes[i].size();
    if (total > max_points) {
      throw InputError("region grid would exceed the sample cap of " +
                       std::to_string(max_points) + " points");
    }
  }

  std::vector<Vec> pts;
  pts.reserve(total);
  std::vector<std::size_t> idx(n, 0);
  while (true) {
    Vec q(n);
    for (int i = 0; i < n; ++i) q(i) = axes[i][idx[i]];
    pts.push_back(std::move(q));
    int axis = n - 1;
    while (axis >= 0 && ++idx[axis] == axes[axis].size()) {
      idx[axis] = 0;
      --axis;
    }
    if (axis < 0) break;
  }
  return pts;
}

Mat MechanicalModel::input_matrix() const {
  Mat g = Mat::Zero(n, m);
  g.bottomRows(m) = actuator_block;
  return g;
}

Mat MechanicalModel::unactuated_projector() const {
  const int l = unactuated();
  Mat gp = Mat::Zero(l, n);
  gp.leftCols(l) = Mat::Identity(l, l);
  return gp;
}

Vec MechanicalModel::velocity(const StateQP& s) const {
  return mass(s.q).llt().solve(s.p);
}

void MechanicalModel::validate() const {
  if (n < 1) throw InputError("model must have at least one degree of freedom");
  if (m < 1 || m > n) {
    throw InputError("model must have 1 <= m <= n actuated coordinates, got m=" +
                     std::to_string(m) + ", n=" + std::to_string(n));
  }
  if (!mass || !mass_partial || !potential || !potential_grad ||
      !potential_hess || !damping) {
    throw InputError("model '" + name + "' has unset evaluator functions");
  }
  if (actuator_block.rows() != m || actuator_block.cols() != m) {
    throw InputError("actuator block must be m x m");
  }
  if (std::abs(actuator_block.determinant()) < 1e-12) {
    throw InputError("actuator block must be invertible");
  }
}

double eval_hamiltonian(const MechanicalModel& model, const StateQP& s) {
  if (s.q.size() != model.n || s.p.size() != model.n) {
    throw InputError("state dimension does not match model dimension " +
                     std::to_string(model.n));
  }
  const Mat mq = model.mass(s.q);
  Eigen::LLT<Mat> llt(mq);
  if (llt.info() != Eigen::Success) {
    throw ModelInvariantError("mass matrix is not positive definite at q = " +
                              format_point(s.q));
  }
  return 0.5 * s.p.dot(llt.solve(s.p)) + model.potential(s.q);
}

EquilibriumCheck check_equilibrium(const MechanicalModel& model,
                                   const Vec& q_star, double tol) {
  if (q_star.size() != model.n) {
    throw InputError("q_star dimension does not match model dimension");
  }
  const Vec grad = model.potential_grad(q_star);
  const Vec unactuated_force = model.unactuated_projector() * grad;
  EquilibriumCheck out;
  out.residual = model.unactuated() == 0 ? 0.0 : unactuated_force.norm();
  out.ok = out.residual <= tol;
  return out;
}

MassBounds mass_bounds(const MechanicalModel& model, const Region& region) {
  if (region.center.size() != model.n) {
    throw InputError("region dimension does not match model dimension");
  }
  MassBounds out;
  out.lower = std::numeric_limits<double>::infinity();
  out.upper = -std::numeric_limits<double>::infinity();
  for (const Vec& q : region.grid()) {
    const Mat mq = model.mass(q);
    const double lo = lambda_min_sym(mq);
    if (lo <= 0.0) {
      throw ModelInvariantError("mass matrix is not positive definite at q = " +
                                format_point(q));
    }
    out.lower = std::min(out.lower, lo);
    out.upper = std::max(out.upper, lambda_max_sym(mq));
  }
  return out;
}

Vec openloop_vector_field(const MechanicalModel& model, const StateQP& s,
                          const Vec& u) {
  if (u.size() != model.m) {
    throw InputError("input dimension does not match actuator count");
  }
  const int n = model.n;
  const Vec qdot = model.velocity(s);

  // dH/dq = grad U + sum_i e_i p' d(M^-1)/dq_i p / 2, with
  // d(M^-1)/dq_i = -M^-1 dM/dq_i M^-1.
  Vec dh_dq = model.potential_grad(s.q);
  for (int i = 0; i < n; ++i) {
    dh_dq(i) -= 0.5 * qdot.dot(model.mass_partial(s.q, i) * qdot);
  }

  Vec out(2 * n);
  out.head(n) = qdot;
  out.tail(n) = -dh_dq - model.damping(s.q, s.p) * qdot +
                model.input_matrix() * u;
  return out;
}

}  // namespace phtune
