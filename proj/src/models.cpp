#include "phtune/models.hpp"

#include <cmath>

#include "phtune/errors.hpp"

namespace phtune {

namespace {

MechanicalModel make_one_dof(std::string name, double mass, double stiffness,
                             double damping) {
  if (mass <= 0.0) throw InputError("mass must be positive");
  if (stiffness < 0.0) throw InputError("stiffness must be non-negative");
  if (damping < 0.0) throw InputError("damping must be non-negative");
  MechanicalModel mdl;
  mdl.name = std::move(name);
  mdl.n = 1;
  mdl.m = 1;
  mdl.mass = [mass](const Vec&) { return Mat::Constant(1, 1, mass); };
  mdl.mass_partial = [](const Vec&, int) { return Mat::Zero(1, 1); };
  mdl.potential = [stiffness](const Vec& q) {
    return 0.5 * stiffness * q(0) * q(0);
  };
  mdl.potential_grad = [stiffness](const Vec& q) {
    return Vec::Constant(1, stiffness * q(0));
  };
  mdl.potential_hess = [stiffness](const Vec&) {
    return Mat::Constant(1, 1, stiffness);
  };
  mdl.damping = [damping](const Vec&, const Vec&) {
    return Mat::Constant(1, 1, damping);
  };
  mdl.actuator_block = Mat::Identity(1, 1);
  return mdl;
}

Mat chain_stiffness(int count, double k) {
  Mat ks = Mat::Zero(count, count);
  ks(0, 0) += k;  // ground spring on the first mass
  for (int i = 0; i + 1 < count; ++i) {
    ks(i, i) += k;
    ks(i + 1, i + 1) += k;
    ks(i, i + 1) -= k;
    ks(i + 1, i) -= k;
  }
  return ks;
}

MechanicalModel make_chain(std::string name, int count, int actuated,
                           double mass, double stiffness, double damping) {
  if (count < 1) throw InputError("chain length must be at least 1");
  if (mass <= 0.0) throw InputError("mass must be positive");
  if (stiffness < 0.0) throw InputError("stiffness must be non-negative");
  if (damping < 0.0) throw InputError("damping must be non-negative");
  MechanicalModel mdl;
  mdl.name = std::move(name);
  mdl.n = count;
  mdl.m = actuated;
  const Mat m_mat = mass * Mat::Identity(count, count);
  const Mat ks = chain_stiffness(count, stiffness);
  const Mat d_mat = damping * Mat::Identity(count, count);
  mdl.mass = [m_mat](const Vec&) { return m_mat; };
  mdl.mass_partial = [count](const Vec&, int) { return Mat::Zero(count, count); };
  mdl.potential = [ks](const Vec& q) { return 0.5 * q.dot(ks * q); };
  mdl.potential_grad = [ks](const Vec& q) -> Vec { return ks * q; };
  mdl.potential_hess = [ks](const Vec&) { return ks; };
  mdl.damping = [d_mat](const Vec&, const Vec&) { return d_mat; };
  mdl.actuator_block = Mat::Identity(actuated, actuated);
  return mdl;
}

}  // namespace

MechanicalModel make_point_mass(double mass, double damping) {
  return make_one_dof("point_mass", mass, 0.0, damping);
}

MechanicalModel make_mass_spring_damper(double mass, double stiffness,
                                        double damping) {
  return make_one_dof("mass_spring_damper", mass, stiffness, damping);
}

MechanicalModel make_planar_manipulator() {
  // Two elastic-joint links plus two motor coordinates; link inertia varies
  // with the elbow angle, motor inertia is constant.
  const double a1 = 0.1547;
  const double a2 = 0.0111;
  const double b = 0.0168;
  const Vec motor_inertia = (Vec(2) << 0.0628, 0.0026).finished();
  const Vec joint_stiffness = (Vec(2) << 8.43, 16.86).finished();
  const Vec link_damping = (Vec(2) << 0.0331, 0.0077).finished();
  const Vec motor_damping = (Vec(2) << 2.9758, 2.8064).finished();

  MechanicalModel mdl;
  mdl.name = "planar_manipulator";
  mdl.n = 4;
  mdl.m = 2;

  mdl.mass = [=](const Vec& q) {
    const double c = std::cos(q(1));
    Mat m_mat = Mat::Zero(4, 4);
    m_mat(0, 0) = a1 + a2 + 2.0 * b * c;
    m_mat(0, 1) = a2 + b * c;
    m_mat(1, 0) = a2 + b * c;
    m_mat(1, 1) = a2;
    m_mat(2, 2) = motor_inertia(0);
    m_mat(3, 3) = motor_inertia(1);
    return m_mat;
  };
  mdl.mass_partial = [=](const Vec& q, int i) {
    Mat d_mat = Mat::Zero(4, 4);
    if (i == 1) {
      const double s = std::sin(q(1));
      d_mat(0, 0) = -2.0 * b * s;
      d_mat(0, 1) = -b * s;
      d_mat(1, 0) = -b * s;
    }
    return d_mat;
  };
  mdl.potential = [=](const Vec& q) {
    const Vec defl = q.head(2) - q.tail(2);
    return 0.5 * defl.dot(joint_stiffness.asDiagonal() * defl);
  };
  mdl.potential_grad = [=](const Vec& q) {
    const Vec force = joint_stiffness.asDiagonal() * (q.head(2) - q.tail(2));
    Vec g(4);
    g.head(2) = force;
    g.tail(2) = -force;
    return g;
  };
  mdl.potential_hess = [=](const Vec&) {
    Mat h = Mat::Zero(4, 4);
    h.topLeftCorner(2, 2) = joint_stiffness.asDiagonal();
    h.topRightCorner(2, 2) = -Mat(joint_stiffness.asDiagonal());
    h.bottomLeftCorner(2, 2) = -Mat(joint_stiffness.asDiagonal());
    h.bottomRightCorner(2, 2) = joint_stiffness.asDiagonal();
    return h;
  };
  mdl.damping = [=](const Vec&, const Vec&) {
    Mat d_mat = Mat::Zero(4, 4);
    d_mat(0, 0) = link_damping(0);
    d_mat(1, 1) = link_damping(1);
    d_mat(2, 2) = motor_damping(0);
    d_mat(3, 3) = motor_damping(1);
    return d_mat;
  };
  mdl.actuator_block = (Vec(2) << 1.0, 1.67).finished().asDiagonal();
  return mdl;
}

MechanicalModel make_spring_chain(int count, double mass, double stiffness,
                                  double damping) {
  return make_chain("spring_chain", count, 1, mass, stiffness, damping);
}

MechanicalModel make_spring_chain_full(int count, double mass,
                                       double stiffness, double damping) {
  return make_chain("spring_chain_full", count, count, mass, stiffness,
                    damping);
}

MechanicalModel make_model(const std::string& name) {
  if (name == "point_mass") return make_point_mass();
  if (name == "mass_spring_damper") return make_mass_spring_damper();
  if (name == "planar_manipulator") return make_planar_manipulator();
  if (name == "spring_chain") return make_spring_chain(3);
  if (name == "spring_chain_full") return make_spring_chain_full(3);
  throw InputError("unknown model name '" + name + "'");
}

}  // namespace phtune
