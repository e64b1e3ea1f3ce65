#include <doctest.h>

#include <cmath>

#include "phtune/errors.hpp"
#include "phtune/linalg.hpp"
#include "phtune/model.hpp"
#include "phtune/models.hpp"

#include "helpers.hpp"

using namespace phtune;

TEST_CASE("region grid enumerates the cartesian product") {
  Region r;
  r.center = Vec::Zero(2);
  r.half_widths = Vec::Constant(2, 1.0);
  r.samples_per_axis = 3;
  const auto pts = r.grid();
  CHECK(pts.size() == 9);
  CHECK(pts.front().isApprox(Vec::Constant(2, -1.0)));
  CHECK(pts.back().isApprox(Vec::Constant(2, 1.0)));

  SUBCASE("zero-width axes collapse to a single sample") {
    r.half_widths(1) = 0.0;
    const auto collapsed = r.grid();
    CHECK(collapsed.size() == 3);
    for (const Vec& p : collapsed) CHECK(p(1) == 0.0);
  }

  SUBCASE("oversized grids are rejected") {
    r.samples_per_axis = 2000;
    CHECK_THROWS_AS(r.grid(1000), InputError);
  }

  SUBCASE("invalid shapes are rejected") {
    r.half_widths = Vec::Constant(3, 1.0);
    CHECK_THROWS_AS(r.validate(), InputError);
    r.half_widths = Vec::Constant(2, -1.0);
    CHECK_THROWS_AS(r.validate(), InputError);
  }
}

TEST_CASE("hamiltonian of the scalar models") {
  const MechanicalModel pm = make_point_mass(2.0, 0.0);
  StateQP s;
  s.q = Vec::Constant(1, 3.0);
  s.p = Vec::Constant(1, 4.0);
  CHECK(eval_hamiltonian(pm, s) == doctest::Approx(4.0 * 4.0 / (2.0 * 2.0)));
  CHECK(pm.velocity(s)(0) == doctest::Approx(2.0));

  const MechanicalModel msd = make_mass_spring_damper(1.0, 5.0, 0.1);
  CHECK(eval_hamiltonian(msd, s) ==
        doctest::Approx(0.5 * 16.0 + 0.5 * 5.0 * 9.0));
}

TEST_CASE("non positive definite mass is reported as an invariant violation") {
  MechanicalModel bad = testutil::constant_model(-Mat::Identity(2, 2));
  StateQP s;
  s.q = Vec::Zero(2);
  s.p = Vec::Ones(2);
  CHECK_THROWS_AS(eval_hamiltonian(bad, s), ModelInvariantError);
}

TEST_CASE("model validation rejects inconsistent definitions") {
  MechanicalModel mdl = make_point_mass();
  SUBCASE("missing evaluator") {
    mdl.potential_grad = nullptr;
    CHECK_THROWS_AS(mdl.validate(), InputError);
  }
  SUBCASE("singular actuator block") {
    mdl.actuator_block = Mat::Zero(1, 1);
    CHECK_THROWS_AS(mdl.validate(), InputError);
  }
  SUBCASE("actuated count out of range") {
    mdl.m = 2;
    CHECK_THROWS_AS(mdl.validate(), InputError);
  }
}

TEST_CASE("input matrix and annihilator are mutually orthogonal") {
  const MechanicalModel man = make_planar_manipulator();
  CHECK(man.n == 4);
  CHECK(man.m == 2);
  const Mat g = man.input_matrix();
  const Mat gp = man.unactuated_projector();
  CHECK(g.rows() == 4);
  CHECK(g.cols() == 2);
  CHECK(gp.rows() == 2);
  CHECK(gp.cols() == 4);
  CHECK(max_abs(gp * g) == 0.0);
  CHECK(g.bottomRows(2)(1, 1) == doctest::Approx(1.67));
}

TEST_CASE("manipulator mass matrix derivative matches finite differences") {
  const MechanicalModel man = make_planar_manipulator();
  Vec q(4);
  q << 0.3, -0.7, 1.1, 0.2;
  for (int i = 0; i < 4; ++i) {
    const Mat analytic = man.mass_partial(q, i);
    const Mat fd = fd_matrix_partial(man.mass, q, i);
    CHECK(max_abs(analytic - fd) < 1e-7);
  }
}

TEST_CASE("manipulator potential derivatives match finite differences") {
  const MechanicalModel man = make_planar_manipulator();
  Vec q(4);
  q << 0.5, 0.9, 0.4, 1.0;
  const Vec grad = man.potential_grad(q);
  const Vec fd = fd_gradient(man.potential, q);
  CHECK((grad - fd).norm() < 1e-7);
  const Mat hess = man.potential_hess(q);
  const Mat fdh = fd_jacobian(man.potential_grad, q);
  CHECK(max_abs(hess - fdh) < 1e-7);
}

TEST_CASE("assignable equilibria of the partially actuated chain") {
  const MechanicalModel chain = make_spring_chain(3, 1.0, 2.0, 0.5);
  CHECK(chain.m == 1);

  Vec good(3);
  good << 0.4, 0.8, 1.2;  // equal spring stretch balances every free mass
  CHECK(check_equilibrium(chain, good).ok);

  Vec bad(3);
  bad << 0.4, 0.9, 1.2;
  const EquilibriumCheck ec = check_equilibrium(chain, bad);
  CHECK_FALSE(ec.ok);
  CHECK(ec.residual > 1e-3);

  // A fully actuated system can be steered to any constant position.
  const MechanicalModel full = make_spring_chain_full(3);
  CHECK(check_equilibrium(full, bad).ok);
}

TEST_CASE("mass bounds over a region bracket the spectrum") {
  const MechanicalModel man = make_planar_manipulator();
  Region r;
  r.center = testutil::manipulator_goal();
  r.half_widths = Vec::Constant(4, 0.4);
  r.samples_per_axis = 5;
  const MassBounds mb = mass_bounds(man, r);
  CHECK(mb.lower > 0.0);
  CHECK(mb.upper > mb.lower);
  for (const Vec& q : r.grid()) {
    const Mat m = man.mass(q);
    CHECK(lambda_min_sym(m) >= mb.lower - 1e-12);
    CHECK(lambda_max_sym(m) <= mb.upper + 1e-12);
  }
}

TEST_CASE("open-loop field matches the energy gradient structure") {
  const MechanicalModel man = make_planar_manipulator();
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    StateQP s;
    s.q = testutil::random_vector(rng, 4, 0.6);
    s.p = testutil::random_vector(rng, 4, 0.4);
    const Vec u = testutil::random_vector(rng, 2);

    const Vec field = openloop_vector_field(man, s, u);

    const auto ham = [&](const Vec& x) {
      StateQP z;
      z.q = x.head(4);
      z.p = x.tail(4);
      return eval_hamiltonian(man, z);
    };
    Vec x(8);
    x << s.q, s.p;
    const Vec grad = fd_gradient(ham, x);

    const Vec qdot_expected = grad.tail(4);
    const Vec pdot_expected = -grad.head(4) -
                              man.damping(s.q, s.p) * grad.tail(4) +
                              man.input_matrix() * u;
    CHECK((field.head(4) - qdot_expected).norm() < 1e-6);
    CHECK((field.tail(4) - pdot_expected).norm() < 1e-6);
  }
}

TEST_CASE("energy is conserved along the undamped unforced flow") {
  const MechanicalModel msd = make_mass_spring_damper(1.5, 2.0, 0.0);
  StateQP s;
  s.q = Vec::Constant(1, 0.7);
  s.p = Vec::Constant(1, -0.2);
  const Vec u = Vec::Zero(1);
  const Vec f = openloop_vector_field(msd, s, u);
  // dH/dt = grad(H) . xdot = 0 without damping or input
  const double dh = msd.potential_grad(s.q).dot(f.head(1)) +
                    msd.velocity(s).dot(f.tail(1));
  CHECK(std::abs(dh) < 1e-14);
}
