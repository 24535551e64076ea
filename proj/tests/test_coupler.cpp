#include "doctest.h"

#include <cmath>

#include "jps/coupler.hpp"
#include "jps/errors.hpp"
#include "jps/model.hpp"
#include "jps/spectral.hpp"

using namespace jps;

namespace {
constexpr double kPi = 3.14159265358979323846;

PhysicalParams si_params(double alpha, double beta_acous) {
  PhysicalParams p;
  p.tau = 1e-6;
  p.alpha = alpha;
  p.beta_acous = beta_acous;
  p.omega = 2.0 * kPi * 1e6;
  return p;
}

SpectralField mode(const std::shared_ptr<const BoxGrid>& g, int k, double amp) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(g->num_modes());
  if (amp != 0.0) c[k] = amp;
  return SpectralField(g, c);
}

CoupledData single_mode_data(const std::shared_ptr<const BoxGrid>& g, double amp) {
  CoupledData d;
  d.p0 = mode(g, 0, amp);
  d.p1 = mode(g, 0, 0.0);
  d.theta0 = mode(g, 0, 0.0);
  return d;  // p2 left empty: the equation value at t = 0 is filled in
}

CoupledTrajectory one_state(const std::shared_ptr<const BoxGrid>& g,
                            const SpectralField& p) {
  CoupledTrajectory tr;
  const SpectralField z = mode(g, 0, 0.0);
  tr.ac.states.push_back({0.0, p, z, z});
  tr.ac.dt = 1.0;
  tr.th.states.push_back({0.0, z, z});
  tr.th.dt = 1.0;
  return tr;
}
}  // namespace

TEST_CASE("trajectory norms on hand-built states") {
  auto g = BoxGrid::make(1, {1.0}, {3});
  const double lam = g->eigenvalues()[0];

  const CoupledTrajectory a = one_state(g, mode(g, 0, 1.0));
  CHECK(ynorm(a) == doctest::Approx(std::sqrt(1.0 + lam)).epsilon(1e-13));

  const CoupledTrajectory b = one_state(g, mode(g, 0, 3.0));
  CHECK(ynorm_diff(a, b) == doctest::Approx(2.0 * std::sqrt(1.0 + lam)).epsilon(1e-13));

  const CoupledTrajectory d = subtract(b, a);
  CHECK(d.ac.states[0].p.coef()[0] == doctest::Approx(2.0).epsilon(1e-15));

  CHECK(xnorm_p1(a, 0.5) == doctest::Approx(std::sqrt(1.0 + lam)).epsilon(1e-13));
  CHECK(xnorm_p2(a, 0.5) ==
        doctest::Approx(std::sqrt(1.0 + lam + lam * lam)).epsilon(1e-13));
  CHECK(xnorm_theta2(a) == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
}

TEST_CASE("mismatched meshes are rejected") {
  auto g = BoxGrid::make(1, {1.0}, {3});
  CoupledTrajectory a = one_state(g, mode(g, 0, 1.0));
  CoupledTrajectory b = one_state(g, mode(g, 0, 1.0));
  b.ac.dt = 0.5;
  CHECK_THROWS_AS(ynorm_diff(a, b), MeshMismatch);
  auto g2 = BoxGrid::make(1, {2.0}, {3});
  const CoupledTrajectory c = one_state(g2, mode(g2, 0, 1.0));
  CHECK_THROWS_AS(subtract(a, c), MeshMismatch);
}

TEST_CASE("ball validation and the degeneracy predictor") {
  BallSpec ball{0.5, 2.0, 1.0};
  ball.validate(1e-9, 1);  // fine for a tiny k1

  BallSpec wide{0.9, 50.0, 1.0};
  // 2 k1 eta^(3/4) R1^(1/4) > 1 for k1 = 0.45.
  CHECK(wide.degeneracy_predictor(0.45, 1) < 0.0);
  CHECK_THROWS_AS(wide.validate(0.45, 1), DegeneracyLost);

  BallSpec bad_eta{1.5, 2.0, 1.0};
  CHECK_THROWS_AS(bad_eta.validate(1e-9, 1), ConfigError);
  BallSpec bad_r1{0.5, 0.1, 1.0};
  CHECK_THROWS_AS(bad_r1.validate(1e-9, 1), ConfigError);
}

TEST_CASE("decoupled medium collapses the iteration to two sweeps") {
  // beta_acous = 0 kills the quadratic pressure source, alpha = 0 kills the
  // heating, so the first corrected iterate is already the fixed point.
  CoefficientModel model({1500.0}, {-10.0, 80.0}, si_params(0.0, 0.0));
  auto g = BoxGrid::make(1, {1.0}, {4});
  Coupler cp(g, model, 1e-5, 1e-7);

  FixedPointControls ctl;
  ctl.tol = 1e-10;
  ctl.eta0 = 0.5;
  const auto [traj, rep] = cp.solve(single_mode_data(g, 1e-6), ctl);

  CHECK(rep.converged);
  CHECK(rep.iterations == 2);
  REQUIRE(rep.records.size() == 2);
  CHECK(std::isnan(rep.records[0].ratio));
  CHECK(rep.records[1].ydiff <= 1e-12);
  CHECK(rep.margin == 1.0);  // k = 0 identically
  CHECK(rep.chi_min == 0.0);  // alpha = 0: no diffusivity
  CHECK(rep.residuals.acoustic_rel <= 1e-6);
  CHECK(rep.residuals.thermal_abs == 0.0);  // theta stays identically zero
  CHECK(traj.size() == 101);
  CHECK(traj.th.states.back().theta.coef().norm() == 0.0);
}

TEST_CASE("coupled small-data run satisfies the fixed-point invariants") {
  CoefficientModel model({1500.0, 2.0, -0.01}, {-10.0, 80.0}, si_params(10.0, 5.0));
  auto g = BoxGrid::make(1, {0.1}, {8});
  Coupler cp(g, model, 1e-5, 1e-7);

  FixedPointControls ctl;
  ctl.tol = 1e-9;
  ctl.max_iter = 25;
  ctl.eta0 = 0.1;
  const CoupledData data = single_mode_data(g, 1e-8);
  const auto [traj, rep] = cp.solve(data, ctl);

  CHECK(rep.converged);
  CHECK(rep.iterations <= 10);
  for (std::size_t i = 1; i < rep.records.size(); ++i) {
    CHECK(rep.records[i].ratio < 1.0);
    CHECK(rep.records[i].in_ball);
  }
  CHECK(rep.margin >= 0.99);
  CHECK(rep.chi_min > 0.0);
  CHECK(rep.residuals.acoustic_rel <= 1e-4);
  CHECK(rep.residuals.thermal_rel <= 1e-4);

  // The accepted pair is an honest fixed point: one more sweep moves it by
  // no more than 10x the stopping tolerance.
  const CoupledTrajectory again = cp.apply_T(traj, cp.prepared(data));
  CHECK(ynorm_diff(traj, again) <= 10.0 * ctl.tol * (1.0 + ynorm(traj)));

  // Margin agrees with a direct nodewise evaluation of 1 - 2 k(theta) p.
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < traj.size(); ++n) {
    const Eigen::VectorXd pv = traj.ac.states[n].p.values();
    const Eigen::VectorXd tv = traj.th.states[n].theta.values();
    for (Eigen::Index j = 0; j < pv.size(); ++j)
      margin = std::min(margin, 1.0 - 2.0 * model.eval_medium(tv[j]).k * pv[j]);
  }
  CHECK(rep.margin == doctest::Approx(margin).epsilon(1e-12));
}

TEST_CASE("identical coupled solves are bit identical") {
  CoefficientModel model({1500.0, 2.0, -0.01}, {-10.0, 80.0}, si_params(10.0, 5.0));
  auto g = BoxGrid::make(1, {0.1}, {4});
  Coupler cp(g, model, 5e-6, 1e-7);
  FixedPointControls ctl;
  ctl.eta0 = 0.1;
  const auto [t1, r1] = cp.solve(single_mode_data(g, 1e-8), ctl);
  const auto [t2, r2] = cp.solve(single_mode_data(g, 1e-8), ctl);
  CHECK(r1.iterations == r2.iterations);
  for (std::size_t i = 0; i < r1.records.size(); ++i)
    CHECK(r1.records[i].ydiff == r2.records[i].ydiff);
  const auto& a = t1.ac.states.back();
  const auto& b = t2.ac.states.back();
  for (Eigen::Index i = 0; i < a.p.coef().size(); ++i) {
    CHECK(a.p.coef()[i] == b.p.coef()[i]);
    CHECK(a.ptt.coef()[i] == b.ptt.coef()[i]);
  }
}

TEST_CASE("large data violates the smallness precondition") {
  CoefficientModel model({1500.0, 2.0, -0.01}, {-10.0, 80.0}, si_params(10.0, 5.0));
  auto g = BoxGrid::make(1, {0.1}, {4});
  Coupler cp(g, model, 1e-6, 1e-7);
  FixedPointControls ctl;
  ctl.eta0 = 1e-6;  // far below the actual data size
  CHECK_THROWS_AS(cp.solve(single_mode_data(g, 1e-8), ctl), PreconditionViolated);
}

TEST_CASE("iteration budget overrun is fatal") {
  CoefficientModel model({1500.0, 2.0, -0.01}, {-10.0, 80.0}, si_params(10.0, 5.0));
  auto g = BoxGrid::make(1, {0.1}, {4});
  Coupler cp(g, model, 1e-6, 1e-7);
  FixedPointControls ctl;
  ctl.eta0 = 0.1;
  ctl.max_iter = 1;
  ctl.tol = 1e-14;
  CHECK_THROWS_AS(cp.solve(single_mode_data(g, 1e-8), ctl), MaxIterExceeded);
}

TEST_CASE("degenerate initial pressure is rejected outright") {
  // Unit-speed medium with a large nonlinearity parameter: 2 k p0 > 1.
  PhysicalParams prm;
  prm.tau = 1e-4;
  prm.rho = 1.0;
  prm.beta_acous = 0.45;
  prm.alpha = 0.01;
  prm.omega = 1.0;
  CoefficientModel model({1.0}, {-10.0, 80.0}, prm);
  auto g = BoxGrid::make(1, {1.0}, {2});
  Coupler cp(g, model, 1e-2, 1e-3);
  CHECK_THROWS_AS(cp.prepared(single_mode_data(g, 2.0)), DegeneracyLost);
}

TEST_CASE("margin below the configured floor aborts the iteration") {
  PhysicalParams prm;
  prm.tau = 1e-4;
  prm.rho = 1.0;
  prm.beta_acous = 0.05;
  prm.alpha = 0.01;
  prm.omega = 1.0;
  CoefficientModel model({1.0}, {-10.0, 80.0}, prm);
  auto g = BoxGrid::make(1, {1.0}, {2});
  Coupler cp(g, model, 2e-3, 1e-3);

  FixedPointControls ctl;
  ctl.eta0 = 50.0;                 // smallness gate out of the way
  ctl.ball = BallSpec{0.9, 60.0, 1.0};  // explicit ball; predictor stays positive
  ctl.degeneracy_floor = 0.8;
  // amp = 4: sup |2 k p| ~ 2 * 0.05 * 4 * sqrt(2) = 0.57, margin ~ 0.43 < 0.8.
  CHECK_THROWS_AS(cp.solve(single_mode_data(g, 4.0), ctl), DegeneracyLost);
}

TEST_CASE("control validation names the offending knob") {
  CoefficientModel model({1500.0}, {-10.0, 80.0}, si_params(0.0, 0.0));
  auto g = BoxGrid::make(1, {1.0}, {2});
  Coupler cp(g, model, 1e-6, 1e-7);
  const CoupledData data = single_mode_data(g, 1e-6);

  FixedPointControls bad_tol;
  bad_tol.tol = 0.0;
  bad_tol.eta0 = 0.5;
  try {
    cp.solve(data, bad_tol);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field == "fixed_point.tol");
  }

  FixedPointControls bad_iter;
  bad_iter.max_iter = 0;
  bad_iter.eta0 = 0.5;
  CHECK_THROWS_AS(cp.solve(data, bad_iter), ConfigError);

  FixedPointControls bad_eta0;
  bad_eta0.eta0 = 0.0;
  CHECK_THROWS_AS(cp.solve(data, bad_eta0), ConfigError);

  CHECK_THROWS_AS(Coupler(g, model, 0.0, 1e-7), ConfigError);
  CHECK_THROWS_AS(Coupler(g, model, 1e-6, 0.0), ConfigError);
}

TEST_CASE("the Picard seed holds the data constant in time") {
  CoefficientModel model({1500.0}, {-10.0, 80.0}, si_params(0.0, 0.0));
  auto g = BoxGrid::make(1, {1.0}, {3});
  Coupler cp(g, model, 1e-6, 1e-7);
  const CoupledData data = cp.prepared(single_mode_data(g, 1e-6));
  const CoupledTrajectory seed = cp.hold(data);
  CHECK(seed.size() == 11);
  CHECK((seed.ac.states.front().p.coef() - seed.ac.states.back().p.coef()).norm() ==
        0.0);
  CHECK((seed.th.states.front().theta.coef() - seed.th.states.back().theta.coef())
            .norm() == 0.0);
  CHECK(seed.ac.states.back().t == doctest::Approx(1e-6).epsilon(1e-12));
}

TEST_CASE("incomplete data is rejected with the field named") {
  CoefficientModel model({1500.0}, {-10.0, 80.0}, si_params(0.0, 0.0));
  auto g = BoxGrid::make(1, {1.0}, {3});
  Coupler cp(g, model, 1e-6, 1e-7);
  CoupledData d;  // everything empty
  try {
    cp.prepared(d);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field == "data");
  }
}
