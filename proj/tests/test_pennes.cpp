#include "doctest.h"

#include <cmath>

#include "jps/errors.hpp"
#include "jps/model.hpp"
#include "jps/pennes.hpp"
#include "jps/reference.hpp"
#include "jps/spectral.hpp"

using namespace jps;

namespace {
ThermalState mode_state(const std::shared_ptr<const BoxGrid>& g, int mode,
                        double amp, const PennesCoeffs& c) {
  Eigen::VectorXd coef = Eigen::VectorXd::Zero(g->num_modes());
  coef[mode] = amp;
  ThermalState s;
  s.theta = SpectralField(g, coef);
  s.theta_t = compat_theta1(s.theta, Eigen::VectorXd(), c);
  return s;
}

SourceFn zero_source(const std::shared_ptr<const BoxGrid>& g) {
  const Eigen::Index n = g->num_nodes();
  return [n](double) { return Eigen::VectorXd::Zero(n).eval(); };
}
}  // namespace

TEST_CASE("unforced decay is exact at any step size") {
  const PennesCoeffs c = PennesCoeffs::from(PhysicalParams{});
  auto g = BoxGrid::make(1, {1.0}, {4});
  const double T = 1.0;

  for (double dt : {1e-1, 1e-3}) {
    const auto traj = pennes_solve(mode_state(g, 2, 3.0, c), c, zero_source(g), T, dt);
    const double mu = c.mu(g->eigenvalues()[2]);
    const double want = 3.0 * std::exp(-mu * T);
    CHECK(std::abs(traj.back().theta.coef()[2] - want) <= 1e-12 * std::abs(want));
    // Cross-check against the closed-form mode solution.
    const double oracle =
        pennes_mode_solution(c.m, c.kappa, c.ell, g->eigenvalues()[2], 3.0, 0.0, T);
    CHECK(traj.back().theta.coef()[2] == doctest::Approx(oracle).epsilon(1e-12));
  }
}

TEST_CASE("every mode decays at its own exact rate") {
  const PennesCoeffs c{2.0, 0.3, 0.7};
  auto g = BoxGrid::make(1, {1.0}, {5});
  Eigen::VectorXd coef(5);
  coef << 1.0, -0.5, 0.25, 0.0, 2.0;
  ThermalState init;
  init.theta = SpectralField(g, coef);
  init.theta_t = compat_theta1(init.theta, Eigen::VectorXd(), c);

  const auto traj = pennes_solve(init, c, zero_source(g), 2.0, 0.05);
  for (int k = 0; k < 5; ++k) {
    const double want = coef[k] * std::exp(-c.mu(g->eigenvalues()[k]) * 2.0);
    CHECK(traj.back().theta.coef()[k] ==
          doctest::Approx(want).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("compatibility value closes the equation at t = 0") {
  const PennesCoeffs c{2.0, 0.3, 0.7};
  auto g = BoxGrid::make(1, {1.0}, {3});
  Eigen::VectorXd coef = Eigen::VectorXd::Zero(3);
  coef[0] = 2.0;
  SpectralField theta0(g, coef);
  const double lam = g->eigenvalues()[0];

  const SpectralField v0 = compat_theta1(theta0, Eigen::VectorXd(), c);
  CHECK(v0.coef()[0] ==
        doctest::Approx((-c.kappa * lam - c.ell) * 2.0 / c.m).epsilon(1e-13));

  // A forcing sample shifts the initial rate by g_k / m.
  Eigen::VectorXd e0 = Eigen::VectorXd::Zero(3);
  e0[0] = 5.0;
  const Eigen::VectorXd g0 = g->to_physical(e0);
  const SpectralField v1 = compat_theta1(theta0, g0, c);
  CHECK(v1.coef()[0] - v0.coef()[0] == doctest::Approx(5.0 / c.m).epsilon(1e-12));
}

TEST_CASE("constant forcing converges at second order to the exact response") {
  const PennesCoeffs c{1.0, 0.1, 0.3};
  auto g = BoxGrid::make(1, {1.0}, {2});
  const double lam = g->eigenvalues()[0];
  const double T = 1.0;

  Eigen::VectorXd e0 = Eigen::VectorXd::Zero(2);
  e0[0] = 1.0;
  const Eigen::VectorXd shape = g->to_physical(e0);
  const SourceFn gsrc = [shape](double) { return shape; };

  std::vector<double> errs;
  for (double dt : {0.01, 0.005, 0.0025}) {
    ThermalState init;
    init.theta = SpectralField(g, Eigen::VectorXd::Zero(2));
    init.theta_t = compat_theta1(init.theta, shape, c);
    const auto traj = pennes_solve(init, c, gsrc, T, dt);
    const double want = pennes_mode_solution(c.m, c.kappa, c.ell, lam, 0.0, 1.0, T);
    errs.push_back(std::abs(traj.back().theta.coef()[0] - want) / std::abs(want));
  }
  CHECK(errs.back() <= 1e-6);
  for (std::size_t i = 1; i < errs.size(); ++i)
    CHECK(std::log2(errs[i - 1] / errs[i]) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("time-varying forcing keeps second-order self convergence") {
  const PennesCoeffs c{1.0, 0.05, 0.2};
  auto g = BoxGrid::make(1, {1.0}, {2});
  Eigen::VectorXd e0 = Eigen::VectorXd::Zero(2);
  e0[0] = 1.0;
  const Eigen::VectorXd shape = g->to_physical(e0);
  const SourceFn gsrc = [shape](double t) { return (std::cos(2.0 * t) * shape).eval(); };

  std::vector<double> finals;
  for (double dt : {0.02, 0.01, 0.005}) {
    ThermalState init;
    init.theta = SpectralField(g, Eigen::VectorXd::Zero(2));
    init.theta_t = compat_theta1(init.theta, gsrc(0.0), c);
    finals.push_back(pennes_solve(init, c, gsrc, 1.0, dt).back().theta.coef()[0]);
  }
  const double e1 = std::abs(finals[0] - finals[2]);
  const double e2 = std::abs(finals[1] - finals[2]);
  CHECK(std::log2(e1 / e2) == doctest::Approx(2.0).epsilon(0.35));  // Richardson proxy
}

TEST_CASE("theta_t is the equation value at the new time") {
  const PennesCoeffs c{1.0, 0.1, 0.3};
  auto g = BoxGrid::make(1, {1.0}, {2});
  Eigen::VectorXd e0 = Eigen::VectorXd::Zero(2);
  e0[0] = 1.0;
  const Eigen::VectorXd shape = g->to_physical(e0);
  const SourceFn gsrc = [shape](double t) { return ((1.0 + t) * shape).eval(); };

  ThermalState init;
  Eigen::VectorXd coef = Eigen::VectorXd::Zero(2);
  coef[0] = 0.4;
  init.theta = SpectralField(g, coef);
  init.theta_t = compat_theta1(init.theta, gsrc(0.0), c);

  const ThermalState next = pennes_step(init, c, gsrc, 0.1);
  const double lam = g->eigenvalues()[0];
  const double want =
      (-c.kappa * lam * next.theta.coef()[0] - c.ell * next.theta.coef()[0] + 1.1) /
      c.m;
  CHECK(next.theta_t.coef()[0] == doctest::Approx(want).epsilon(1e-13));
  CHECK(next.t == doctest::Approx(0.1).epsilon(1e-15));
}

TEST_CASE("mesh adjustment and stride bookkeeping") {
  const PennesCoeffs c{1.0, 0.1, 0.3};
  auto g = BoxGrid::make(1, {1.0}, {2});
  ThermalSolveOptions opts;
  opts.store_stride = 4;
  const auto traj =
      pennes_solve(mode_state(g, 0, 1.0, c), c, zero_source(g), 1.0, 0.1, opts);
  CHECK(traj.states.size() == 4);  // n = 0, 4, 8, 10
  CHECK(traj.back().t == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("identical runs are bit identical") {
  const PennesCoeffs c = PennesCoeffs::from(PhysicalParams{});
  auto g = BoxGrid::make(1, {1.0}, {3});
  const auto a = pennes_solve(mode_state(g, 1, 0.5, c), c, zero_source(g), 1.0, 0.01);
  const auto b = pennes_solve(mode_state(g, 1, 0.5, c), c, zero_source(g), 1.0, 0.01);
  for (Eigen::Index i = 0; i < 3; ++i)
    CHECK(a.back().theta.coef()[i] == b.back().theta.coef()[i]);
}
