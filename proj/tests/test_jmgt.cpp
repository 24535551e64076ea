#include "doctest.h"

#include <cmath>
#include <vector>

#include "jps/errors.hpp"
#include "jps/jmgt.hpp"
#include "jps/reference.hpp"
#include "jps/spectral.hpp"

using namespace jps;

namespace {
constexpr double kPi = 3.14159265358979323846;

// Relative error of the (p, pt, ptt) triple with phase weights (1, 1/w, 1/w^2)
// so every component carries comparable magnitude for an oscillation rate w.
double triple_error(const AcousticState& got, double p, double pt, double ptt,
                    double w) {
  const double d0 = got.p.coef()[0] - p;
  const double d1 = (got.pt.coef()[0] - pt) / w;
  const double d2 = (got.ptt.coef()[0] - ptt) / (w * w);
  const double n0 = p, n1 = pt / w, n2 = ptt / (w * w);
  return std::sqrt(d0 * d0 + d1 * d1 + d2 * d2) /
         std::sqrt(n0 * n0 + n1 * n1 + n2 * n2);
}

AcousticState single_mode_state(const std::shared_ptr<const BoxGrid>& g, double p0,
                                double p1, double p2) {
  AcousticState s;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(g->num_modes());
  c[0] = p0;
  s.p = SpectralField(g, c);
  c[0] = p1;
  s.pt = SpectralField(g, c);
  c[0] = p2;
  s.ptt = SpectralField(g, c);
  return s;
}

SourceFn zero_source(const std::shared_ptr<const BoxGrid>& g) {
  const Eigen::Index n = g->num_nodes();
  return [n](double) { return Eigen::VectorXd::Zero(n).eval(); };
}
}  // namespace

TEST_CASE("constant-coefficient single mode tracks the root-superposition oracle") {
  const double tau = 1e-6, r = 2.25e6, b = 2.25, T = 1e-3;
  auto g = BoxGrid::make(1, {1.0}, {1});
  const double lam = g->eigenvalues()[0];
  CHECK(lam == doctest::Approx(kPi * kPi).epsilon(1e-14));

  const auto track = CoefficientTrack::constants(r, b);
  const double p2 = -r * lam;  // zero initial third derivative
  const auto roots = mgt_characteristic_roots(tau, r, b, lam);
  const auto ref = mgt_mode_solution(roots, 1.0, 0.0, p2, T);
  const double w = std::sqrt(r * lam);

  SUBCASE("accuracy at a fixed step") {
    const auto traj = jmgt_solve(single_mode_state(g, 1.0, 0.0, p2), tau, track,
                                 zero_source(g), T, T / 1024);
    CHECK(triple_error(traj.back(), ref[0], ref[1], ref[2], w) <= 2e-5);
  }

  SUBCASE("second-order self convergence") {
    std::vector<double> errs;
    for (double div : {128.0, 256.0, 512.0}) {
      const auto traj = jmgt_solve(single_mode_state(g, 1.0, 0.0, p2), tau, track,
                                   zero_source(g), T, T / div);
      errs.push_back(triple_error(traj.back(), ref[0], ref[1], ref[2], w));
    }
    for (std::size_t i = 1; i < errs.size(); ++i) {
      const double order = std::log2(errs[i - 1] / errs[i]);
      CHECK(order == doctest::Approx(2.0).epsilon(0.15));
    }
  }
}

TEST_CASE("manufactured solution with time-varying uniform coefficients") {
  // p(x,t) = cos(w t) sin(pi x) under r(t) = 4 + t, b(t) = 1 + t/2.
  const double tau = 0.01, w = 3.0, T = 1.0;
  auto g = BoxGrid::make(1, {1.0}, {4});
  const double pi2 = kPi * kPi;

  const auto track = CoefficientTrack::uniform(
      [](double t) { return std::array<double, 2>{4.0 + t, 1.0 + 0.5 * t}; },
      {4.0, 5.0, 1.0, 1.5});

  Eigen::VectorXd shape(g->num_nodes());
  for (int j = 0; j < g->nodes(0); ++j) shape[j] = std::sin(kPi * g->node_coord(0, j));
  const SourceFn f = [=](double t) {
    const double s = tau * w * w * w * std::sin(w * t) - w * w * std::cos(w * t) +
                     (4.0 + t) * pi2 * std::cos(w * t) -
                     (1.0 + 0.5 * t) * pi2 * w * std::sin(w * t);
    return (s * shape).eval();
  };

  const double a0 = 1.0 / std::sqrt(2.0);  // coefficient of the orthonormal mode
  std::vector<double> errs;
  for (double div : {256.0, 512.0, 1024.0}) {
    AcousticState init = single_mode_state(g, a0, 0.0, -w * w * a0);
    const auto traj = jmgt_solve(init, tau, track, f, T, T / div);
    const double exact = a0 * std::cos(w * T);
    Eigen::VectorXd want = Eigen::VectorXd::Zero(g->num_modes());
    want[0] = exact;
    errs.push_back((traj.back().p.coef() - want).norm() / std::abs(exact));
  }
  CHECK(errs.back() <= 1e-4);
  for (std::size_t i = 1; i < errs.size(); ++i)
    CHECK(std::log2(errs[i - 1] / errs[i]) == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("manufactured solution with space-varying coefficients") {
  // Same target under r(x) = 4 + x; exercises the iterative implicit solve.
  const double tau = 0.01, w = 3.0, T = 0.5;
  auto g = BoxGrid::make(1, {1.0}, {4});
  const double pi2 = kPi * kPi;

  Eigen::VectorXd xs(g->num_nodes());
  for (int j = 0; j < g->nodes(0); ++j) xs[j] = g->node_coord(0, j);
  const auto track = CoefficientTrack::varying(
      [xs](double, Eigen::VectorXd& r, Eigen::VectorXd& b) {
        r = (4.0 + xs.array()).matrix();
        b.setConstant(1.0);
      },
      {4.0, 5.0, 1.0, 1.0});

  Eigen::VectorXd shape(g->num_nodes());
  for (int j = 0; j < g->nodes(0); ++j) shape[j] = std::sin(kPi * xs[j]);
  const SourceFn f = [=](double t) {
    Eigen::VectorXd out(shape.size());
    const double common = tau * w * w * w * std::sin(w * t) - w * w * std::cos(w * t) -
                          pi2 * w * std::sin(w * t);
    for (Eigen::Index j = 0; j < shape.size(); ++j)
      out[j] = (common + (4.0 + xs[j]) * pi2 * std::cos(w * t)) * shape[j];
    return out;
  };

  const double a0 = 1.0 / std::sqrt(2.0);
  std::vector<double> errs;
  for (double div : {128.0, 256.0, 512.0}) {
    AcousticState init = single_mode_state(g, a0, 0.0, -w * w * a0);
    const auto traj = jmgt_solve(init, tau, track, f, T, T / div);
    Eigen::VectorXd want = Eigen::VectorXd::Zero(g->num_modes());
    want[0] = a0 * std::cos(w * T);
    errs.push_back((traj.back().p.coef() - want).norm() / std::abs(want[0]));
  }
  CHECK(errs.back() <= 1e-4);
  for (std::size_t i = 1; i < errs.size(); ++i)
    CHECK(std::log2(errs[i - 1] / errs[i]) == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("reduced model (tau = 0) matches the damped-oscillator solution") {
  const double r = 4.0, b = 0.5, T = 1.0;
  auto g = BoxGrid::make(1, {1.0}, {1});
  const double lam = g->eigenvalues()[0];
  const auto track = CoefficientTrack::constants(r, b);

  // s^2 + b lam s + r lam = 0, underdamped.
  const double sig = -0.5 * b * lam;
  const double wd = std::sqrt(r * lam - sig * sig);
  const double B = -sig / wd;
  const double pT = std::exp(sig * T) * (std::cos(wd * T) + B * std::sin(wd * T));
  const double ptT =
      std::exp(sig * T) * ((sig * B - wd) * std::sin(wd * T) +
                           (sig + wd * B) * std::cos(wd * T));
  CHECK(sig + wd * B == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));

  AcousticState init = single_mode_state(g, 1.0, 0.0, -r * lam);
  const auto traj = jmgt_solve(init, 0.0, track, zero_source(g), T, T / 2048);
  CHECK(traj.back().p.coef()[0] == doctest::Approx(pT).epsilon(1e-5));
  CHECK(traj.back().pt.coef()[0] == doctest::Approx(ptT).epsilon(1e-4).scale(1.0));

  // ptt of the reduced branch is the value implied by the equation.
  const double implied = -r * lam * traj.back().p.coef()[0] -
                         b * lam * traj.back().pt.coef()[0];
  CHECK(traj.back().ptt.coef()[0] == doctest::Approx(implied).epsilon(1e-12));
}

TEST_CASE("consistent second derivative closes the equation at t = 0") {
  auto g = BoxGrid::make(1, {1.0}, {3});
  const auto track = CoefficientTrack::constants(2.0, 0.5);
  Eigen::VectorXd c0 = Eigen::VectorXd::Zero(3), c1 = Eigen::VectorXd::Zero(3);
  c0[0] = 1.0;
  c1[2] = 0.25;
  SpectralField p0(g, c0), p1(g, c1);
  const SpectralField p2 = consistent_p2(p0, p1, track, zero_source(g));
  const auto& lam = g->eigenvalues();
  CHECK(p2.coef()[0] == doctest::Approx(-2.0 * lam[0]).epsilon(1e-13));
  CHECK(p2.coef()[2] == doctest::Approx(-0.5 * lam[2] * 0.25).epsilon(1e-13));
}

TEST_CASE("track floors are enforced on every sample") {
  auto g = BoxGrid::make(1, {1.0}, {2});
  const auto track = CoefficientTrack::varying(
      [](double, Eigen::VectorXd& r, Eigen::VectorXd& b) {
        r.setConstant(0.5);  // below the promised floor
        b.setConstant(1.0);
      },
      {1.0, 2.0, 1.0, 1.0});
  Eigen::VectorXd r(g->num_nodes()), b(g->num_nodes());
  CHECK_THROWS_AS(track.sample(*g, 0.0, r, b), CoefficientFloorViolated);
}

TEST_CASE("non-finite forcing is detected") {
  auto g = BoxGrid::make(1, {1.0}, {2});
  const auto track = CoefficientTrack::constants(1.0, 1.0);
  const SourceFn bad = [g](double) {
    return Eigen::VectorXd::Constant(g->num_nodes(),
                                     std::numeric_limits<double>::quiet_NaN())
        .eval();
  };
  AcousticState init = single_mode_state(g, 1.0, 0.0, 0.0);
  // The first mode of a 2-mode grid; fill remaining fields to match.
  CHECK_THROWS_AS(jmgt_solve(init, 1e-2, track, bad, 0.1, 0.01), NonFiniteState);
}

TEST_CASE("trajectory stride keeps the initial and final states") {
  auto g = BoxGrid::make(1, {1.0}, {1});
  const auto track = CoefficientTrack::constants(1.0, 1.0);
  SolveOptions opts;
  opts.store_stride = 7;
  int calls = 0;
  opts.callback = [&calls](const AcousticState&) { ++calls; };
  opts.callback_stride = 10;
  const auto traj = jmgt_solve(single_mode_state(g, 1.0, 0.0, 0.0), 1e-2, track,
                               zero_source(g), 1.0, 0.01, opts);
  CHECK(traj.states.size() == 16);  // n = 0, 7, ..., 98 plus the final n = 100
  CHECK(traj.states.front().t == 0.0);
  CHECK(traj.states.back().t == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(calls == 11);  // n = 0, 10, ..., 100
}

TEST_CASE("step count rounds and the mesh is adjusted to land on T") {
  auto g = BoxGrid::make(1, {1.0}, {1});
  const auto track = CoefficientTrack::constants(1.0, 1.0);
  const auto traj = jmgt_solve(single_mode_state(g, 1.0, 0.0, 0.0), 1e-2, track,
                               zero_source(g), 1.0, 0.3);
  CHECK(traj.states.size() == 4);  // 3 steps of 1/3
  CHECK(traj.dt == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(traj.back().t == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("identical runs are bit identical") {
  auto g = BoxGrid::make(1, {1.0}, {3});
  const auto track = CoefficientTrack::constants(2.0, 0.25);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(3);
  c[0] = 1.0;
  c[1] = -0.5;
  AcousticState init;
  init.p = SpectralField(g, c);
  init.pt = SpectralField(g, Eigen::VectorXd::Zero(3));
  init.ptt = consistent_p2(init.p, init.pt, track, zero_source(g));

  const auto a = jmgt_solve(init, 1e-3, track, zero_source(g), 0.1, 1e-3);
  const auto b = jmgt_solve(init, 1e-3, track, zero_source(g), 0.1, 1e-3);
  for (Eigen::Index i = 0; i < 3; ++i) {
    CHECK(a.back().p.coef()[i] == b.back().p.coef()[i]);
    CHECK(a.back().pt.coef()[i] == b.back().pt.coef()[i]);
    CHECK(a.back().ptt.coef()[i] == b.back().ptt.coef()[i]);
  }
}
