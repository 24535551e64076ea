#include "jps/pennes.hpp"

#include <cmath>

namespace jps {

namespace {

Eigen::VectorXd g_coef(const std::shared_ptr<const BoxGrid>& grid, const SourceFn& g,
                       double t) {
  if (!g) return Eigen::VectorXd::Zero(grid->num_modes());
  Eigen::VectorXd nodes = g(t);
  if (nodes.size() != grid->num_nodes())
    throw GridMismatch("thermal source sampler produced wrong node count");
  return grid->to_spectral(nodes);
}

void check_finite(const ThermalState& s) {
  if (!s.theta.coef().allFinite() || !s.theta_t.coef().allFinite())
    throw NonFiniteState("thermal state became non-finite at t=" + std::to_string(s.t));
}

SpectralField pde_theta_t(const SpectralField& theta, const Eigen::VectorXd& gc,
                          const PennesCoeffs& c) {
  const auto& lam = theta.grid().eigenvalues().array();
  Eigen::VectorXd tt =
      ((-c.kappa * lam - c.ell) * theta.coef().array() + gc.array()).matrix() / c.m;
  return SpectralField(theta.grid_ptr(), std::move(tt));
}

}  // namespace

SpectralField compat_theta1(const SpectralField& theta0, const Eigen::VectorXd& g0_nodes,
                            const PennesCoeffs& c) {
  if (theta0.empty()) throw ConfigError("theta0 missing");
  if (!(c.m > 0) || !(c.kappa > 0) || c.ell < 0)
    throw ConfigError("bioheat coefficients need m > 0, kappa > 0, ell >= 0");
  Eigen::VectorXd gc;
  if (g0_nodes.size() == 0) {
    gc = Eigen::VectorXd::Zero(theta0.grid().num_modes());
  } else {
    if (g0_nodes.size() != theta0.grid().num_nodes())
      throw GridMismatch("g0 sampled on a different node grid");
    gc = theta0.grid().to_spectral(g0_nodes);
  }
  return pde_theta_t(theta0, gc, c);
}

ThermalState pennes_step(const ThermalState& s, const PennesCoeffs& c, const SourceFn& g,
                         double dt) {
  if (!(dt > 0) || !std::isfinite(dt)) throw ConfigError("dt must be finite and > 0");
  if (s.theta.empty()) throw ConfigError("thermal state incomplete");
  if (!(c.m > 0) || !(c.kappa > 0) || c.ell < 0)
    throw ConfigError("bioheat coefficients need m > 0, kappa > 0, ell >= 0");
  const auto grid = s.theta.grid_ptr();
  const auto& lam = grid->eigenvalues().array();

  const Eigen::ArrayXd mu = (c.kappa * lam + c.ell) / c.m;
  const Eigen::ArrayXd decay = (-mu * dt).exp();
  const Eigen::ArrayXd half = (-mu * (0.5 * dt)).exp();
  const Eigen::VectorXd gm = g_coef(grid, g, s.t + 0.5 * dt);

  ThermalState out;
  out.t = s.t + dt;
  Eigen::VectorXd th =
      (decay * s.theta.coef().array() + (dt / c.m) * half * gm.array()).matrix();
  out.theta = SpectralField(grid, std::move(th));
  out.theta_t = pde_theta_t(out.theta, g_coef(grid, g, out.t), c);
  check_finite(out);
  return out;
}

ThermalTrajectory pennes_solve(const ThermalState& initial, const PennesCoeffs& c,
                               const SourceFn& g, double T, double dt,
                               const ThermalSolveOptions& opts) {
  if (!(T > 0) || !std::isfinite(T)) throw ConfigError("T must be finite and > 0");
  if (!(dt > 0) || dt > T * (1 + 1e-12)) throw ConfigError("need 0 < dt <= T");
  if (opts.store_stride < 1 || opts.callback_stride < 1)
    throw ConfigError("strides must be >= 1");
  if (initial.theta.empty()) throw ConfigError("initial theta missing");

  const long nsteps = std::lround(T / dt);
  const double dta = T / static_cast<double>(nsteps);

  ThermalState cur = initial;
  if (cur.theta_t.empty())
    cur.theta_t = compat_theta1(
        cur.theta, g ? Eigen::VectorXd(g(0.0)) : Eigen::VectorXd(), c);
  check_same_grid(cur.theta, cur.theta_t);
  check_finite(cur);

  ThermalTrajectory traj;
  traj.dt = dta;
  traj.states.reserve(static_cast<std::size_t>(nsteps / opts.store_stride) + 2);
  traj.states.push_back(cur);
  if (opts.callback) opts.callback(cur);

  for (long n = 1; n <= nsteps; ++n) {
    cur = pennes_step(cur, c, g, dta);
    cur.t = static_cast<double>(n) * dta;
    if (n % opts.store_stride == 0 || n == nsteps) traj.states.push_back(cur);
    if (opts.callback && (n % opts.callback_stride == 0 || n == nsteps))
      opts.callback(cur);
  }
  return traj;
}

}  // namespace jps
