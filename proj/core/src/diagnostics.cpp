#include "jps/diagnostics.hpp"

#include <cmath>

namespace jps {

namespace {

double weighted_grad_sq(const SpectralField& u, const Eigen::VectorXd& w_nodes) {
  const BoxGrid& g = u.grid();
  double acc = 0;
  for (int a = 0; a < g.dims(); ++a) {
    Eigen::VectorXd du = g.derivative_values(u.coef(), a);
    acc += g.integrate(w_nodes.cwiseProduct(du.cwiseAbs2()));
  }
  return acc;
}

double weighted_lap_sq(const SpectralField& u, const Eigen::VectorXd& w_nodes) {
  const BoxGrid& g = u.grid();
  Eigen::VectorXd lap =
      g.to_physical((-g.eigenvalues().array() * u.coef().array()).matrix());
  return g.integrate(w_nodes.cwiseProduct(lap.cwiseAbs2()));
}

// Second-order finite differences along one axis of the node-grid tensor
// (centered inside, one-sided at the walls).
Eigen::VectorXd axis_fd(const Eigen::VectorXd& v, const std::array<Eigen::Index, 3>& shape,
                        int axis, double h) {
  Eigen::VectorXd out(v.size());
  Eigen::Index outer = 1, inner = 1;
  for (int a = 0; a < axis; ++a) outer *= shape[a];
  for (int a = axis + 1; a < 3; ++a) inner *= shape[a];
  const Eigen::Index n = shape[axis];
  for (Eigen::Index o = 0; o < outer; ++o)
    for (Eigen::Index i = 0; i < inner; ++i) {
      const Eigen::Index base = o * n * inner + i;
      auto at = [&](Eigen::Index j) { return v(base + j * inner); };
      out(base) = (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h);
      for (Eigen::Index j = 1; j + 1 < n; ++j)
        out(base + j * inner) = (at(j + 1) - at(j - 1)) / (2.0 * h);
      out(base + (n - 1) * inner) =
          (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) / (2.0 * h);
    }
  return out;
}

}  // namespace

double inner_l2(const SpectralField& a, const SpectralField& b) {
  check_same_grid(a, b);
  return a.coef().dot(b.coef());
}

double weighted_grad_inner(const SpectralField& u, const SpectralField& v,
                           const Eigen::VectorXd& w_nodes) {
  check_same_grid(u, v);
  const BoxGrid& g = u.grid();
  if (w_nodes.size() != g.num_nodes()) throw GridMismatch("weight on wrong node grid");
  double acc = 0;
  for (int a = 0; a < g.dims(); ++a) {
    Eigen::VectorXd du = g.derivative_values(u.coef(), a);
    Eigen::VectorXd dv = g.derivative_values(v.coef(), a);
    acc += g.integrate(w_nodes.cwiseProduct(du.cwiseProduct(dv)));
  }
  return acc;
}

EnergyReport acoustic_energies(const AcousticState& s, double tau,
                               const Eigen::VectorXd& r_nodes,
                               const Eigen::VectorXd& b_nodes) {
  if (s.p.empty() || s.pt.empty() || s.ptt.empty())
    throw GridMismatch("energies need a complete acoustic state");
  const BoxGrid& g = s.p.grid();
  if (r_nodes.size() != g.num_nodes() || b_nodes.size() != g.num_nodes())
    throw GridMismatch("coefficient samples on wrong node grid");
  if (r_nodes.minCoeff() < 0 || b_nodes.minCoeff() < 0)
    throw NegativeWeight("energy weights must be nonnegative");

  EnergyReport rep;
  rep.t = s.t;
  const double pt_sq = s.pt.coef().squaredNorm();
  const double ptt_sq = s.ptt.coef().squaredNorm();
  const double r_grad_p = weighted_grad_sq(s.p, r_nodes);
  const double b_grad_pt = weighted_grad_sq(s.pt, b_nodes);
  rep.E0 = 0.5 * (pt_sq + r_grad_p);
  rep.E1 = 0.5 * (tau * ptt_sq + b_grad_pt);
  rep.D0 = b_grad_pt + ptt_sq;
  const double grad_ptt_sq = std::pow(seminorm(s.ptt, 1), 2);
  rep.E = 0.5 * (weighted_lap_sq(s.p, b_nodes) + weighted_lap_sq(s.pt, b_nodes) +
                 tau * grad_ptt_sq);
  rep.D = weighted_lap_sq(s.p, r_nodes) + grad_ptt_sq;
  if (!std::isfinite(rep.E0) || !std::isfinite(rep.E1) || !std::isfinite(rep.E) ||
      !std::isfinite(rep.D0) || !std::isfinite(rep.D))
    throw NonFiniteState("energy evaluation non-finite");
  return rep;
}

MonitorSample coefficient_monitors(const CoefficientTrack& track, const BoxGrid& grid,
                                   double t, double fd_delta, double t_lo, double t_hi) {
  if (!(fd_delta > 0)) throw ConfigError("monitor stencil spacing must be > 0");
  Eigen::VectorXd r0, b0, ra, ba, rb, bb;
  track.sample(grid, t, r0, b0);

  // Time-derivative stencil: centered when both neighbours fit in
  // [t_lo, t_hi], second-order one-sided otherwise.
  Eigen::VectorXd rt, bt;
  const double eps = 1e-12 * std::max(1.0, std::abs(t_hi));
  if (t - fd_delta >= t_lo - eps && t + fd_delta <= t_hi + eps) {
    track.sample(grid, t - fd_delta, ra, ba);
    track.sample(grid, t + fd_delta, rb, bb);
    rt = (rb - ra) / (2.0 * fd_delta);
    bt = (bb - ba) / (2.0 * fd_delta);
  } else {
    const double sgn = (t - fd_delta < t_lo - eps) ? 1.0 : -1.0;
    if (t + sgn * 2 * fd_delta > t_hi + eps || t + sgn * 2 * fd_delta < t_lo - eps) {
      // interval shorter than the stencil: two-point difference
      track.sample(grid, t + sgn * fd_delta, ra, ba);
      rt = sgn * (ra - r0) / fd_delta;
      bt = sgn * (ba - b0) / fd_delta;
    } else {
      track.sample(grid, t + sgn * fd_delta, ra, ba);
      track.sample(grid, t + sgn * 2 * fd_delta, rb, bb);
      rt = sgn * (-3.0 * r0 + 4.0 * ra - rb) / (2.0 * fd_delta);
      bt = sgn * (-3.0 * b0 + 4.0 * ba - bb) / (2.0 * fd_delta);
    }
  }

  MonitorSample ms;
  ms.rt_inf = rt.cwiseAbs().maxCoeff();
  ms.bt_inf = bt.cwiseAbs().maxCoeff();

  if (track.uniform_in_space()) {
    ms.grad_r_inf = ms.grad_b_inf = 0.0;
  } else if (track.has_gradients()) {
    for (int a = 0; a < grid.dims(); ++a) {
      Eigen::VectorXd dr, db;
      track.sample_gradient(grid, t, a, dr, db);
      ms.grad_r_inf = std::max(ms.grad_r_inf, dr.cwiseAbs().maxCoeff());
      ms.grad_b_inf = std::max(ms.grad_b_inf, db.cwiseAbs().maxCoeff());
    }
  } else {
    std::array<Eigen::Index, 3> shape{grid.nodes(0), grid.dims() > 1 ? grid.nodes(1) : 1,
                                      grid.dims() > 2 ? grid.nodes(2) : 1};
    for (int a = 0; a < grid.dims(); ++a) {
      const double h = grid.length(a) / (grid.quad_interior(a) + 1);
      ms.grad_r_inf = std::max(ms.grad_r_inf, axis_fd(r0, shape, a, h).cwiseAbs().maxCoeff());
      ms.grad_b_inf = std::max(ms.grad_b_inf, axis_fd(b0, shape, a, h).cwiseAbs().maxCoeff());
    }
  }

  ms.lambda0 = 1.0 + ms.rt_inf + ms.rt_inf * ms.rt_inf + ms.bt_inf +
               ms.grad_b_inf * ms.grad_b_inf + ms.grad_r_inf * ms.grad_r_inf;
  ms.lambda = 1.0 + ms.bt_inf + ms.bt_inf * ms.bt_inf + ms.rt_inf * ms.rt_inf;
  return ms;
}

std::vector<double> gronwall_envelope(double u0, const std::vector<double>& a,
                                      const std::vector<double>& b, double dt) {
  if (a.size() != b.size() || a.empty()) throw ConfigError("envelope inputs mismatched");
  if (!(dt > 0)) throw ConfigError("envelope mesh spacing must be > 0");
  if (u0 < 0) throw ConfigError("envelope initial value must be >= 0");
  for (double ai : a)
    if (ai < 0 || !std::isfinite(ai)) throw NegativeA("envelope rate must be >= 0");
  for (double bi : b)
    if (bi < 0 || !std::isfinite(bi))
      throw NegativeWeight("envelope source must be >= 0");

  // Recursive trapezoid form, stable for large exponents:
  //   env_n = env_{n-1} e^{dA} + dt/2 (b_{n-1} e^{dA} + b_n),
  //   dA = dt/2 (a_{n-1} + a_n).
  std::vector<double> env(a.size());
  env[0] = u0;
  for (std::size_t n = 1; n < a.size(); ++n) {
    const double dA = 0.5 * dt * (a[n - 1] + a[n]);
    const double grow = std::exp(dA);
    env[n] = env[n - 1] * grow + 0.5 * dt * (b[n - 1] * grow + b[n]);
  }
  return env;
}

ThermalRegularity thermal_regularity(const ThermalTrajectory& traj, const PennesCoeffs& c,
                                     const SourceFn& g) {
  if (traj.states.size() < 3) throw MeshMismatch("thermal regularity needs >= 3 samples");
  const auto grid = traj.states.front().theta.grid_ptr();
  const double dt = traj.dt;
  const std::size_t n = traj.states.size();

  auto gc = [&](std::size_t i) -> Eigen::VectorXd {
    if (!g) return Eigen::VectorXd::Zero(grid->num_modes());
    return grid->to_spectral(g(traj.states[i].t));
  };

  std::vector<Eigen::VectorXd> gcoef(n);
  for (std::size_t i = 0; i < n; ++i) gcoef[i] = gc(i);

  auto gt = [&](std::size_t i) -> Eigen::VectorXd {
    if (i == 0) return (-3.0 * gcoef[0] + 4.0 * gcoef[1] - gcoef[2]) / (2.0 * dt);
    if (i + 1 == n)
      return (3.0 * gcoef[n - 1] - 4.0 * gcoef[n - 2] + gcoef[n - 3]) / (2.0 * dt);
    return (gcoef[i + 1] - gcoef[i - 1]) / (2.0 * dt);
  };

  ThermalRegularity R;
  const auto& lam = grid->eigenvalues().array();
  double int_h3 = 0, int_h2t = 0, int_tt = 0, int_src = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& st = traj.states[i];
    const double w = (i == 0 || i + 1 == n) ? 0.5 * dt : dt;

    const double h3 = sobolev_norm(st.theta, 3);
    const double h2 = sobolev_norm(st.theta, 2);
    const double h1t = sobolev_norm(st.theta_t, 1);
    const double h2t = sobolev_norm(st.theta_t, 2);
    int_h3 += w * h3 * h3;
    int_h2t += w * h2t * h2t;
    R.linf_h2 = std::max(R.linf_h2, h2 * h2);
    R.linf_h1_t = std::max(R.linf_h1_t, h1t * h1t);

    const Eigen::VectorXd gti = gt(i);
    const Eigen::VectorXd tt =
        (((-c.kappa * lam - c.ell) * st.theta_t.coef().array() + gti.array()) / c.m)
            .matrix();
    int_tt += w * tt.squaredNorm();

    const double g_l2_sq = gcoef[i].squaredNorm();
    const double g_h1_semi_sq = (lam * gcoef[i].array().square()).sum();
    int_src += w * (2.0 * g_l2_sq + gti.squaredNorm() + g_h1_semi_sq);
  }
  R.l2_h3 = int_h3;
  R.l2_h2_t = int_h2t;
  R.l2_l2_tt = int_tt;
  R.lhs_total = R.l2_h3 + R.linf_h2 + R.linf_h1_t + R.l2_h2_t + R.l2_l2_tt;

  const double th0_h3 = sobolev_norm(traj.states.front().theta, 3);
  const double grad_g0_sq = (lam * gcoef[0].array().square()).sum();
  R.rhs_bracket = th0_h3 * th0_h3 + grad_g0_sq + int_src;
  return R;
}

}  // namespace jps
