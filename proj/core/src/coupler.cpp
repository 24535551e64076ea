#include "jps/coupler.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace jps {

namespace {

double sq(double x) { return x * x; }

// Combined state norm square driving the fixed-point stopping rule.
double ystate_sq(const AcousticState& a, const ThermalState& th) {
  return sq(sobolev_norm(a.p, 1)) + sq(sobolev_norm(a.pt, 1)) + sq(seminorm(a.ptt, 0)) +
         sq(sobolev_norm(th.theta, 2)) + sq(sobolev_norm(th.theta_t, 1));
}

void check_aligned(const CoupledTrajectory& t) {
  if (t.ac.states.empty() || t.ac.states.size() != t.th.states.size())
    throw MeshMismatch("acoustic and thermal trajectories are not aligned");
  if (t.ac.dt != t.th.dt) throw MeshMismatch("acoustic and thermal dt differ");
}

void check_same_mesh(const CoupledTrajectory& a, const CoupledTrajectory& b) {
  check_aligned(a);
  check_aligned(b);
  if (a.ac.states.size() != b.ac.states.size())
    throw MeshMismatch("trajectories store a different number of states");
  double scale = std::max(std::abs(a.ac.dt), std::abs(b.ac.dt));
  if (std::abs(a.ac.dt - b.ac.dt) > 1e-12 * scale)
    throw MeshMismatch("trajectories use different time steps");
  if (a.ac.front().p.grid() != b.ac.front().p.grid())
    throw MeshMismatch("trajectories live on different grids");
}

// Index/weight of the linear interpolant on the stored mesh.
std::pair<Eigen::Index, double> locate(double t, double dt, Eigen::Index nstates) {
  double s = t / dt;
  auto i = static_cast<Eigen::Index>(std::floor(s));
  if (i < 0) i = 0;
  if (i > nstates - 2) i = nstates - 2;
  double w = s - static_cast<double>(i);
  w = std::clamp(w, 0.0, 1.0);
  return {i, w};
}

double trapezoid_weight(std::size_t i, std::size_t n, double dt) {
  return (i == 0 || i + 1 == n) ? 0.5 * dt : dt;
}

}  // namespace

double BallSpec::degeneracy_predictor(double k1, int dims) const {
  double d4 = static_cast<double>(dims) / 4.0;
  return 1.0 - 2.0 * k1 * std::pow(eta, 1.0 - d4) * std::pow(R1, d4);
}

void BallSpec::validate(double k1, int dims) const {
  if (!(eta > 0.0) || !(eta < 1.0))
    throw ConfigError("must lie strictly inside (0, 1)", "ball.eta");
  if (!(R1 >= eta)) throw ConfigError("must be >= ball.eta", "ball.R1");
  if (!(R2 >= 0.0)) throw ConfigError("must be >= 0", "ball.R2");
  double pred = degeneracy_predictor(k1, dims);
  if (!(pred > 0.0)) {
    std::ostringstream os;
    os << "ball radii admit degeneracy: 1 - 2 k1 eta^(1-d/4) R1^(d/4) = " << pred
       << " (k1 = " << k1 << ", d = " << dims << ")";
    throw DegeneracyLost(os.str());
  }
}

double ynorm(const CoupledTrajectory& a) {
  check_aligned(a);
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, ystate_sq(a.ac.states[i], a.th.states[i]));
  return std::sqrt(m);
}

double ynorm_diff(const CoupledTrajectory& a, const CoupledTrajectory& b) {
  check_same_mesh(a, b);
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const AcousticState& x = a.ac.states[i];
    const AcousticState& y = b.ac.states[i];
    AcousticState d{x.t, x.p - y.p, x.pt - y.pt, x.ptt - y.ptt};
    ThermalState e{x.t, a.th.states[i].theta - b.th.states[i].theta,
                   a.th.states[i].theta_t - b.th.states[i].theta_t};
    m = std::max(m, ystate_sq(d, e));
  }
  return std::sqrt(m);
}

CoupledTrajectory subtract(const CoupledTrajectory& a, const CoupledTrajectory& b) {
  check_same_mesh(a, b);
  CoupledTrajectory out;
  out.ac.dt = a.ac.dt;
  out.th.dt = a.th.dt;
  out.ac.states.reserve(a.size());
  out.th.states.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const AcousticState& x = a.ac.states[i];
    const AcousticState& y = b.ac.states[i];
    out.ac.states.push_back({x.t, x.p - y.p, x.pt - y.pt, x.ptt - y.ptt});
    out.th.states.push_back({x.t, a.th.states[i].theta - b.th.states[i].theta,
                             a.th.states[i].theta_t - b.th.states[i].theta_t});
  }
  return out;
}

double xnorm_p1(const CoupledTrajectory& a, double tau) {
  check_aligned(a);
  double sp = 0, spt = 0, sptt = 0;
  for (const AcousticState& s : a.ac.states) {
    sp = std::max(sp, sq(sobolev_norm(s.p, 1)));
    spt = std::max(spt, sq(sobolev_norm(s.pt, 1)));
    sptt = std::max(sptt, sq(seminorm(s.ptt, 0)));
  }
  return std::sqrt(sp + spt + tau * sptt);
}

double xnorm_p2(const CoupledTrajectory& a, double tau) {
  check_aligned(a);
  double sp = 0, spt = 0, sptt = 0;
  for (const AcousticState& s : a.ac.states) {
    sp = std::max(sp, sq(sobolev_norm(s.p, 2)));
    spt = std::max(spt, sq(sobolev_norm(s.pt, 2)));
    sptt = std::max(sptt, sq(sobolev_norm(s.ptt, 1)));
  }
  return std::sqrt(sp + spt + tau * sptt);
}

double xnorm_theta2(const CoupledTrajectory& a) {
  check_aligned(a);
  const std::size_t n = a.th.states.size();
  double l2h3 = 0, supt = 0, l2h2t = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const ThermalState& s = a.th.states[i];
    double w = trapezoid_weight(i, n, a.th.dt);
    l2h3 += w * sq(sobolev_norm(s.theta, 3));
    supt = std::max(supt, sq(sobolev_norm(s.theta_t, 1)));
    l2h2t += w * sq(sobolev_norm(s.theta_t, 2));
  }
  return std::sqrt(l2h3 + supt + l2h2t);
}

Coupler::Coupler(std::shared_ptr<const BoxGrid> grid, const CoefficientModel& model,
                 double T, double dt)
    : grid_(std::move(grid)), model_(&model) {
  if (!grid_) throw ConfigError("grid must not be null", "grid");
  if (!(T > 0.0) || !std::isfinite(T)) throw ConfigError("must be positive", "solve.T");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("must be positive", "solve.dt");
  nsteps_ = std::llround(T / dt);
  if (nsteps_ < 1) nsteps_ = 1;
  dt_ = T / static_cast<double>(nsteps_);
  T_ = T;
}

CoupledData Coupler::prepared(const CoupledData& data) const {
  if (data.p0.empty() || data.p1.empty() || data.theta0.empty())
    throw ConfigError("initial data requires p0, p1 and theta0", "data");
  for (const SpectralField* f : {&data.p0, &data.p1, &data.theta0})
    if (f->grid() != *grid_) throw GridMismatch("initial data lives on a different grid");
  CoupledData out = data;
  if (data.p2.empty()) {
    // Second time derivative implied by the full (nonlinear) equation at
    // t = 0:  (1 - 2 k p0) p2 = h Lap p0 + zeta Lap p1 + 2 k p1^2.
    Eigen::VectorXd th = data.theta0.values();
    Eigen::VectorXd p0v = data.p0.values();
    Eigen::VectorXd p1v = data.p1.values();
    Eigen::VectorXd lap0 = laplacian(data.p0).values();
    Eigen::VectorXd lap1 = laplacian(data.p1).values();
    Eigen::VectorXd p2v(th.size());
    for (Eigen::Index j = 0; j < th.size(); ++j) {
      Medium med = model_->eval_medium(th[j]);
      double denom = 1.0 - 2.0 * med.k * p0v[j];
      if (!(denom > 0.0)) {
        std::ostringstream os;
        os << "initial pressure already degenerate: 1 - 2 k(theta0) p0 = " << denom;
        throw DegeneracyLost(os.str());
      }
      p2v[j] =
          (med.h * lap0[j] + med.zeta * lap1[j] + 2.0 * med.k * p1v[j] * p1v[j]) / denom;
    }
    out.p2 = SpectralField(grid_, grid_->to_spectral(p2v));
  } else if (data.p2.grid() != *grid_) {
    throw GridMismatch("initial data lives on a different grid");
  }
  return out;
}

Eigen::VectorXd Coupler::interp_theta_values(const ThermalTrajectory& star,
                                             double t) const {
  auto [i, w] = locate(t, star.dt, static_cast<Eigen::Index>(star.states.size()));
  Eigen::VectorXd coef = (1.0 - w) * star.states[i].theta.coef() +
                         w * star.states[i + 1].theta.coef();
  return grid_->to_physical(coef);
}

SpectralField Coupler::interp_field(const std::vector<AcousticState>& st, double t,
                                    int which) const {
  auto pick = [&](std::size_t i) -> const SpectralField& {
    const AcousticState& s = st[i];
    return which == 0 ? s.p : which == 1 ? s.pt : s.ptt;
  };
  auto [i, w] = locate(t, st[1].t - st[0].t, static_cast<Eigen::Index>(st.size()));
  Eigen::VectorXd coef = (1.0 - w) * pick(i).coef() + w * pick(i + 1).coef();
  return SpectralField(grid_, std::move(coef));
}

CoupledTrajectory Coupler::hold(const CoupledData& data) const {
  CoupledData d = prepared(data);
  PennesCoeffs pc = PennesCoeffs::from(model_->params());
  Eigen::VectorXd th = d.theta0.values();
  Eigen::VectorXd p1v = d.p1.values();
  Eigen::VectorXd g0(th.size());
  for (Eigen::Index j = 0; j < th.size(); ++j)
    g0[j] = model_->eval_medium(th[j]).phi * p1v[j] * p1v[j];
  SpectralField theta1 = compat_theta1(d.theta0, g0, pc);

  CoupledTrajectory out;
  out.ac.dt = out.th.dt = dt_;
  out.ac.states.reserve(nsteps_ + 1);
  out.th.states.reserve(nsteps_ + 1);
  for (long n = 0; n <= nsteps_; ++n) {
    double t = static_cast<double>(n) * dt_;
    out.ac.states.push_back({t, d.p0, d.p1, d.p2});
    out.th.states.push_back({t, d.theta0, theta1});
  }
  return out;
}

CoefficientTrack Coupler::track_from(const ThermalTrajectory& star) const {
  const ThermalTrajectory* s = &star;
  auto sampler = [this, s](double t, Eigen::VectorXd& r, Eigen::VectorXd& b) {
    Eigen::VectorXd th = interp_theta_values(*s, t);
    r.resize(th.size());
    b.resize(th.size());
    for (Eigen::Index j = 0; j < th.size(); ++j) {
      Medium med = model_->eval_medium(th[j]);
      r[j] = med.h;
      b[j] = med.zeta;
    }
  };
  auto gradient = [this, s](double t, int axis, Eigen::VectorXd& dr, Eigen::VectorXd& db) {
    auto [i, w] = locate(t, s->dt, static_cast<Eigen::Index>(s->states.size()));
    Eigen::VectorXd coef = (1.0 - w) * s->states[i].theta.coef() +
                           w * s->states[i + 1].theta.coef();
    Eigen::VectorXd th = grid_->to_physical(coef);
    Eigen::VectorXd dth = grid_->derivative_values(coef, axis);
    dr.resize(th.size());
    db.resize(th.size());
    for (Eigen::Index j = 0; j < th.size(); ++j) {
      dr[j] = model_->dh_dtheta(th[j]) * dth[j];
      db[j] = model_->dzeta_dtheta(th[j]) * dth[j];
    }
  };
  const MediumBounds& mb = model_->bounds();
  CoefficientTrack::Bounds bounds{mb.h_min, mb.h_max, mb.zeta_min, mb.zeta_max};
  return CoefficientTrack::varying(sampler, bounds, gradient);
}

SourceFn Coupler::acoustic_source_from(const CoupledTrajectory& star) const {
  const CoupledTrajectory* s = &star;
  return [this, s](double t) {
    Eigen::VectorXd th = interp_theta_values(s->th, t);
    Eigen::VectorXd pv = interp_field(s->ac.states, t, 0).values();
    Eigen::VectorXd ptv = interp_field(s->ac.states, t, 1).values();
    Eigen::VectorXd pttv = interp_field(s->ac.states, t, 2).values();
    Eigen::VectorXd out(th.size());
    for (Eigen::Index j = 0; j < th.size(); ++j) {
      double k = model_->eval_medium(th[j]).k;
      out[j] = 2.0 * k * (ptv[j] * ptv[j] + pv[j] * pttv[j]);
    }
    return out;
  };
}

SourceFn Coupler::thermal_source_from(const CoupledTrajectory& star) const {
  const CoupledTrajectory* s = &star;
  return [this, s](double t) {
    Eigen::VectorXd th = interp_theta_values(s->th, t);
    Eigen::VectorXd ptv = interp_field(s->ac.states, t, 1).values();
    Eigen::VectorXd out(th.size());
    for (Eigen::Index j = 0; j < th.size(); ++j)
      out[j] = model_->eval_medium(th[j]).phi * ptv[j] * ptv[j];
    return out;
  };
}

CoupledTrajectory Coupler::apply_T(const CoupledTrajectory& star, const CoupledData& data,
                                   const StepControls& ctl) const {
  check_aligned(star);
  if (static_cast<long>(star.size()) != nsteps_ + 1)
    throw MeshMismatch("star iterate does not cover the solve mesh");
  if (std::abs(star.ac.dt - dt_) > 1e-12 * dt_)
    throw MeshMismatch("star iterate uses a different time step");
  if (star.ac.front().p.grid() != *grid_)
    throw MeshMismatch("star iterate lives on a different grid");

  CoupledData d = prepared(data);
  CoefficientTrack track = track_from(star.th);
  SourceFn f = acoustic_source_from(star);
  SourceFn g = thermal_source_from(star);
  PennesCoeffs pc = PennesCoeffs::from(model_->params());
  SpectralField theta1 = compat_theta1(d.theta0, g(0.0), pc);

  SolveOptions aopts;
  aopts.controls = ctl;
  CoupledTrajectory out;
  out.ac = jmgt_solve(AcousticState{0.0, d.p0, d.p1, d.p2}, model_->params().tau, track,
                      f, T_, dt_, aopts);
  out.th = pennes_solve(ThermalState{0.0, d.theta0, theta1}, pc, g, T_, dt_, {});
  return out;
}

std::pair<double, double> Coupler::margin_and_chi(const CoupledTrajectory& traj) const {
  check_aligned(traj);
  double tau = model_->params().tau;
  double margin = std::numeric_limits<double>::infinity();
  double chi = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < traj.size(); ++i) {
    Eigen::VectorXd th = traj.th.states[i].theta.values();
    Eigen::VectorXd pv = traj.ac.states[i].p.values();
    for (Eigen::Index j = 0; j < th.size(); ++j) {
      Medium med = model_->eval_medium(th[j]);
      margin = std::min(margin, 1.0 - 2.0 * med.k * pv[j]);
      chi = std::min(chi, med.zeta - tau * med.h);
    }
  }
  return {margin, chi};
}

std::pair<CoupledTrajectory, IterationReport> Coupler::solve(
    const CoupledData& data0, const FixedPointControls& ctl) const {
  if (!(ctl.tol > 0.0)) throw ConfigError("must be positive", "fixed_point.tol");
  if (ctl.max_iter < 1) throw ConfigError("must be >= 1", "fixed_point.max_iter");
  if (!(ctl.eta0 > 0.0)) throw ConfigError("must be positive", "fixed_point.eta0");

  CoupledData data = prepared(data0);
  double tau = model_->params().tau;

  // Smallness of the acoustic data gates the whole iteration.
  double small_sq = sq(sobolev_norm(data.p0, 1)) + sq(sobolev_norm(data.p1, 1)) +
                    tau * sq(seminorm(data.p2, 0));
  if (small_sq > sq(ctl.eta0)) {
    std::ostringstream os;
    os << "acoustic data too large: sqrt(||p0||_H1^2 + ||p1||_H1^2 + tau ||p2||^2) = "
       << std::sqrt(small_sq) << " > eta0 = " << ctl.eta0;
    throw PreconditionViolated(os.str());
  }

  BallSpec ball = ctl.ball;
  if (ball.eta <= 0.0) {
    // Radii from the data norms; the factor 4 leaves room for the iterates.
    ball.eta = std::max(4.0 * std::sqrt(small_sq), 1e-12);
    double r1_sq = sq(sobolev_norm(data.p0, 2)) + sq(sobolev_norm(data.p1, 2)) +
                   tau * sq(sobolev_norm(data.p2, 1));
    ball.R1 = std::max(4.0 * std::sqrt(r1_sq), ball.eta);
    Eigen::VectorXd th = data.theta0.values();
    Eigen::VectorXd p1v = data.p1.values();
    Eigen::VectorXd g0(th.size());
    for (Eigen::Index j = 0; j < th.size(); ++j)
      g0[j] = model_->eval_medium(th[j]).phi * p1v[j] * p1v[j];
    SpectralField theta1 = compat_theta1(data.theta0, g0, PennesCoeffs::from(model_->params()));
    // Floor at eta so zero thermal data still yields a usable ball.
    ball.R2 = std::max(4.0 * std::sqrt(sq(sobolev_norm(data.theta0, 3)) +
                                       sq(sobolev_norm(theta1, 1))),
                       ball.eta);
  }
  ball.validate(model_->k1(), grid_->dims());

  IterationReport rep;
  rep.ball = ball;
  CoupledTrajectory cur = hold(data);
  double prev_ydiff = -1.0;
  int bad_ratio_run = 0;
  for (int n = 1; n <= ctl.max_iter; ++n) {
    CoupledTrajectory next = apply_T(cur, data, ctl.inner);
    double ydiff = ynorm_diff(next, cur);
    double ynext = ynorm(next);
    auto [margin, chi] = margin_and_chi(next);

    IterationRecord rec;
    rec.iter = n;
    rec.ydiff = ydiff;
    if (prev_ydiff > 0.0) rec.ratio = ydiff / prev_ydiff;
    rec.xp1 = xnorm_p1(next, tau);
    rec.xp2 = xnorm_p2(next, tau);
    rec.xtheta2 = xnorm_theta2(next);
    rec.margin = margin;
    rec.in_ball =
        rec.xp1 <= ball.eta && rec.xp2 <= ball.R1 && rec.xtheta2 <= ball.R2;
    rep.records.push_back(rec);
    rep.iterations = n;
    rep.ynorm_final = ynext;
    rep.margin = margin;
    rep.chi_min = chi;

    if (!(margin > ctl.degeneracy_floor)) {
      std::ostringstream os;
      os << "degeneracy margin " << margin << " fell to floor " << ctl.degeneracy_floor
         << " at iteration " << n;
      throw DegeneracyLost(os.str());
    }
    if (std::isfinite(rec.ratio)) {
      if (rec.ratio >= 1.0) {
        if (++bad_ratio_run >= 3) {
          std::ostringstream os;
          os << "no contraction: difference ratio >= 1 for " << bad_ratio_run
             << " consecutive iterations (last ratio " << rec.ratio << ")";
          throw NoContraction(os.str());
        }
      } else {
        bad_ratio_run = 0;
      }
    }
    cur = std::move(next);
    if (ydiff <= ctl.tol * (1.0 + ynext)) {
      rep.converged = true;
      break;
    }
    prev_ydiff = ydiff;
  }
  if (!rep.converged) {
    std::ostringstream os;
    os << "fixed point not reached within " << ctl.max_iter
       << " iterations (last ydiff " << rep.records.back().ydiff << ")";
    throw MaxIterExceeded(os.str());
  }
  rep.residuals = residual_shifted(cur);
  return {std::move(cur), std::move(rep)};
}

ResidualReport Coupler::residual_shifted(const CoupledTrajectory& traj) const {
  check_aligned(traj);
  const auto& ac = traj.ac.states;
  const auto& th = traj.th.states;
  const double dt = traj.ac.dt;
  const double tau = model_->params().tau;
  const PennesCoeffs pc = PennesCoeffs::from(model_->params());
  const Eigen::VectorXd& lam = grid_->eigenvalues();
  const auto n_states = static_cast<long>(ac.size());

  ResidualReport rep;
  double ac_res = 0, ac_scale = 0, th_res = 0, th_scale = 0;

  // Every term is projected back onto the retained modes before the norm is
  // taken: the residual is that of the Galerkin system the stepper solves, so
  // it vanishes with dt instead of stalling at the spectral tail of the
  // quadratic sources.
  const auto proj = [this](const Eigen::VectorXd& nodes) {
    return grid_->to_spectral(nodes);
  };

  // Acoustic window [2, N-2]: five-point p_ttt, three-point p_tt, centered
  // p_t, all from the stored p snapshots only.
  for (long n = 2; n + 2 < n_states; ++n) {
    Eigen::VectorXd c_p = ac[n].p.coef();
    Eigen::VectorXd c_pt = (ac[n + 1].p.coef() - ac[n - 1].p.coef()) / (2.0 * dt);
    Eigen::VectorXd c_ptt =
        (ac[n + 1].p.coef() - 2.0 * c_p + ac[n - 1].p.coef()) / (dt * dt);
    Eigen::VectorXd pv = grid_->to_physical(c_p);
    Eigen::VectorXd ptv = grid_->to_physical(c_pt);
    Eigen::VectorXd pttv = grid_->to_physical(c_ptt);
    Eigen::VectorXd lap_pv = grid_->to_physical((-lam.array() * c_p.array()).matrix());
    Eigen::VectorXd lap_ptv = grid_->to_physical((-lam.array() * c_pt.array()).matrix());
    Eigen::VectorXd c_relax = Eigen::VectorXd::Zero(grid_->num_modes());
    if (tau > 0.0)
      c_relax = tau / (2.0 * dt * dt * dt) *
                (ac[n + 2].p.coef() - 2.0 * ac[n + 1].p.coef() +
                 2.0 * ac[n - 1].p.coef() - ac[n - 2].p.coef());
    Eigen::VectorXd thv = th[n].theta.values();

    const Eigen::Index nn = thv.size();
    Eigen::VectorXd inertia(nn), stiff(nn), damp(nn), force(nn);
    for (Eigen::Index j = 0; j < nn; ++j) {
      Medium med = model_->eval_medium(thv[j]);
      inertia[j] = (1.0 - 2.0 * med.k * pv[j]) * pttv[j];
      stiff[j] = med.h * lap_pv[j];
      damp[j] = med.zeta * lap_ptv[j];
      force[j] = 2.0 * med.k * ptv[j] * ptv[j];
    }
    const Eigen::VectorXd c_inertia = proj(inertia);
    const Eigen::VectorXd c_stiff = proj(stiff);
    const Eigen::VectorXd c_damp = proj(damp);
    const Eigen::VectorXd c_force = proj(force);
    ac_res += dt * (c_relax + c_inertia - c_stiff - c_damp - c_force).squaredNorm();
    ac_scale += dt * (c_relax.squaredNorm() + c_inertia.squaredNorm() +
                      c_stiff.squaredNorm() + c_damp.squaredNorm() +
                      c_force.squaredNorm());
  }

  // Thermal window [1, N-1]: centered Theta_t and p_t from stored snapshots.
  for (long n = 1; n + 1 < n_states; ++n) {
    Eigen::VectorXd c_th = th[n].theta.coef();
    Eigen::VectorXd c_tht = (th[n + 1].theta.coef() - th[n - 1].theta.coef()) / (2.0 * dt);
    Eigen::VectorXd c_pt = (ac[n + 1].p.coef() - ac[n - 1].p.coef()) / (2.0 * dt);
    Eigen::VectorXd thv = grid_->to_physical(c_th);
    Eigen::VectorXd ptv = grid_->to_physical(c_pt);

    Eigen::VectorXd heat(thv.size());
    for (Eigen::Index j = 0; j < thv.size(); ++j)
      heat[j] = model_->eval_medium(thv[j]).phi * ptv[j] * ptv[j];
    const Eigen::VectorXd c_cap = pc.m * c_tht;
    const Eigen::VectorXd c_cond = (-pc.kappa * lam.array() * c_th.array()).matrix();
    const Eigen::VectorXd c_sink = pc.ell * c_th;
    const Eigen::VectorXd c_heat = proj(heat);
    th_res += dt * (c_cap - c_cond + c_sink - c_heat).squaredNorm();
    th_scale += dt * (c_cap.squaredNorm() + c_cond.squaredNorm() +
                      c_sink.squaredNorm() + c_heat.squaredNorm());
  }

  rep.acoustic_abs = std::sqrt(ac_res);
  rep.acoustic_scale = std::sqrt(ac_scale);
  rep.acoustic_rel = rep.acoustic_scale > 0.0 ? rep.acoustic_abs / rep.acoustic_scale : 0.0;
  rep.thermal_abs = std::sqrt(th_res);
  rep.thermal_scale = std::sqrt(th_scale);
  rep.thermal_rel = rep.thermal_scale > 0.0 ? rep.thermal_abs / rep.thermal_scale : 0.0;
  return rep;
}

}  // namespace jps
