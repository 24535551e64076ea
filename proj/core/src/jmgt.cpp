#include "jps/jmgt.hpp"

#include <cmath>
#include <limits>
#include <utility>

namespace jps {

CoefficientTrack CoefficientTrack::constants(double r, double b) {
  CoefficientTrack t;
  t.uniform_ = [r, b](double) { return std::array<double, 2>{r, b}; };
  t.bounds_ = {r, r, b, b};
  return t;
}

CoefficientTrack CoefficientTrack::uniform(UniformSampler s, Bounds bounds) {
  CoefficientTrack t;
  t.uniform_ = std::move(s);
  t.bounds_ = bounds;
  return t;
}

CoefficientTrack CoefficientTrack::varying(Sampler s, Bounds bounds, GradientSampler grad) {
  CoefficientTrack t;
  t.varying_ = std::move(s);
  t.grad_ = std::move(grad);
  t.bounds_ = bounds;
  return t;
}

void CoefficientTrack::check(double t, double r_lo, double r_hi, double b_lo,
                             double b_hi) const {
  // Tolerate roundoff at the certified edges.
  const double sr = 1e-12 * (std::abs(bounds_.r_min) + std::abs(bounds_.r_max)) + 1e-300;
  const double sb = 1e-12 * (std::abs(bounds_.b_min) + std::abs(bounds_.b_max)) + 1e-300;
  if (r_lo < bounds_.r_min - sr || r_hi > bounds_.r_max + sr || b_lo < bounds_.b_min - sb ||
      b_hi > bounds_.b_max + sb || !std::isfinite(r_lo) || !std::isfinite(r_hi) ||
      !std::isfinite(b_lo) || !std::isfinite(b_hi))
    throw CoefficientFloorViolated("coefficient sample at t=" + std::to_string(t) +
                                   " left the track bounds");
}

std::array<double, 2> CoefficientTrack::sample_uniform(double t) const {
  if (!uniform_) throw GridMismatch("sample_uniform on a space-varying track");
  const auto rb = uniform_(t);
  check(t, rb[0], rb[0], rb[1], rb[1]);
  return rb;
}

void CoefficientTrack::sample(const BoxGrid& grid, double t, Eigen::VectorXd& r,
                              Eigen::VectorXd& b) const {
  if (uniform_) {
    const auto rb = sample_uniform(t);
    r.setConstant(grid.num_nodes(), rb[0]);
    b.setConstant(grid.num_nodes(), rb[1]);
    return;
  }
  r.resize(grid.num_nodes());
  b.resize(grid.num_nodes());
  varying_(t, r, b);
  if (r.size() != grid.num_nodes() || b.size() != grid.num_nodes())
    throw GridMismatch("coefficient sampler produced wrong node count");
  check(t, r.minCoeff(), r.maxCoeff(), b.minCoeff(), b.maxCoeff());
}

void CoefficientTrack::sample_gradient(const BoxGrid& grid, double t, int axis,
                                       Eigen::VectorXd& dr, Eigen::VectorXd& db) const {
  if (uniform_) {  // x-constant: gradients vanish
    dr.setZero(grid.num_nodes());
    db.setZero(grid.num_nodes());
    return;
  }
  if (!grad_) throw GridMismatch("track has no gradient sampler");
  dr.resize(grid.num_nodes());
  db.resize(grid.num_nodes());
  grad_(t, axis, dr, db);
}

namespace {

Eigen::VectorXd source_coef(const std::shared_ptr<const BoxGrid>& grid, const SourceFn& f,
                            double t) {
  if (!f) return Eigen::VectorXd::Zero(grid->num_modes());
  Eigen::VectorXd nodes = f(t);
  if (nodes.size() != grid->num_nodes())
    throw GridMismatch("source sampler produced wrong node count");
  return grid->to_spectral(nodes);
}

// analysis( m .* synth(-lambda .* u) ) : the pseudospectral coefficient
// action of u -> m * Lap u for a node-grid multiplier m.
Eigen::VectorXd weighted_lap(const BoxGrid& g, const Eigen::VectorXd& m,
                             const Eigen::VectorXd& u) {
  Eigen::VectorXd lap = (-g.eigenvalues().array() * u.array()).matrix();
  return g.to_spectral(m.cwiseProduct(g.to_physical(lap)));
}

// Preconditioned residual-correction solve of  G w = g  where
//   G w = diag_scale * w - weighted_lap(m_rb, w) ... expressed through the
// supplied operator.  P is the mode-diagonal preconditioner.
Eigen::VectorXd refine(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& G,
                       const Eigen::VectorXd& P, const Eigen::VectorXd& g,
                       const StepControls& ctl) {
  const double gn = g.norm();
  if (gn == 0.0) return Eigen::VectorXd::Zero(g.size());
  Eigen::VectorXd w = g.cwiseQuotient(P);
  double best = std::numeric_limits<double>::infinity();
  int worse = 0;
  for (int it = 0; it < ctl.solve_max_iter; ++it) {
    Eigen::VectorXd res = g - G(w);
    const double rn = res.norm() / gn;
    if (!std::isfinite(rn)) throw SolveDiverged("inner solve produced non-finite residual");
    if (rn <= ctl.solve_tol) return w;
    if (rn < best) {
      best = rn;
      worse = 0;
    } else if (++worse >= 25) {
      throw SolveDiverged("inner solve stagnated at relative residual " +
                          std::to_string(rn));
    }
    w += res.cwiseQuotient(P);
  }
  throw SolveDiverged("inner solve exceeded max iterations");
}

void check_finite(const AcousticState& s) {
  if (!s.p.coef().allFinite() || !s.pt.coef().allFinite() || !s.ptt.coef().allFinite())
    throw NonFiniteState("acoustic state became non-finite at t=" + std::to_string(s.t));
}

}  // namespace

AcousticState jmgt_step(const AcousticState& s, double tau, const CoefficientTrack& track,
                        const SourceFn& f, double dt, const StepControls& ctl) {
  if (!(dt > 0) || !std::isfinite(dt)) throw ConfigError("dt must be finite and > 0");
  if (s.p.empty() || s.pt.empty() || (tau > 0 && s.ptt.empty()))
    throw ConfigError("acoustic state incomplete");
  const auto grid = s.p.grid_ptr();
  const BoxGrid& g = *grid;
  const auto& lam = g.eigenvalues().array();
  const double mu = 0.5 * dt;
  const double tmid = s.t + mu;

  const Eigen::VectorXd fc = source_coef(grid, f, tmid);
  const Eigen::VectorXd& p = s.p.coef();
  const Eigen::VectorXd& pt = s.pt.coef();

  AcousticState out;
  out.t = s.t + dt;

  if (tau > 0) {
    const Eigen::VectorXd& ptt = s.ptt.coef();
    const double mt = mu / tau;
    const Eigen::VectorXd a = p + mu * pt;
    const Eigen::VectorXd bb = pt + mu * ptt;

    Eigen::VectorXd w;
    if (track.uniform_in_space()) {
      const auto [rc, bc] = track.sample_uniform(tmid);
      Eigen::ArrayXd Rp = -lam * (rc * p.array() + bc * pt.array());
      // Midpoint source weight is dt/tau = 2*mt.
      Eigen::ArrayXd rhs3 = ptt.array() + mt * (-ptt.array() + Rp + 2.0 * fc.array());
      Eigen::ArrayXd gnum =
          rhs3 - mt * lam * (rc * (a + mu * bb).array() + bc * bb.array());
      Eigen::ArrayXd denom = 1.0 + mt + mt * lam * (mu * mu * rc + mu * bc);
      w = (gnum / denom).matrix();
    } else {
      Eigen::VectorXd rn, bn;
      track.sample(g, tmid, rn, bn);
      const double vol = g.node_weights().sum();
      const double rm = g.node_weights().dot(rn) / vol;
      const double bm = g.node_weights().dot(bn) / vol;
      const Eigen::VectorXd m_rb = mu * mu * rn + mu * bn;

      Eigen::VectorXd c =
          ptt + mt * (-ptt + weighted_lap(g, rn, p) + weighted_lap(g, bn, pt) + 2.0 * fc);
      Eigen::VectorXd rhs =
          c + mt * (weighted_lap(g, rn, a + mu * bb) + weighted_lap(g, bn, bb));
      Eigen::VectorXd P =
          (1.0 + mt + mt * lam * (mu * mu * rm + mu * bm)).matrix();
      auto G = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        return (1.0 + mt) * x - mt * weighted_lap(g, m_rb, x);
      };
      w = refine(G, P, rhs, ctl);
    }
    Eigen::VectorXd v = bb + mu * w;
    Eigen::VectorXd q = a + mu * v;
    out.p = SpectralField(grid, std::move(q));
    out.pt = SpectralField(grid, std::move(v));
    out.ptt = SpectralField(grid, std::move(w));
  } else {
    // Reduced second-order model: p_tt = r Lap p + b Lap p_t + f.
    const Eigen::VectorXd a = p + mu * pt;
    Eigen::VectorXd v;
    Eigen::VectorXd rn, bn;
    if (track.uniform_in_space()) {
      const auto [rc, bc] = track.sample_uniform(tmid);
      Eigen::ArrayXd c2 =
          pt.array() - mu * lam * (rc * p.array() + bc * pt.array()) + dt * fc.array();
      Eigen::ArrayXd gnum = c2 - mu * lam * rc * a.array();
      Eigen::ArrayXd denom = 1.0 + lam * (mu * mu * rc + mu * bc);
      v = (gnum / denom).matrix();
    } else {
      track.sample(g, tmid, rn, bn);
      const double vol = g.node_weights().sum();
      const double rm = g.node_weights().dot(rn) / vol;
      const double bm = g.node_weights().dot(bn) / vol;
      const Eigen::VectorXd m_rb = mu * mu * rn + mu * bn;
      Eigen::VectorXd c2 =
          pt + mu * (weighted_lap(g, rn, p) + weighted_lap(g, bn, pt)) + dt * fc;
      Eigen::VectorXd rhs = c2 + mu * weighted_lap(g, rn, a);
      Eigen::VectorXd P = (1.0 + lam * (mu * mu * rm + mu * bm)).matrix();
      auto G = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        return x - weighted_lap(g, m_rb, x);
      };
      v = refine(G, P, rhs, ctl);
    }
    Eigen::VectorXd q = a + mu * v;
    // ptt kept consistent with the PDE at the new time.
    const double tnew = s.t + dt;
    const Eigen::VectorXd fnew = source_coef(grid, f, tnew);
    Eigen::VectorXd w;
    if (track.uniform_in_space()) {
      const auto [rc, bc] = track.sample_uniform(tnew);
      w = (-lam * (rc * q.array() + bc * v.array()) + fnew.array()).matrix();
    } else {
      Eigen::VectorXd rn2, bn2;
      track.sample(g, tnew, rn2, bn2);
      w = weighted_lap(g, rn2, q) + weighted_lap(g, bn2, v) + fnew;
    }
    out.p = SpectralField(grid, std::move(q));
    out.pt = SpectralField(grid, std::move(v));
    out.ptt = SpectralField(grid, std::move(w));
  }

  check_finite(out);
  return out;
}

SpectralField consistent_p2(const SpectralField& p0, const SpectralField& p1,
                            const CoefficientTrack& track, const SourceFn& f) {
  check_same_grid(p0, p1);
  const auto grid = p0.grid_ptr();
  const BoxGrid& g = *grid;
  const auto& lam = g.eigenvalues().array();
  Eigen::VectorXd fc = source_coef(grid, f, 0.0);
  if (track.uniform_in_space()) {
    const auto [rc, bc] = track.sample_uniform(0.0);
    return SpectralField(
        grid, (-lam * (rc * p0.coef().array() + bc * p1.coef().array()) + fc.array())
                  .matrix());
  }
  Eigen::VectorXd rn, bn;
  track.sample(g, 0.0, rn, bn);
  return SpectralField(grid,
                       weighted_lap(g, rn, p0.coef()) + weighted_lap(g, bn, p1.coef()) + fc);
}

AcousticTrajectory jmgt_solve(const AcousticState& initial, double tau,
                              const CoefficientTrack& track, const SourceFn& f, double T,
                              double dt, const SolveOptions& opts) {
  if (!(T > 0) || !std::isfinite(T)) throw ConfigError("T must be finite and > 0");
  if (!(dt > 0) || dt > T * (1 + 1e-12)) throw ConfigError("need 0 < dt <= T");
  if (opts.store_stride < 1 || opts.callback_stride < 1)
    throw ConfigError("strides must be >= 1");
  if (initial.p.empty() || initial.pt.empty()) throw ConfigError("initial data incomplete");
  check_same_grid(initial.p, initial.pt);

  const long nsteps = std::lround(T / dt);
  const double dta = T / static_cast<double>(nsteps);

  AcousticState cur = initial;
  if (tau > 0) {
    if (cur.ptt.empty())
      throw ConfigError("p2 initial data required for tau > 0 (or use consistent_p2)");
    check_same_grid(cur.p, cur.ptt);
  } else {
    cur.ptt = consistent_p2(cur.p, cur.pt, track, f);
  }
  check_finite(cur);

  AcousticTrajectory traj;
  traj.dt = dta;
  traj.states.reserve(static_cast<std::size_t>(nsteps / opts.store_stride) + 2);
  traj.states.push_back(cur);
  if (opts.callback) opts.callback(cur);

  for (long n = 1; n <= nsteps; ++n) {
    cur = jmgt_step(cur, tau, track, f, dta, opts.controls);
    cur.t = static_cast<double>(n) * dta;  // avoid accumulated roundoff
    if (n % opts.store_stride == 0 || n == nsteps) traj.states.push_back(cur);
    if (opts.callback && (n % opts.callback_stride == 0 || n == nsteps))
      opts.callback(cur);
  }
  return traj;
}

}  // namespace jps
