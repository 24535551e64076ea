#pragma once

#include <Eigen/Core>
#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "jps/spectral.hpp"

namespace jps {

// State of the third-order-in-time acoustic solve at one instant.
// For the reduced model (tau = 0) ptt is the value implied by the PDE.
struct AcousticState {
  double t = 0;
  SpectralField p, pt, ptt;
};

// Time-dependent coefficient pair (r, b) of
//   tau p_ttt + p_tt - r Lap p - b Lap p_t = f .
// A track promises floors/caps which every sample must honour; uniform
// (x-constant) tracks unlock the exact mode-diagonal implicit solve.
// Optional gradient samplers feed the coefficient monitors; they return
// d(r)/dx_axis and d(b)/dx_axis on the node grid.
class CoefficientTrack {
 public:
  struct Bounds {
    double r_min = 0, r_max = 0, b_min = 0, b_max = 0;
  };
  using UniformSampler = std::function<std::array<double, 2>(double)>;
  using Sampler = std::function<void(double, Eigen::VectorXd&, Eigen::VectorXd&)>;
  using GradientSampler =
      std::function<void(double, int, Eigen::VectorXd&, Eigen::VectorXd&)>;

  static CoefficientTrack constants(double r, double b);
  static CoefficientTrack uniform(UniformSampler s, Bounds bounds);
  static CoefficientTrack varying(Sampler s, Bounds bounds,
                                  GradientSampler grad = nullptr);

  bool uniform_in_space() const { return static_cast<bool>(uniform_); }
  bool has_gradients() const { return static_cast<bool>(grad_); }
  const Bounds& bounds() const { return bounds_; }

  // Scalar sample; only valid for uniform tracks.  Bound-checked.
  std::array<double, 2> sample_uniform(double t) const;
  // Node-grid sample; valid for every track.  Bound-checked.
  void sample(const BoxGrid& grid, double t, Eigen::VectorXd& r,
              Eigen::VectorXd& b) const;
  void sample_gradient(const BoxGrid& grid, double t, int axis, Eigen::VectorXd& dr,
                       Eigen::VectorXd& db) const;

 private:
  CoefficientTrack() = default;
  void check(double t, double r_lo, double r_hi, double b_lo, double b_hi) const;

  UniformSampler uniform_;
  Sampler varying_;
  GradientSampler grad_;
  Bounds bounds_;
};

// Forcing sampled on the node grid at any requested time; an empty
// function means f = 0.
using SourceFn = std::function<Eigen::VectorXd(double)>;

struct StepControls {
  double solve_tol = 1e-10;  // relative residual of the inner implicit solve
  int solve_max_iter = 500;
};

struct SolveOptions {
  StepControls controls;
  int store_stride = 1;  // keep every n-th state (plus the final one)
  std::function<void(const AcousticState&)> callback;
  int callback_stride = 1;
};

// Trajectory on the uniform mesh t_n = n * dt (stride-thinned if requested).
struct AcousticTrajectory {
  std::vector<AcousticState> states;
  double dt = 0;

  const AcousticState& front() const { return states.front(); }
  const AcousticState& back() const { return states.back(); }
};

// One implicit-midpoint step (coefficients and forcing frozen at t + dt/2).
// tau = 0 selects the reduced second-order model; ptt of the returned state
// is then recomputed from the PDE at the new time.
AcousticState jmgt_step(const AcousticState& s, double tau, const CoefficientTrack& track,
                        const SourceFn& f, double dt, const StepControls& ctl = {});

// March nsteps = round(T/dt) uniform steps (dt is adjusted to T/nsteps when
// the division is not exact).  p2 of `initial` may be empty for tau > 0
// only if `consistent_p2` below was used to fill it.
AcousticTrajectory jmgt_solve(const AcousticState& initial, double tau,
                              const CoefficientTrack& track, const SourceFn& f, double T,
                              double dt, const SolveOptions& opts = {});

// p_tt(0) implied by the PDE: (r Lap p0 + b Lap p1 + f(0)) for tau >= 0.
SpectralField consistent_p2(const SpectralField& p0, const SpectralField& p1,
                            const CoefficientTrack& track, const SourceFn& f);

}  // namespace jps
