#pragma once

#include <vector>

#include "jps/jmgt.hpp"  // SourceFn, SolveOptions-style controls
#include "jps/model.hpp"
#include "jps/spectral.hpp"

namespace jps {

// Coefficients of the shifted bioheat equation
//   m Theta_t - kappa Lap Theta + ell Theta = g .
struct PennesCoeffs {
  double m = 0, kappa = 0, ell = 0;

  static PennesCoeffs from(const PhysicalParams& p) {
    return {p.m(), p.kappa_a, p.ell()};
  }
  double mu(double lambda) const { return (kappa * lambda + ell) / m; }  // mode decay rate
};

struct ThermalState {
  double t = 0;
  SpectralField theta, theta_t;
};

struct ThermalTrajectory {
  std::vector<ThermalState> states;
  double dt = 0;

  const ThermalState& front() const { return states.front(); }
  const ThermalState& back() const { return states.back(); }
};

// Compatibility value Theta_t(0) = (kappa Lap Theta0 - ell Theta0 + g0) / m;
// g0 is sampled on the node grid (empty vector means g0 = 0).
SpectralField compat_theta1(const SpectralField& theta0, const Eigen::VectorXd& g0_nodes,
                            const PennesCoeffs& c);

// One step of the per-mode integrating-factor scheme,
//   theta_k(t+dt) = e^(-mu_k dt) theta_k(t) + dt e^(-mu_k dt/2) g_k(t+dt/2)/m ,
// exact for g = 0 at any dt; the source integral uses midpoint quadrature.
// theta_t of the result is recomputed from the PDE at the new time.
ThermalState pennes_step(const ThermalState& s, const PennesCoeffs& c, const SourceFn& g,
                         double dt);

struct ThermalSolveOptions {
  int store_stride = 1;
  std::function<void(const ThermalState&)> callback;
  int callback_stride = 1;
};

ThermalTrajectory pennes_solve(const ThermalState& initial, const PennesCoeffs& c,
                               const SourceFn& g, double T, double dt,
                               const ThermalSolveOptions& opts = {});

}  // namespace jps
