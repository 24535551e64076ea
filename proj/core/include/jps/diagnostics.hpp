#pragma once

#include <limits>
#include <vector>

#include "jps/jmgt.hpp"
#include "jps/pennes.hpp"

namespace jps {

// Energy functionals of the linearized acoustic equation at one instant:
//   E0 = 1/2 (||p_t||^2 + ||sqrt(r) grad p||^2)
//   E1 = 1/2 (tau ||p_tt||^2 + ||sqrt(b) grad p_t||^2)
//   D0 = ||sqrt(b) grad p_t||^2 + ||p_tt||^2
//   E  = 1/2 (||sqrt(b) Lap p||^2 + ||sqrt(b) Lap p_t||^2 + tau ||grad p_tt||^2)
//   D  = ||sqrt(r) Lap p||^2 + ||grad p_tt||^2
// chi_min and margin are filled by the coupled driver; they stay NaN for
// purely linear runs.
struct EnergyReport {
  double t = 0;
  double E0 = 0, E1 = 0, E = 0, D0 = 0, D = 0;
  double Lambda0 = std::numeric_limits<double>::quiet_NaN();
  double Lambda = std::numeric_limits<double>::quiet_NaN();
  double chi_min = std::numeric_limits<double>::quiet_NaN();
  double margin = std::numeric_limits<double>::quiet_NaN();
};

// r_nodes / b_nodes are coefficient samples on the node grid; both must be
// nonnegative (NegativeWeight otherwise).
EnergyReport acoustic_energies(const AcousticState& s, double tau,
                               const Eigen::VectorXd& r_nodes,
                               const Eigen::VectorXd& b_nodes);

// L2 inner product via Parseval.
double inner_l2(const SpectralField& a, const SpectralField& b);
// sum_axis integral w * (d_axis u)(d_axis v) by node quadrature.
double weighted_grad_inner(const SpectralField& u, const SpectralField& v,
                           const Eigen::VectorXd& w_nodes);

// Coefficient monitors
//   Lambda0(t) = 1 + ||r_t||inf + ||r_t||inf^2 + ||b_t||inf + ||grad b||inf^2
//                  + ||grad r||inf^2
//   Lambda(t)  = 1 + ||b_t||inf + ||b_t||inf^2 + ||r_t||inf^2 .
// Time derivatives use centered differences with spacing fd_delta, falling
// back to one-sided stencils at the ends of [t_lo, t_hi].  Spatial
// gradients come from the track's gradient sampler when present and from
// second-order finite differences on the uniform node grid otherwise.
struct MonitorSample {
  double lambda0 = 0, lambda = 0;
  double rt_inf = 0, bt_inf = 0, grad_r_inf = 0, grad_b_inf = 0;
};
MonitorSample coefficient_monitors(const CoefficientTrack& track, const BoxGrid& grid,
                                   double t, double fd_delta, double t_lo, double t_hi);

// Integrating envelope u(t) <= u0 e^{A(t)} + int_0^t b(s) e^{A(t)-A(s)} ds,
// A(t) = int_0^t a, all integrals by the trapezoid rule on the uniform mesh
// a/b are sampled on.  a must be nonnegative (NegativeA otherwise); b must
// be nonnegative too.
std::vector<double> gronwall_envelope(double u0, const std::vector<double>& a,
                                      const std::vector<double>& b, double dt);

// Pieces of the parabolic regularity estimate for the bioheat solve:
//   lhs_total = int ||Theta||_H3^2 + sup ||Theta||_H2^2 + sup ||Theta_t||_H1^2
//             + int ||Theta_t||_H2^2 + int ||Theta_tt||^2
//   rhs_bracket = ||Theta(0)||_H3^2 + ||grad g(0)||^2
//               + int (2||g||^2 + ||g_t||^2 + ||grad g||^2) .
// Theta_tt is reconstructed from the PDE; g_t uses centered differences of
// the source samples on the trajectory mesh.
struct ThermalRegularity {
  double l2_h3 = 0, linf_h2 = 0, linf_h1_t = 0, l2_h2_t = 0, l2_l2_tt = 0;
  double lhs_total = 0;
  double rhs_bracket = 0;
};
ThermalRegularity thermal_regularity(const ThermalTrajectory& traj, const PennesCoeffs& c,
                                     const SourceFn& g);

}  // namespace jps
