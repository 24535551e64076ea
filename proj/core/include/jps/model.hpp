#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <vector>

#include "jps/errors.hpp"

namespace jps {

// Physical constants of the medium, SI units throughout.  Temperatures are
// handled as deviations from the ambient theta_a, so theta_a only documents
// the operating point of the sound-speed polynomial.
struct PhysicalParams {
  double tau = 1e-6;         // relaxation time [s]; 0 selects the reduced (second-order) model
  double rho = 1000.0;       // acoustic equilibrium density [kg/m^3]
  double beta_acous = 5.0;   // acoustic nonlinearity coefficient beta_a [-]
  double alpha = 1e-4;       // ultrasound absorption coefficient [1/m]
  double omega = 6.2832e6;   // driving angular frequency [rad/s]
  double rho_a = 1000.0;     // tissue density [kg/m^3]
  double C_a = 4180.0;       // tissue specific heat [J/(kg K)]
  double kappa_a = 0.52;     // tissue thermal conductivity [W/(m K)]
  double rho_b = 1050.0;     // blood density [kg/m^3]
  double C_b = 3600.0;       // blood specific heat [J/(kg K)]
  double W = 0.005;          // perfusion rate [1/s]
  double theta_a = 37.0;     // ambient temperature [deg C]

  double m() const { return rho_a * C_a; }      // heat capacity per volume
  double ell() const { return rho_b * C_b * W; }  // perfusion sink coefficient

  // Throws ConfigError naming the offending field.
  void validate() const;
};

// Medium response at one temperature deviation theta:
//   h    = c^2                   (squared sound speed)
//   beta = 2 alpha c^3 / omega^2 (sound diffusivity)
//   zeta = beta + tau h          (effective damping coefficient)
//   k    = beta_acous / (rho h)  (nonlinearity weight)
//   phi  = 2 beta / (rho_a h^2)  (heating efficiency)
struct Medium {
  double c = 0, h = 0, beta = 0, zeta = 0, k = 0, phi = 0;
};

// Certified bounds of the medium laws over a temperature interval.
struct MediumBounds {
  double h_min = 0, h_max = 0;      // (H1): h_min > 0
  double zeta_min = 0, zeta_max = 0;  // (Z): zeta_min > 0
  double k_abs_max = 0;             // certified max |k|; <= k1()
  double phi_min = 0, phi_max = 0;  // (F1): 0 <= phi <= phi_max
  double chi_min = 0, chi_max = 0;  // chi = zeta - tau h = beta
  double c_min = 0, c_max = 0;
};

// Temperature-dependent sound speed c(theta) as a polynomial in the
// deviation theta = Theta_abs - theta_a, plus every derived medium law.
// Bounds are certified at construction by dense sampling over theta_range
// with Lipschitz padding from the analytic derivatives, and are immutable
// afterwards.  Evaluations outside theta_range are tolerated (and counted)
// as long as the certified bounds still hold at the requested point.
class CoefficientModel {
 public:
  // c_poly holds ascending powers: c(theta) = sum_i c_poly[i] * theta^i.
  // Degree must be <= 4.
  CoefficientModel(std::vector<double> c_poly, std::array<double, 2> theta_range,
                   const PhysicalParams& params);

  double eval_c(double theta) const;    // Horner; throws NonPositiveSpeed if c <= 0
  Medium eval_medium(double theta) const;
  double chi(double theta) const;       // zeta - tau h (= beta identically)

  // Analytic d/dtheta of the coefficients entering the acoustic operator,
  // used for chain-rule spatial gradients of h(Theta(x)) and zeta(Theta(x)).
  double dh_dtheta(double theta) const;
  double dzeta_dtheta(double theta) const;

  const MediumBounds& bounds() const { return bounds_; }
  const std::array<double, 2>& theta_range() const { return theta_range_; }
  const std::vector<double>& c_poly() const { return c_poly_; }
  const PhysicalParams& params() const { return params_; }

  // Worst-case nonlinearity weight implied by the certified floor,
  // k1 = beta_acous / (rho * h_min).
  double k1() const;

  // Polynomial growth exponents of (h'', k'', zeta'', phi'') implied by the
  // polynomial degree; recorded in run manifests, never used in decisions.
  std::array<int, 4> growth_exponents() const;

  // Number of evaluations seen outside theta_range (informational).
  std::int64_t range_warnings() const { return range_warnings_.load(); }

 private:
  double eval_poly(const std::vector<double>& p, double x) const;
  Medium eval_medium_unchecked(double theta) const;
  void certify();

  std::vector<double> c_poly_;
  std::vector<double> dc_poly_;  // derivative coefficients
  std::array<double, 2> theta_range_;
  PhysicalParams params_;
  MediumBounds bounds_;
  mutable std::atomic<std::int64_t> range_warnings_{0};
};

}  // namespace jps
