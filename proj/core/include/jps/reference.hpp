#pragma once

#include <array>
#include <complex>
#include <vector>

namespace jps {

// Closed-form reference solutions used to verify the integrators.  These
// deliberately avoid the solver code paths: root finding goes through a
// companion-matrix eigensolve and the evaluation is a plain exponential
// superposition.

// Roots of the single-mode characteristic polynomial
//   tau s^3 + s^2 + b*lambda s + r*lambda = 0  (tau > 0).
std::array<std::complex<double>, 3> mgt_characteristic_roots(double tau, double r, double b,
                                                             double lambda);

// Least negative real part among the roots (slowest decay rate).
double slowest_decay_rate(const std::array<std::complex<double>, 3>& roots);

// Exact single-mode solution (p, p_t, p_tt) at time t for initial data
// (p0, p1, p2), via the superposition sum c_j exp(s_j t) with the complex
// weights solved from the 3x3 Vandermonde system.  Roots must be distinct.
std::array<double, 3> mgt_mode_solution(const std::array<std::complex<double>, 3>& roots,
                                        double p0, double p1, double p2, double t);

// Exact single-mode bioheat solution for a constant source coefficient:
//   theta(t) = e^(-mu t) theta0 + (1 - e^(-mu t)) g / (kappa lambda + ell),
// mu = (kappa lambda + ell)/m.
double pennes_mode_solution(double m, double kappa, double ell, double lambda,
                            double theta0, double g, double t);

// Sine-series coefficients (w.r.t. the orthonormal basis sqrt(2) sin(k pi x)
// on [0,1]) of the product sin(pi x) * sqrt(2) sin(pi x):
//   c_k = (1 - (-1)^k) * (-4) / (pi k (k^2 - 4)),  c_2 = 0.
std::vector<double> sine_squared_product_coefficients(int num_modes);

}  // namespace jps
