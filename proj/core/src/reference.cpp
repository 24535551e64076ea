#include "jps/reference.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>

#include "jps/errors.hpp"

namespace jps {

std::array<std::complex<double>, 3> mgt_characteristic_roots(double tau, double r, double b,
                                                             double lambda) {
  if (!(tau > 0)) throw ConfigError("characteristic roots need tau > 0");
  // Monic form s^3 + (1/tau) s^2 + (b lambda / tau) s + (r lambda / tau).
  const double a2 = 1.0 / tau;
  const double a1 = b * lambda / tau;
  const double a0 = r * lambda / tau;
  Eigen::Matrix3d companion;
  companion << 0, 0, -a0,
               1, 0, -a1,
               0, 1, -a2;
  Eigen::EigenSolver<Eigen::Matrix3d> es(companion, /*computeEigenvectors=*/false);
  std::array<std::complex<double>, 3> roots;
  for (int i = 0; i < 3; ++i) roots[i] = es.eigenvalues()(i);
  return roots;
}

double slowest_decay_rate(const std::array<std::complex<double>, 3>& roots) {
  double m = roots[0].real();
  for (const auto& s : roots) m = std::max(m, s.real());
  return m;
}

std::array<double, 3> mgt_mode_solution(const std::array<std::complex<double>, 3>& roots,
                                        double p0, double p1, double p2, double t) {
  Eigen::Matrix3cd V;
  for (int j = 0; j < 3; ++j) {
    V(0, j) = 1.0;
    V(1, j) = roots[j];
    V(2, j) = roots[j] * roots[j];
  }
  Eigen::Vector3cd rhs(p0, p1, p2);
  Eigen::Vector3cd c = V.fullPivLu().solve(rhs);
  std::complex<double> v0 = 0, v1 = 0, v2 = 0;
  for (int j = 0; j < 3; ++j) {
    const std::complex<double> e = c(j) * std::exp(roots[j] * t);
    v0 += e;
    v1 += roots[j] * e;
    v2 += roots[j] * roots[j] * e;
  }
  return {v0.real(), v1.real(), v2.real()};
}

double pennes_mode_solution(double m, double kappa, double ell, double lambda, double theta0,
                            double g, double t) {
  const double denom = kappa * lambda + ell;
  const double mu = denom / m;
  const double decay = std::exp(-mu * t);
  const double steady = denom > 0 ? g / denom : 0.0;
  return decay * theta0 + (1.0 - decay) * steady;
}

std::vector<double> sine_squared_product_coefficients(int num_modes) {
  std::vector<double> c(static_cast<std::size_t>(num_modes), 0.0);
  for (int k = 1; k <= num_modes; ++k) {
    if (k % 2 == 0) continue;  // even modes vanish (k = 2 included)
    const double kk = k;
    c[static_cast<std::size_t>(k - 1)] =
        -4.0 * (1.0 - std::pow(-1.0, k)) / (std::numbers::pi * kk * (kk * kk - 4.0));
  }
  return c;
}

}  // namespace jps
