#include "jps/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace jps {

namespace {

void require(bool ok, const char* what, const char* field) {
  if (!ok) throw ConfigError(what, field);
}

}  // namespace

void PhysicalParams::validate() const {
  require(std::isfinite(tau) && tau >= 0.0, "must be finite and >= 0", "physics.tau");
  require(std::isfinite(rho) && rho > 0.0, "must be finite and > 0", "physics.rho");
  require(std::isfinite(beta_acous) && beta_acous >= 0.0, "must be finite and >= 0",
          "physics.beta_acous");
  require(std::isfinite(alpha) && alpha >= 0.0, "must be finite and >= 0", "physics.alpha");
  require(std::isfinite(omega) && omega > 0.0, "must be finite and > 0", "physics.omega");
  require(std::isfinite(rho_a) && rho_a > 0.0, "must be finite and > 0", "physics.rho_a");
  require(std::isfinite(C_a) && C_a > 0.0, "must be finite and > 0", "physics.C_a");
  require(std::isfinite(kappa_a) && kappa_a > 0.0, "must be finite and > 0", "physics.kappa_a");
  require(std::isfinite(rho_b) && rho_b >= 0.0, "must be finite and >= 0", "physics.rho_b");
  require(std::isfinite(C_b) && C_b >= 0.0, "must be finite and >= 0", "physics.C_b");
  require(std::isfinite(W) && W >= 0.0, "must be finite and >= 0", "physics.W");
  require(std::isfinite(theta_a), "must be finite", "physics.theta_a");
}

CoefficientModel::CoefficientModel(std::vector<double> c_poly,
                                   std::array<double, 2> theta_range,
                                   const PhysicalParams& params)
    : c_poly_(std::move(c_poly)), theta_range_(theta_range), params_(params) {
  params_.validate();
  if (c_poly_.empty()) throw ConfigError("must not be empty", "medium.c_poly");
  while (c_poly_.size() > 1 && c_poly_.back() == 0.0) c_poly_.pop_back();
  if (c_poly_.size() > 5) throw ConfigError("degree must be <= 4", "medium.c_poly");
  for (double c : c_poly_)
    if (!std::isfinite(c)) throw ConfigError("coefficients must be finite", "medium.c_poly");
  if (!(theta_range_[0] < theta_range_[1]))
    throw ConfigError("must satisfy lo < hi", "medium.theta_range");

  dc_poly_.assign(c_poly_.size() > 1 ? c_poly_.size() - 1 : 1, 0.0);
  for (std::size_t i = 1; i < c_poly_.size(); ++i)
    dc_poly_[i - 1] = static_cast<double>(i) * c_poly_[i];

  certify();
}

double CoefficientModel::eval_poly(const std::vector<double>& p, double x) const {
  double v = 0.0;
  for (std::size_t i = p.size(); i-- > 0;) v = v * x + p[i];
  return v;
}

double CoefficientModel::eval_c(double theta) const {
  const double c = eval_poly(c_poly_, theta);
  if (!(c > 0.0)) throw NonPositiveSpeed("sound speed evaluated <= 0 at theta=" +
                                         std::to_string(theta));
  if (theta < theta_range_[0] || theta > theta_range_[1]) {
    range_warnings_.fetch_add(1, std::memory_order_relaxed);
    // Outside the certified interval the medium must still honour the
    // certified bounds, otherwise downstream floors are meaningless.
    const Medium mm = eval_medium_unchecked(theta);
    const double slack = 1e-12;
    const bool ok = mm.h >= bounds_.h_min * (1.0 - slack) &&
                    mm.h <= bounds_.h_max * (1.0 + slack) &&
                    mm.zeta >= bounds_.zeta_min * (1.0 - slack) &&
                    mm.zeta <= bounds_.zeta_max * (1.0 + slack) &&
                    std::abs(mm.k) <= bounds_.k_abs_max * (1.0 + slack) + slack &&
                    mm.phi <= bounds_.phi_max * (1.0 + slack) + slack;
    if (!ok)
      throw RangeViolation("theta=" + std::to_string(theta) +
                           " outside certified range and certified bounds violated");
  }
  return c;
}

Medium CoefficientModel::eval_medium_unchecked(double theta) const {
  Medium m;
  m.c = eval_poly(c_poly_, theta);
  m.h = m.c * m.c;
  m.beta = 2.0 * params_.alpha * m.c * m.c * m.c / (params_.omega * params_.omega);
  m.zeta = m.beta + params_.tau * m.h;
  m.k = params_.beta_acous / (params_.rho * m.h);
  m.phi = 2.0 * m.beta / (params_.rho_a * m.h * m.h);
  return m;
}

Medium CoefficientModel::eval_medium(double theta) const {
  eval_c(theta);  // range / positivity policing
  return eval_medium_unchecked(theta);
}

double CoefficientModel::chi(double theta) const {
  const Medium m = eval_medium(theta);
  return m.zeta - params_.tau * m.h;
}

double CoefficientModel::dh_dtheta(double theta) const {
  const double c = eval_poly(c_poly_, theta);
  const double dc = eval_poly(dc_poly_, theta);
  return 2.0 * c * dc;
}

double CoefficientModel::dzeta_dtheta(double theta) const {
  const double c = eval_poly(c_poly_, theta);
  const double dc = eval_poly(dc_poly_, theta);
  const double w2 = params_.omega * params_.omega;
  return (6.0 * params_.alpha * c * c / w2 + 2.0 * params_.tau * c) * dc;
}

double CoefficientModel::k1() const {
  return params_.beta_acous / (params_.rho * bounds_.h_min);
}

std::array<int, 4> CoefficientModel::growth_exponents() const {
  const int n = static_cast<int>(c_poly_.size()) - 1;  // polynomial degree
  // h = c^2 has degree 2n, so h'' grows like |s|^(2n-2); zeta contains c^3.
  // k and phi are bounded rational functions of a floored polynomial, so
  // their second derivatives need no growth allowance.
  return {std::max(0, 2 * n - 2), 0, std::max(0, 3 * n - 2), 0};
}

void CoefficientModel::certify() {
  constexpr int kSamples = 8193;
  const double lo = theta_range_[0], hi = theta_range_[1];
  const double dx = (hi - lo) / (kSamples - 1);

  const double w2 = params_.omega * params_.omega;
  auto inf = std::numeric_limits<double>::infinity();
  MediumBounds b;
  b.h_min = b.zeta_min = b.phi_min = b.chi_min = b.c_min = inf;
  b.h_max = b.zeta_max = b.phi_max = b.chi_max = b.c_max = -inf;
  b.k_abs_max = 0.0;
  // Lipschitz constants (max sampled |d/dtheta|) for interval padding.
  double Lc = 0, Lh = 0, Lz = 0, Lk = 0, Lp = 0, Lchi = 0;

  for (int i = 0; i < kSamples; ++i) {
    const double th = lo + i * dx;
    const double c = eval_poly(c_poly_, th);
    if (!(c > 0.0))
      throw NonPositiveSpeed("sound speed <= 0 inside theta_range at theta=" +
                             std::to_string(th));
    const double dc = eval_poly(dc_poly_, th);
    const double h = c * c;
    const double beta = 2.0 * params_.alpha * c * c * c / w2;
    const double zeta = beta + params_.tau * h;
    const double k = params_.beta_acous / (params_.rho * h);
    const double phi = 2.0 * beta / (params_.rho_a * h * h);
    const double chi = beta;  // zeta - tau h

    b.c_min = std::min(b.c_min, c);
    b.c_max = std::max(b.c_max, c);
    b.h_min = std::min(b.h_min, h);
    b.h_max = std::max(b.h_max, h);
    b.zeta_min = std::min(b.zeta_min, zeta);
    b.zeta_max = std::max(b.zeta_max, zeta);
    b.k_abs_max = std::max(b.k_abs_max, std::abs(k));
    b.phi_min = std::min(b.phi_min, phi);
    b.phi_max = std::max(b.phi_max, phi);
    b.chi_min = std::min(b.chi_min, chi);
    b.chi_max = std::max(b.chi_max, chi);

    const double dh = 2.0 * c * dc;
    const double dbeta = 6.0 * params_.alpha * c * c * dc / w2;
    Lc = std::max(Lc, std::abs(dc));
    Lh = std::max(Lh, std::abs(dh));
    Lz = std::max(Lz, std::abs(dbeta + params_.tau * dh));
    Lk = std::max(Lk, std::abs(-2.0 * params_.beta_acous * dc / (params_.rho * c * c * c)));
    Lp = std::max(Lp, std::abs(-4.0 * params_.alpha * dc / (w2 * params_.rho_a * c * c)));
    Lchi = std::max(Lchi, std::abs(dbeta));
  }

  // Pad by one full sample spacing times the sampled Lipschitz constant;
  // generous for the smooth low-degree laws certified here.
  b.c_min -= Lc * dx;
  b.c_max += Lc * dx;
  b.h_min -= Lh * dx;
  b.h_max += Lh * dx;
  b.zeta_min -= Lz * dx;
  b.zeta_max += Lz * dx;
  b.k_abs_max += Lk * dx;
  b.phi_min = std::max(0.0, b.phi_min - Lp * dx);
  b.phi_max += Lp * dx;
  b.chi_min -= Lchi * dx;
  b.chi_max += Lchi * dx;

  if (!(b.c_min > 0.0) || !(b.h_min > 0.0))
    throw NonPositiveSpeed("sound speed floor not positive over theta_range");
  if (!(b.zeta_min > 0.0))
    throw CoefficientFloorViolated("damping floor zeta_min must be positive over theta_range");
  if (b.phi_min < 0.0)
    throw CoefficientFloorViolated("heating efficiency must be nonnegative over theta_range");

  bounds_ = b;
}

}  // namespace jps
