#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "jps/diagnostics.hpp"
#include "jps/jmgt.hpp"
#include "jps/model.hpp"
#include "jps/pennes.hpp"

namespace jps {

// Iteration ball of the fixed-point argument.
struct BallSpec {
  double eta = 0, R1 = 0, R2 = 0;

  // 1 - 2 k1 eta^(1-d/4) R1^(d/4): positive iff the degeneracy predictor
  // admits the ball.
  double degeneracy_predictor(double k1, int dims) const;
  // Enforces 0 < eta < 1, eta <= R1, R2 >= 0 and a positive predictor.
  void validate(double k1, int dims) const;
};

// Initial data of the coupled system.  p2 may be left empty, in which case
// the value implied by the shifted acoustic equation at t = 0 is used.
struct CoupledData {
  SpectralField p0, p1, p2, theta0;
};

// Acoustic and thermal trajectories on one shared uniform mesh.
struct CoupledTrajectory {
  AcousticTrajectory ac;
  ThermalTrajectory th;

  std::size_t size() const { return ac.states.size(); }
};

struct IterationRecord {
  int iter = 0;
  double ydiff = 0;
  double ratio = std::numeric_limits<double>::quiet_NaN();  // ydiff_n / ydiff_{n-1}
  double xp1 = 0, xp2 = 0, xtheta2 = 0;
  double margin = 0;  // min over space-time of 1 - 2 k(Theta) p
  bool in_ball = false;
};

struct ResidualReport {
  double acoustic_abs = 0, acoustic_scale = 0, acoustic_rel = 0;
  double thermal_abs = 0, thermal_scale = 0, thermal_rel = 0;
};

struct FixedPointControls {
  double tol = 1e-8;
  int max_iter = 50;
  double eta0 = 0;  // smallness cap on sqrt(||p0||_H1^2 + ||p1||_H1^2 + tau ||p2||^2)
  BallSpec ball;    // eta == 0 selects radii from the data norms (x4)
  double degeneracy_floor = 0.0;
  StepControls inner;
};

struct IterationReport {
  std::vector<IterationRecord> records;
  bool converged = false;
  int iterations = 0;
  double ynorm_final = 0;
  double margin = 0;
  double chi_min = 0;
  BallSpec ball;  // the radii actually used
  ResidualReport residuals;
};

// sup-in-time of sqrt(||p||_H1^2 + ||p_t||_H1^2 + ||p_tt||^2
//                     + ||Theta||_H2^2 + ||Theta_t||_H1^2).
double ynorm(const CoupledTrajectory& a);
double ynorm_diff(const CoupledTrajectory& a, const CoupledTrajectory& b);
CoupledTrajectory subtract(const CoupledTrajectory& a, const CoupledTrajectory& b);

// Solution-space norms of one trajectory (X_p1, X_p2, X_Theta2).
double xnorm_p1(const CoupledTrajectory& a, double tau);
double xnorm_p2(const CoupledTrajectory& a, double tau);
double xnorm_theta2(const CoupledTrajectory& a);

// Frozen-coefficient solve engine around one grid / medium / time mesh.
// The model must outlive the coupler.
class Coupler {
 public:
  Coupler(std::shared_ptr<const BoxGrid> grid, const CoefficientModel& model, double T,
          double dt);

  double T() const { return T_; }
  double dt() const { return dt_; }
  long nsteps() const { return nsteps_; }
  const CoefficientModel& model() const { return *model_; }
  const std::shared_ptr<const BoxGrid>& grid() const { return grid_; }

  // Fills p2 with the consistent value when empty and validates grids.
  CoupledData prepared(const CoupledData& data) const;

  // Constant-in-time hold of the data (Picard seed).
  CoupledTrajectory hold(const CoupledData& data) const;

  // One application of the frozen-coefficient map: both children consume
  // the same star iterate.
  CoupledTrajectory apply_T(const CoupledTrajectory& star, const CoupledData& data,
                            const StepControls& ctl = {}) const;

  std::pair<CoupledTrajectory, IterationReport> solve(const CoupledData& data,
                                                      const FixedPointControls& ctl) const;

  // Independent consistency check: centered time differences of the stored
  // p / Theta snapshots plugged into the shifted system, L2(L2) norms
  // relative to the combined magnitude of the equation terms.
  ResidualReport residual_shifted(const CoupledTrajectory& traj) const;

  // min over space-time of (1 - 2 k(Theta) p) and of chi = zeta - tau h.
  std::pair<double, double> margin_and_chi(const CoupledTrajectory& traj) const;

  // Frozen-coefficient ingredients exposed for diagnostics.  The returned
  // closures reference `star`; they must not outlive it.
  CoefficientTrack track_from(const ThermalTrajectory& star) const;
  SourceFn acoustic_source_from(const CoupledTrajectory& star) const;
  SourceFn thermal_source_from(const CoupledTrajectory& star) const;

 private:
  SpectralField interp_field(const std::vector<AcousticState>& st, double t,
                             int which) const;
  Eigen::VectorXd interp_theta_values(const ThermalTrajectory& star, double t) const;

  std::shared_ptr<const BoxGrid> grid_;
  const CoefficientModel* model_;
  double T_ = 0, dt_ = 0;
  long nsteps_ = 0;
};

}  // namespace jps
