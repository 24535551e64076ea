#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "jps/coupler.hpp"
#include "jps/model.hpp"
#include "jps/spectral.hpp"

namespace jps {

// One JSON document describes a run.  Parsing is strict: unknown keys raise
// ConfigError carrying the dotted path of the offender, and every value is
// type-checked.  serialize() followed by parse() reproduces the config
// field-for-field.
struct GridConfig {
  int dims = 1;
  std::vector<double> lengths{1.0};
  std::vector<int> modes{32};
  std::vector<int> quad_interior;  // empty -> per-axis default 2*modes
};

struct MediumConfig {
  std::vector<double> c_poly{1500.0};
  std::array<double, 2> theta_range{-10.0, 80.0};
};

// Explicit spectral data: rows of (k_1..k_dims, coefficient).
using ModeList = std::vector<std::pair<std::vector<int>, double>>;

struct DataConfig {
  // "single_mode", "gaussian_bump_projected" or "mode_list".
  std::string preset = "single_mode";

  // single_mode
  double p0_amplitude = 1.0;
  std::vector<int> p0_mode{1, 1, 1};
  double p1_amplitude = 0.0;
  std::vector<int> p1_mode{1, 1, 1};
  double theta0_amplitude = 0.0;
  std::vector<int> theta0_mode{1, 1, 1};

  // gaussian_bump_projected (amplitudes above are reused)
  std::vector<double> center;  // empty -> box midpoint
  double width = 0.1;          // standard deviation [m]

  // mode_list
  ModeList p0_modes, p1_modes, theta0_modes, p2_modes;

  // "consistent" (value implied by the equation at t = 0) or "zero";
  // mode_list may instead supply p2_modes explicitly.
  std::string p2 = "consistent";
};

struct SolveConfig {
  double T = 1e-3;
  double dt = 1e-6;
  double tol = 1e-8;     // fixed-point stopping tolerance
  int max_iter = 50;
  double eta0 = 0.2;     // smallness cap on the acoustic data
  bool ball_auto = true;
  BallSpec ball;         // used when ball_auto is false
  double degeneracy_floor = 0.0;
  double solve_tol = 1e-10;  // inner implicit-solve tolerance
  int solve_max_iter = 500;
};

struct OutputConfig {
  std::string directory;   // empty -> "runs/<name>"
  int sample_stride = 1;   // series CSV row stride
  int fields_stride = 0;   // 0 -> final snapshot only
  double envelope_c0 = 1.0;  // audit constants multiplying the envelopes
  double envelope_c1 = 1.0;
};

struct RunConfig {
  std::string name = "run";
  GridConfig grid;
  PhysicalParams physics;
  bool reduced_model = false;  // explicit opt-in for the tau = 0 branch
  MediumConfig medium;
  DataConfig data;
  SolveConfig solve;
  OutputConfig output;

  // Throws ConfigError (with dotted field path) on any violation.
  void validate() const;

  std::shared_ptr<const BoxGrid> make_grid() const;
  CoefficientModel make_model() const;
  CoupledData make_data(const std::shared_ptr<const BoxGrid>& grid,
                        const CoefficientModel& model) const;
  FixedPointControls make_controls() const;
};

RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& cfg);

bool operator==(const RunConfig& a, const RunConfig& b);

}  // namespace jps
