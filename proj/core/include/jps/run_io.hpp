#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "jps/config.hpp"
#include "jps/coupler.hpp"

namespace jps {

// Summary of one artifact directory.  Every emitted file is listed in
// manifest.json together with its FNV-1a content hash; two runs of the same
// config produce bit-identical artifacts.
struct RunArtifacts {
  std::string directory;
  IterationReport report;
};

// Artifact directory resolution: the JPS_OUTPUT_DIR environment variable
// beats cfg.output.directory, which beats "runs/<name>".
std::string resolve_output_dir(const RunConfig& cfg);

// Coupled fixed-point run plus the full artifact set: config.json,
// manifest.json, acoustic.csv, thermal.csv, energy.csv, envelope.csv,
// iteration.csv, residuals.json, SCHEMA.md, fields/*.csv, checkpoint.bin.
// `dir_override` (when nonempty) bypasses resolve_output_dir.
std::pair<CoupledTrajectory, RunArtifacts> run_single(const RunConfig& cfg,
                                                      const std::string& dir_override = "");

// Relaxation-time sweep against the tau = 0 (Westervelt-type) reference run.
// taus must be strictly decreasing and positive.  Emits sweep.csv plus one
// artifact subdirectory per run.
struct SweepRow {
  double tau = 0;
  double p_diff = 0;      // sup_t ||p_tau - p_ref||_L2
  double theta_diff = 0;  // sup_t ||Theta_tau - Theta_ref||_L2
  std::string directory;
};
std::vector<SweepRow> sweep_tau(const RunConfig& base, const std::vector<double>& taus,
                                const std::string& dir_override = "");

// Self-convergence study over a halving dt list (length >= 3): each run is
// compared against the next finer one at shared times, sup-in-time L2 on p.
// order = log2(err_i / err_{i+1}); `exact` flags zero differences.
struct ConvergenceRow {
  double dt = 0;
  double err = 0;
  double order = 0;  // meaningful from the second row on
  bool has_order = false;
  bool exact = false;
};
std::vector<ConvergenceRow> convergence_study(const RunConfig& base,
                                              const std::vector<double>& dts,
                                              const std::string& dir_override = "");

// Built-in oracle suite (closed-form references only; no config needed).
// Prints one PASS/FAIL line per check, returns overall success.
bool verify_suite(std::ostream& os);

// Final-state binary checkpoint (native-endian doubles, magic "JPSCKPT1").
void write_checkpoint(const std::string& path, const CoupledTrajectory& traj);
std::pair<AcousticState, ThermalState> read_checkpoint(
    const std::string& path, const std::shared_ptr<const BoxGrid>& grid);

// 17-significant-digit float formatting shared by all CSV writers.
std::string fmt17(double v);

// FNV-1a 64-bit content hash, hex-encoded.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace jps
