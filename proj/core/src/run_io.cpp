#include "jps/run_io.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "jps/diagnostics.hpp"
#include "jps/reference.hpp"

namespace jps {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

// Writes files under one run directory and records content hashes for the
// manifest.  Emission order is fixed by call order (determinism).
struct Emitter {
  explicit Emitter(std::string d) : dir(std::move(d)) { fs::create_directories(dir); }

  void emit(const std::string& rel, const std::string& content) {
    fs::path p = fs::path(dir) / rel;
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error("cannot open for writing: " + p.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error("short write: " + p.string());
    hashes.emplace_back(rel, fnv1a_hex(content));
  }

  std::string dir;
  std::vector<std::pair<std::string, std::string>> hashes;
};

std::pair<double, double> state_margin_chi(const CoefficientModel& model,
                                           const SpectralField& theta,
                                           const SpectralField& p, double tau) {
  Eigen::VectorXd th = theta.values();
  Eigen::VectorXd pv = p.values();
  double margin = std::numeric_limits<double>::infinity();
  double chi = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < th.size(); ++j) {
    Medium med = model.eval_medium(th[j]);
    margin = std::min(margin, 1.0 - 2.0 * med.k * pv[j]);
    chi = std::min(chi, med.zeta - tau * med.h);
  }
  return {margin, chi};
}

const char* kSchema = R"(# Artifact schema

All CSV floats carry 17 significant digits (`%.17g`) for exact round-trip.
Boolean columns use 0/1; a `nan` cell means "not defined at this row"
(e.g. the contraction ratio of the first iteration).

## config.json
Echo of the run configuration (strict-JSON format accepted by the CLI).

## manifest.json
`code_version`, `name`, the config echo, certified medium floors/caps
(`h1` = min h, `zeta1` = min zeta, `k1` = beta_acous/(rho*h1),
`phi1` = max phi), implied polynomial growth exponents, the count of
temperature evaluations outside the certified range, fixed-point summary,
and `files`: every other emitted file with its 64-bit FNV-1a content hash.

## acoustic.csv
`t` — sample time.
`p_h2, pt_h2, ptt_h1` — full Sobolev norms ||p||_H2, ||p_t||_H2, ||p_tt||_H1.
`E0, E1, E` — energies 1/2(||p_t||^2 + ||sqrt(r) grad p||^2),
1/2(tau ||p_tt||^2 + ||sqrt(b) grad p_t||^2),
1/2(||sqrt(b) Lap p||^2 + ||sqrt(b) Lap p_t||^2 + tau ||grad p_tt||^2).
`D0, D` — dissipations ||sqrt(b) grad p_t||^2 + ||p_tt||^2 and
||sqrt(r) Lap p||^2 + ||grad p_tt||^2.

## thermal.csv
`t`, `theta_h2`, `theta_h3`, `theta_t_h1` — full Sobolev norms of the
temperature deviation and its time derivative.
`int_theta_h3_sq`, `int_theta_t_h2_sq` — running trapezoid integrals of
||Theta||_H3^2 and ||Theta_t||_H2^2.

## energy.csv
One row per sample: `t,E0,E1,E,D0,D,lambda0,lambda,chi_min,margin` where
`lambda0 = 1 + ||r_t||inf + ||r_t||inf^2 + ||b_t||inf + ||grad b||inf^2 +
||grad r||inf^2`, `lambda = 1 + ||b_t||inf + ||b_t||inf^2 + ||r_t||inf^2`,
`chi_min = min_x (zeta - tau h)(Theta)`, `margin = min_x (1 - 2 k(Theta) p)`.

## envelope.csv
`t` — sample time.
`measured_first` — E0(t) + E1(t) + running integral of D0.
`envelope_first` — c0 * [ (E0+E1)(0) e^{int lambda0} +
int_0^t ||f||^2 e^{int_s^t lambda0} ds ] (trapezoid).
`measured_higher` — E(t) + running integral of D.
`envelope_higher` — c1 * [ E(0) e^{int lambda} +
int_0^t (||f||^2 + ||grad f||^2) e^{int_s^t lambda} ds ].
c0, c1 are the configured audit constants (output.envelope_c0/c1).

## iteration.csv
`iter` — fixed-point iteration index (1-based).
`ydiff` — sup-in-time combined norm of the difference from the previous
iterate; `ratio` — ydiff_n / ydiff_{n-1} (nan on the first row).
`xp1, xp2, xtheta2` — solution-space norms of the iterate.
`margin` — min over space-time of 1 - 2 k(Theta) p.
`in_ball` — 1 when (xp1, xp2, xtheta2) <= (eta, R1, R2).

## residuals.json
Independent consistency check of the converged pair: time derivatives by
centered differences of the stored snapshots, spatial terms spectrally.
`abs` — sqrt(int_t ||residual||_L2^2); `scale` — the same accumulation over
the sum of squared equation terms; `rel` = abs / scale.

## fields/
Final-state spectral coefficients (`final_p.csv`, `final_pt.csv`,
`final_ptt.csv`, `final_theta.csv`, `final_theta_t.csv`) and, when
output.fields_stride > 0, strided snapshots `p_NNNNNN.csv` /
`theta_NNNNNN.csv`.  Columns: `k1,k2,k3,coef` (unused axes report 0).

## checkpoint.bin
Final-state binary dump: magic "JPSCKPT1", int32 dims, int32 modes[3],
int32 quad_interior[3], float64 lengths[3], float64 t, uint64 ncoef, then
5 * ncoef float64 coefficients (p, p_t, p_tt, theta, theta_t),
native-endian.
)";

std::string residuals_json_text(const IterationReport& rep) {
  json j;
  j["acoustic"] = {{"abs", rep.residuals.acoustic_abs},
                   {"scale", rep.residuals.acoustic_scale},
                   {"rel", rep.residuals.acoustic_rel}};
  j["thermal"] = {{"abs", rep.residuals.thermal_abs},
                  {"scale", rep.residuals.thermal_scale},
                  {"rel", rep.residuals.thermal_rel}};
  j["fixed_point"] = {{"converged", rep.converged},
                      {"iterations", rep.iterations},
                      {"ynorm", rep.ynorm_final},
                      {"margin", rep.margin},
                      {"chi_min", rep.chi_min},
                      {"ball", {{"eta", rep.ball.eta}, {"R1", rep.ball.R1}, {"R2", rep.ball.R2}}}};
  return j.dump(2) + "\n";
}

std::string checkpoint_bytes(const CoupledTrajectory& traj) {
  const AcousticState& a = traj.ac.back();
  const ThermalState& h = traj.th.back();
  const BoxGrid& g = a.p.grid();
  std::string out;
  auto put = [&out](const void* p, std::size_t n) {
    out.append(static_cast<const char*>(p), n);
  };
  out.append("JPSCKPT1", 8);
  std::int32_t dims = g.dims();
  put(&dims, 4);
  for (int i = 0; i < 3; ++i) {
    std::int32_t m = i < g.dims() ? g.modes(i) : 0;
    put(&m, 4);
  }
  for (int i = 0; i < 3; ++i) {
    std::int32_t q = i < g.dims() ? g.quad_interior(i) : 0;
    put(&q, 4);
  }
  for (int i = 0; i < 3; ++i) {
    double L = i < g.dims() ? g.length(i) : 0.0;
    put(&L, 8);
  }
  put(&a.t, 8);
  std::uint64_t n = static_cast<std::uint64_t>(g.num_modes());
  put(&n, 8);
  for (const Eigen::VectorXd* v :
       {&a.p.coef(), &a.pt.coef(), &a.ptt.coef(), &h.theta.coef(), &h.theta_t.coef()})
    put(v->data(), sizeof(double) * v->size());
  return out;
}

}  // namespace

void write_checkpoint(const std::string& path, const CoupledTrajectory& traj) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + path);
  std::string bytes = checkpoint_bytes(traj);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("short write: " + path);
}

std::pair<AcousticState, ThermalState> read_checkpoint(
    const std::string& path, const std::shared_ptr<const BoxGrid>& grid) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open checkpoint: " + path);
  auto get = [&in, &path](void* p, std::size_t n) {
    in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (!in) throw Error("truncated checkpoint: " + path);
  };
  char magic[8];
  get(magic, 8);
  if (std::memcmp(magic, "JPSCKPT1", 8) != 0)
    throw Error("bad checkpoint magic: " + path);
  std::int32_t dims, modes[3], quad[3];
  double lengths[3], t;
  get(&dims, 4);
  get(modes, 12);
  get(quad, 12);
  get(lengths, 24);
  get(&t, 8);
  if (dims != grid->dims()) throw GridMismatch("checkpoint dims differ from grid");
  for (int i = 0; i < grid->dims(); ++i) {
    if (modes[i] != grid->modes(i) || quad[i] != grid->quad_interior(i))
      throw GridMismatch("checkpoint grid resolution differs");
    if (std::abs(lengths[i] - grid->length(i)) > 1e-12 * grid->length(i))
      throw GridMismatch("checkpoint box lengths differ");
  }
  std::uint64_t n = 0;
  get(&n, 8);
  if (n != static_cast<std::uint64_t>(grid->num_modes()))
    throw GridMismatch("checkpoint coefficient count differs");
  auto field = [&] {
    Eigen::VectorXd c(static_cast<Eigen::Index>(n));
    get(c.data(), sizeof(double) * n);
    return SpectralField(grid, std::move(c));
  };
  AcousticState a;
  a.t = t;
  a.p = field();
  a.pt = field();
  a.ptt = field();
  ThermalState h;
  h.t = t;
  h.theta = field();
  h.theta_t = field();
  return {std::move(a), std::move(h)};
}

std::string resolve_output_dir(const RunConfig& cfg) {
  if (const char* env = std::getenv("JPS_OUTPUT_DIR"); env && *env)
    return std::string(env) + "/" + cfg.name;
  if (!cfg.output.directory.empty()) return cfg.output.directory;
  return "runs/" + cfg.name;
}

std::pair<CoupledTrajectory, RunArtifacts> run_single(const RunConfig& cfg,
                                                      const std::string& dir_override) {
  cfg.validate();
  auto grid = cfg.make_grid();
  CoefficientModel model = cfg.make_model();
  CoupledData data = cfg.make_data(grid, model);
  Coupler coupler(grid, model, cfg.solve.T, cfg.solve.dt);
  auto [traj, rep] = coupler.solve(data, cfg.make_controls());

  const double tau = cfg.physics.tau;
  const double T = coupler.T();
  const long n_states = static_cast<long>(traj.size());
  CoefficientTrack track = coupler.track_from(traj.th);
  SourceFn f = coupler.acoustic_source_from(traj);

  // Sampled rows: arithmetic stride plus the final state.
  std::vector<long> idx;
  for (long n = 0; n < n_states; n += cfg.output.sample_stride) idx.push_back(n);
  if (idx.back() != n_states - 1) idx.push_back(n_states - 1);

  std::string acoustic_csv = "t,p_h2,pt_h2,ptt_h1,E0,E1,E,D0,D\n";
  std::string thermal_csv = "t,theta_h2,theta_h3,theta_t_h1,int_theta_h3_sq,int_theta_t_h2_sq\n";
  std::string energy_csv = "t,E0,E1,E,D0,D,lambda0,lambda,chi_min,margin\n";
  std::string envelope_csv = "t,measured_first,envelope_first,measured_higher,envelope_higher\n";

  double int_d0 = 0, int_d = 0, int_h3 = 0, int_h2t = 0;
  double env0 = 0, env1 = 0;
  double prev_t = 0, prev_d0 = 0, prev_d = 0, prev_h3 = 0, prev_h2t = 0;
  double prev_l0 = 0, prev_l = 0, prev_f0 = 0, prev_fh = 0;
  Eigen::VectorXd r_nodes, b_nodes;

  for (std::size_t row = 0; row < idx.size(); ++row) {
    const long n = idx[row];
    const AcousticState& s = traj.ac.states[n];
    const ThermalState& h = traj.th.states[n];
    const double t = s.t;

    track.sample(*grid, t, r_nodes, b_nodes);
    EnergyReport er = acoustic_energies(s, tau, r_nodes, b_nodes);
    MonitorSample mon = coefficient_monitors(track, *grid, t, traj.ac.dt, 0.0, T);
    auto [margin, chi] = state_margin_chi(model, h.theta, s.p, tau);
    SpectralField f_field(grid, grid->to_spectral(f(t)));
    double f_l2_sq = seminorm(f_field, 0);
    f_l2_sq *= f_l2_sq;
    double f_h1_sq = seminorm(f_field, 1);
    f_h1_sq = f_l2_sq + f_h1_sq * f_h1_sq;

    double h3 = sobolev_norm(h.theta, 3);
    double h2t = sobolev_norm(h.theta_t, 2);

    if (row == 0) {
      env0 = er.E0 + er.E1;
      env1 = er.E;
    } else {
      const double dt_i = t - prev_t;
      int_d0 += 0.5 * dt_i * (prev_d0 + er.D0);
      int_d += 0.5 * dt_i * (prev_d + er.D);
      int_h3 += 0.5 * dt_i * (prev_h3 + h3 * h3);
      int_h2t += 0.5 * dt_i * (prev_h2t + h2t * h2t);
      // Stable envelope recursion: env_i = env_{i-1} e^{dA} + trapezoid(b e^{...}).
      double da0 = 0.5 * dt_i * (prev_l0 + mon.lambda0);
      env0 = env0 * std::exp(da0) + 0.5 * dt_i * (prev_f0 * std::exp(da0) + f_l2_sq);
      double da1 = 0.5 * dt_i * (prev_l + mon.lambda);
      env1 = env1 * std::exp(da1) + 0.5 * dt_i * (prev_fh * std::exp(da1) + f_h1_sq);
    }
    prev_t = t;
    prev_d0 = er.D0;
    prev_d = er.D;
    prev_h3 = h3 * h3;
    prev_h2t = h2t * h2t;
    prev_l0 = mon.lambda0;
    prev_l = mon.lambda;
    prev_f0 = f_l2_sq;
    prev_fh = f_h1_sq;

    acoustic_csv += fmt17(t) + "," + fmt17(sobolev_norm(s.p, 2)) + "," +
                    fmt17(sobolev_norm(s.pt, 2)) + "," + fmt17(sobolev_norm(s.ptt, 1)) +
                    "," + fmt17(er.E0) + "," + fmt17(er.E1) + "," + fmt17(er.E) + "," +
                    fmt17(er.D0) + "," + fmt17(er.D) + "\n";
    thermal_csv += fmt17(t) + "," + fmt17(sobolev_norm(h.theta, 2)) + "," + fmt17(h3) +
                   "," + fmt17(sobolev_norm(h.theta_t, 1)) + "," + fmt17(int_h3) + "," +
                   fmt17(int_h2t) + "\n";
    energy_csv += fmt17(t) + "," + fmt17(er.E0) + "," + fmt17(er.E1) + "," + fmt17(er.E) +
                  "," + fmt17(er.D0) + "," + fmt17(er.D) + "," + fmt17(mon.lambda0) + "," +
                  fmt17(mon.lambda) + "," + fmt17(chi) + "," + fmt17(margin) + "\n";
    envelope_csv += fmt17(t) + "," + fmt17(er.E0 + er.E1 + int_d0) + "," +
                    fmt17(cfg.output.envelope_c0 * env0) + "," + fmt17(er.E + int_d) +
                    "," + fmt17(cfg.output.envelope_c1 * env1) + "\n";
  }

  std::string iteration_csv = "iter,ydiff,ratio,xp1,xp2,xtheta2,margin,in_ball\n";
  for (const IterationRecord& r : rep.records)
    iteration_csv += std::to_string(r.iter) + "," + fmt17(r.ydiff) + "," + fmt17(r.ratio) +
                     "," + fmt17(r.xp1) + "," + fmt17(r.xp2) + "," + fmt17(r.xtheta2) +
                     "," + fmt17(r.margin) + "," + (r.in_ball ? "1" : "0") + "\n";

  std::string dir = dir_override.empty() ? resolve_output_dir(cfg) : dir_override;
  Emitter em(dir);
  em.emit("config.json", serialize_config(cfg));
  em.emit("acoustic.csv", acoustic_csv);
  em.emit("thermal.csv", thermal_csv);
  em.emit("energy.csv", energy_csv);
  em.emit("envelope.csv", envelope_csv);
  em.emit("iteration.csv", iteration_csv);
  em.emit("residuals.json", residuals_json_text(rep));
  em.emit("SCHEMA.md", kSchema);

  auto field_csv = [](const SpectralField& u) {
    std::ostringstream ss;
    write_field_csv(ss, u);
    return ss.str();
  };
  em.emit("fields/final_p.csv", field_csv(traj.ac.back().p));
  em.emit("fields/final_pt.csv", field_csv(traj.ac.back().pt));
  em.emit("fields/final_ptt.csv", field_csv(traj.ac.back().ptt));
  em.emit("fields/final_theta.csv", field_csv(traj.th.back().theta));
  em.emit("fields/final_theta_t.csv", field_csv(traj.th.back().theta_t));
  if (cfg.output.fields_stride > 0) {
    char name[64];
    for (long n = 0; n < n_states; n += cfg.output.fields_stride) {
      std::snprintf(name, sizeof name, "fields/p_%06ld.csv", n);
      em.emit(name, field_csv(traj.ac.states[n].p));
      std::snprintf(name, sizeof name, "fields/theta_%06ld.csv", n);
      em.emit(name, field_csv(traj.th.states[n].theta));
    }
  }
  em.emit("checkpoint.bin", checkpoint_bytes(traj));

  json manifest;
  manifest["code_version"] = "0.1.0";
  manifest["name"] = cfg.name;
  manifest["config"] = json::parse(serialize_config(cfg));
  const MediumBounds& mb = model.bounds();
  manifest["floors"] = {{"h1", mb.h_min},
                        {"zeta1", mb.zeta_min},
                        {"k1", model.k1()},
                        {"phi1", mb.phi_max}};
  auto ge = model.growth_exponents();
  manifest["growth_exponents"] = {ge[0], ge[1], ge[2], ge[3]};
  manifest["range_warnings"] = model.range_warnings();
  manifest["fixed_point"] = {{"converged", rep.converged},
                             {"iterations", rep.iterations},
                             {"ynorm", rep.ynorm_final},
                             {"margin", rep.margin},
                             {"chi_min", rep.chi_min}};
  json files = json::object();
  for (const auto& [name, hash] : em.hashes) files[name] = hash;
  manifest["files"] = files;
  em.emit("manifest.json", manifest.dump(2) + "\n");

  RunArtifacts art;
  art.directory = dir;
  art.report = rep;
  return {std::move(traj), std::move(art)};
}

std::vector<SweepRow> sweep_tau(const RunConfig& base, const std::vector<double>& taus,
                                const std::string& dir_override) {
  if (taus.empty()) throw ConfigError("tau list must not be empty", "sweep.taus");
  for (std::size_t i = 0; i < taus.size(); ++i) {
    if (!(taus[i] > 0.0))
      throw ConfigError("tau values must be positive", "sweep.taus");
    if (i > 0 && !(taus[i] < taus[i - 1]))
      throw ConfigError("tau list must be strictly decreasing", "sweep.taus");
  }
  base.validate();
  std::string dir =
      dir_override.empty() ? resolve_output_dir(base) + "_sweep" : dir_override;

  RunConfig ref_cfg = base;
  ref_cfg.name = base.name + "_ref";
  ref_cfg.physics.tau = 0.0;
  ref_cfg.reduced_model = true;
  auto [ref, ref_art] = run_single(ref_cfg, dir + "/tau_ref");

  std::string csv = "tau,p_diff_linf_l2,theta_diff_linf_l2,directory\n";
  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < taus.size(); ++i) {
    char sub[32];
    std::snprintf(sub, sizeof sub, "tau_%02zu", i);
    RunConfig c = base;
    c.name = base.name + "_" + sub;
    c.physics.tau = taus[i];
    auto [traj, art] = run_single(c, dir + "/" + sub);
    if (traj.size() != ref.size())
      throw MeshMismatch("sweep runs disagree on the stored mesh");
    double pd = 0, td = 0;
    for (std::size_t n = 0; n < traj.size(); ++n) {
      pd = std::max(pd,
                    (traj.ac.states[n].p.coef() - ref.ac.states[n].p.coef()).norm());
      td = std::max(
          td, (traj.th.states[n].theta.coef() - ref.th.states[n].theta.coef()).norm());
    }
    rows.push_back({taus[i], pd, td, dir + "/" + sub});
    csv += fmt17(taus[i]) + "," + fmt17(pd) + "," + fmt17(td) + "," + sub + "\n";
  }

  Emitter em(dir);
  em.emit("sweep.csv", csv);
  json manifest;
  manifest["code_version"] = "0.1.0";
  manifest["name"] = base.name + "_sweep";
  manifest["reference"] = "tau_ref";
  json files = json::object();
  for (const auto& [name, hash] : em.hashes) files[name] = hash;
  manifest["files"] = files;
  em.emit("manifest.json", manifest.dump(2) + "\n");
  return rows;
}

std::vector<ConvergenceRow> convergence_study(const RunConfig& base,
                                              const std::vector<double>& dts,
                                              const std::string& dir_override) {
  if (dts.size() < 3)
    throw ConfigError("dt list needs at least three entries", "converge.dts");
  for (std::size_t i = 0; i < dts.size(); ++i) {
    if (!(dts[i] > 0.0)) throw ConfigError("dt values must be positive", "converge.dts");
    if (i > 0 && std::abs(dts[i] - 0.5 * dts[i - 1]) > 1e-9 * dts[i - 1])
      throw ConfigError("dt list must halve at every step", "converge.dts");
  }
  base.validate();
  std::string dir =
      dir_override.empty() ? resolve_output_dir(base) + "_converge" : dir_override;

  // Keep only the p coefficient series of each run.
  std::vector<std::vector<Eigen::VectorXd>> series;
  for (std::size_t i = 0; i < dts.size(); ++i) {
    char sub[32];
    std::snprintf(sub, sizeof sub, "dt_%02zu", i);
    RunConfig c = base;
    c.name = base.name + "_" + sub;
    c.solve.dt = dts[i];
    auto [traj, art] = run_single(c, dir + "/" + sub);
    std::vector<Eigen::VectorXd> ps;
    ps.reserve(traj.size());
    for (const AcousticState& s : traj.ac.states) ps.push_back(s.p.coef());
    series.push_back(std::move(ps));
  }

  std::vector<ConvergenceRow> rows;
  std::string csv = "dt,err_vs_half,order\n";
  double prev_err = -1;
  for (std::size_t i = 0; i + 1 < dts.size(); ++i) {
    const auto& coarse = series[i];
    const auto& fine = series[i + 1];
    if (fine.size() != 2 * coarse.size() - 1)
      throw MeshMismatch("halved run does not refine the coarse mesh");
    double err = 0;
    for (std::size_t n = 0; n < coarse.size(); ++n)
      err = std::max(err, (coarse[n] - fine[2 * n]).norm());
    ConvergenceRow row;
    row.dt = dts[i];
    row.err = err;
    row.exact = err == 0.0;
    std::string order_cell;
    if (i > 0) {
      if (prev_err == 0.0 || err == 0.0) {
        order_cell = "exact";
        row.exact = true;
      } else {
        row.order = std::log2(prev_err / err);
        row.has_order = true;
        order_cell = fmt17(row.order);
      }
    }
    csv += fmt17(row.dt) + "," + fmt17(err) + "," + order_cell + "\n";
    rows.push_back(row);
    prev_err = err;
  }

  Emitter em(dir);
  em.emit("converge.csv", csv);
  json manifest;
  manifest["code_version"] = "0.1.0";
  manifest["name"] = base.name + "_converge";
  json files = json::object();
  for (const auto& [name, hash] : em.hashes) files[name] = hash;
  manifest["files"] = files;
  em.emit("manifest.json", manifest.dump(2) + "\n");
  return rows;
}

bool verify_suite(std::ostream& os) {
  bool all = true;
  auto report = [&](bool ok, const char* name, const std::string& detail) {
    os << (ok ? "PASS " : "FAIL ") << name << ": " << detail << "\n";
    if (!ok) all = false;
  };

  // Third-order single-mode solve against the exponential-superposition
  // oracle (roots from the companion matrix).
  {
    const double tau = 1e-6, r = 2.25e6, b = 2.25;
    const double T = 1e-3, dt = T / 4096;
    auto grid = BoxGrid::make(1, {1.0}, {4});
    const double lambda = grid->eigenvalues()[0];
    Eigen::VectorXd c0 = Eigen::VectorXd::Zero(grid->num_modes());
    c0[0] = 1.0;
    AcousticState init{0.0, SpectralField(grid, c0),
                       SpectralField(grid, Eigen::VectorXd::Zero(grid->num_modes())),
                       SpectralField(grid, Eigen::VectorXd::Zero(grid->num_modes()))};
    AcousticTrajectory num = jmgt_solve(init, tau, CoefficientTrack::constants(r, b),
                                        nullptr, T, dt, {});
    auto roots = mgt_characteristic_roots(tau, r, b, lambda);
    auto exact = mgt_mode_solution(roots, 1.0, 0.0, 0.0, T);
    const double w0 = std::sqrt(r * lambda);
    const AcousticState& fin = num.back();
    double num_p = fin.p.coef()[0], num_pt = fin.pt.coef()[0], num_ptt = fin.ptt.coef()[0];
    double e2 = 0, s2 = 0;
    e2 += (num_p - exact[0]) * (num_p - exact[0]);
    s2 += exact[0] * exact[0];
    e2 += ((num_pt - exact[1]) / w0) * ((num_pt - exact[1]) / w0);
    s2 += (exact[1] / w0) * (exact[1] / w0);
    e2 += ((num_ptt - exact[2]) / (w0 * w0)) * ((num_ptt - exact[2]) / (w0 * w0));
    s2 += (exact[2] / (w0 * w0)) * (exact[2] / (w0 * w0));
    double rel = std::sqrt(e2 / s2);
    report(rel <= 1e-6, "acoustic_mode_oracle", "relative error " + fmt17(rel));
  }

  // Pure-decay bioheat step is exact per mode at any dt.
  {
    auto grid = BoxGrid::make(1, {0.1}, {8});
    PennesCoeffs pc{4.18e6, 0.52, 18900.0};
    Eigen::VectorXd c0(grid->num_modes());
    for (Eigen::Index k = 0; k < c0.size(); ++k) c0[k] = 1.0 / double((k + 1) * (k + 1));
    double T = 2.0 / pc.mu(grid->eigenvalues()[0]);
    ThermalTrajectory num = pennes_solve(
        ThermalState{0.0, SpectralField(grid, c0), SpectralField()}, pc, nullptr, T, T / 64, {});
    double worst = 0;
    for (Eigen::Index k = 0; k < c0.size(); ++k) {
      double exact = c0[k] * std::exp(-pc.mu(grid->eigenvalues()[k]) * T);
      worst = std::max(worst, std::abs(num.back().theta.coef()[k] - exact) /
                                  std::max(1e-300, std::abs(exact)));
    }
    report(worst <= 1e-9, "thermal_decay_oracle", "worst mode relative error " + fmt17(worst));
  }

  // Constant-forced bioheat mode against the closed-form relaxation.
  {
    auto grid = BoxGrid::make(1, {0.1}, {4});
    PennesCoeffs pc{4.18e6, 0.52, 18900.0};
    const double lambda = grid->eigenvalues()[0];
    const double mu = pc.mu(lambda);
    const double g0 = 3.0e5;
    Eigen::VectorXd gc = Eigen::VectorXd::Zero(grid->num_modes());
    gc[0] = g0;
    SpectralField gf(grid, gc);
    Eigen::VectorXd g_nodes = gf.values();
    SourceFn g = [g_nodes](double) { return g_nodes; };
    double T = 2.0 / mu;
    long nsteps = 400;
    ThermalTrajectory num = pennes_solve(
        ThermalState{0.0, SpectralField(grid, Eigen::VectorXd::Zero(grid->num_modes())),
                     SpectralField()},
        pc, g, T, T / double(nsteps), {});
    double exact = pennes_mode_solution(pc.m, pc.kappa, pc.ell, lambda, 0.0, g0, T);
    double rel = std::abs(num.back().theta.coef()[0] - exact) / std::abs(exact);
    report(rel <= 1e-5, "thermal_forced_oracle", "relative error " + fmt17(rel));
  }

  // Quadrature product against the closed-form sine-product series.  The
  // product's own sine tail decays cubically, so the committed aliasing
  // shrinks with the quadrature resolution; 2048 interior nodes push it
  // below 1e-9.
  {
    auto grid = BoxGrid::make(1, {1.0}, {16}, {2048});
    Eigen::VectorXd c = Eigen::VectorXd::Zero(grid->num_modes());
    c[0] = 1.0;
    SpectralField u(grid, c);
    // multiplier sin(pi x) = phi_1 / sqrt(2)
    Eigen::VectorXd mult = u.values() / std::sqrt(2.0);
    SpectralField prod = pointwise_product(mult, u);
    std::vector<double> exact = sine_squared_product_coefficients(16);
    double worst = 0;
    for (int k = 0; k < 16; ++k)
      worst = std::max(worst, std::abs(prod.coef()[k] - exact[k]));
    report(worst <= 1e-9, "product_oracle", "worst coefficient error " + fmt17(worst));
  }

  // Gronwall envelope closed forms.
  {
    const int n = 20001;
    const double t_end = 1.0, dt = t_end / (n - 1);
    std::vector<double> a(n, 1.0), b(n, 0.0);
    double e1 = std::abs(gronwall_envelope(1.0, a, b, dt).back() - std::exp(1.0)) /
                std::exp(1.0);
    std::vector<double> a2(2 * n - 1, 0.0), b2(2 * n - 1, 1.0);
    double e2 =
        std::abs(gronwall_envelope(1.0, a2, b2, dt).back() - 3.0) / 3.0;
    bool ok = e1 <= 1e-8 && e2 <= 1e-12;
    report(ok, "gronwall_closed_forms",
           "exp rel err " + fmt17(e1) + ", linear rel err " + fmt17(e2));
  }

  // Coefficient monitors on hand-computable tracks.
  {
    auto grid = BoxGrid::make(1, {1.0}, {8});
    auto lin = CoefficientTrack::uniform(
        [](double t) { return std::array<double, 2>{1.0 + t, 2.0}; },
        {1.0, 3.0, 2.0, 2.0});
    MonitorSample m1 = coefficient_monitors(lin, *grid, 0.5, 1e-3, 0.0, 2.0);
    double err1 = std::abs(m1.lambda0 - 3.0) + std::abs(m1.lambda - 2.0);

    auto stat = CoefficientTrack::varying(
        [grid](double, Eigen::VectorXd& r, Eigen::VectorXd& b) {
          r.setOnes(grid->num_nodes());
          b.resize(grid->num_nodes());
          for (Eigen::Index j = 0; j < grid->num_nodes(); ++j) {
            auto x = grid->node_point(j);
            b[j] = 2.0 + std::sin(M_PI * x[0]);
          }
        },
        {1.0, 1.0, 2.0, 3.0},
        [grid](double, int, Eigen::VectorXd& dr, Eigen::VectorXd& db) {
          dr.setZero(grid->num_nodes());
          db.resize(grid->num_nodes());
          for (Eigen::Index j = 0; j < grid->num_nodes(); ++j) {
            auto x = grid->node_point(j);
            db[j] = M_PI * std::cos(M_PI * x[0]);
          }
        });
    MonitorSample m2 = coefficient_monitors(stat, *grid, 0.5, 1e-3, 0.0, 1.0);
    double err2 = std::abs(m2.lambda0 - (1.0 + M_PI * M_PI)) + std::abs(m2.lambda - 1.0);
    bool ok = err1 <= 1e-9 && err2 <= 1e-9;
    report(ok, "monitor_hand_values", "errors " + fmt17(err1) + ", " + fmt17(err2));
  }

  os << (all ? "verify: all checks passed\n" : "verify: FAILURES present\n");
  return all;
}

}  // namespace jps
