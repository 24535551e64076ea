#include "jps/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace jps {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& path, const std::string& msg) {
  throw ConfigError(msg, path);
}

void check_keys(const json& j, const std::string& path,
                std::initializer_list<const char*> allowed) {
  if (!j.is_object()) bad(path, "expected an object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* a : allowed)
      if (item.key() == a) {
        known = true;
        break;
      }
    if (!known) bad(path.empty() ? item.key() : path + "." + item.key(), "unknown key");
  }
}

double get_num(const json& j, const std::string& path) {
  if (!j.is_number()) bad(path, "expected a number");
  return j.get<double>();
}

int get_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) bad(path, "expected an integer");
  return j.get<int>();
}

bool get_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) bad(path, "expected a boolean");
  return j.get<bool>();
}

std::string get_str(const json& j, const std::string& path) {
  if (!j.is_string()) bad(path, "expected a string");
  return j.get<std::string>();
}

std::vector<double> get_vec_num(const json& j, const std::string& path) {
  if (!j.is_array()) bad(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(get_num(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<int> get_vec_int(const json& j, const std::string& path) {
  if (!j.is_array()) bad(path, "expected an array of integers");
  std::vector<int> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(get_int(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

// Rows of (k_1..k_d, coefficient); the row length is validated against the
// grid dimension later, in make_data.
ModeList get_mode_list(const json& j, const std::string& path) {
  if (!j.is_array()) bad(path, "expected an array of [k..., coef] rows");
  ModeList out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string row_path = path + "[" + std::to_string(i) + "]";
    const json& row = j[i];
    if (!row.is_array() || row.size() < 2) bad(row_path, "expected [k..., coef]");
    std::vector<int> k;
    for (std::size_t a = 0; a + 1 < row.size(); ++a)
      k.push_back(get_int(row[a], row_path + "[" + std::to_string(a) + "]"));
    double c = get_num(row[row.size() - 1],
                       row_path + "[" + std::to_string(row.size() - 1) + "]");
    out.emplace_back(std::move(k), c);
  }
  return out;
}

template <typename T, typename Getter>
void take(const json& j, const std::string& path, const char* key, T& dst, Getter get) {
  if (auto it = j.find(key); it != j.end())
    dst = get(*it, path.empty() ? key : path + "." + key);
}

json mode_list_json(const ModeList& m) {
  json out = json::array();
  for (const auto& [k, c] : m) {
    json row = json::array();
    for (int ki : k) row.push_back(ki);
    row.push_back(c);
    out.push_back(row);
  }
  return out;
}

void parse_grid(const json& j, GridConfig& g) {
  check_keys(j, "grid", {"dims", "lengths", "modes", "quad_interior"});
  take(j, "grid", "dims", g.dims, get_int);
  take(j, "grid", "lengths", g.lengths, get_vec_num);
  take(j, "grid", "modes", g.modes, get_vec_int);
  take(j, "grid", "quad_interior", g.quad_interior, get_vec_int);
}

void parse_physics(const json& j, PhysicalParams& p, bool& reduced) {
  check_keys(j, "physics",
             {"tau", "rho", "beta_acous", "alpha", "omega", "rho_a", "C_a", "kappa_a",
              "rho_b", "C_b", "W", "theta_a", "reduced_model"});
  take(j, "physics", "tau", p.tau, get_num);
  take(j, "physics", "rho", p.rho, get_num);
  take(j, "physics", "beta_acous", p.beta_acous, get_num);
  take(j, "physics", "alpha", p.alpha, get_num);
  take(j, "physics", "omega", p.omega, get_num);
  take(j, "physics", "rho_a", p.rho_a, get_num);
  take(j, "physics", "C_a", p.C_a, get_num);
  take(j, "physics", "kappa_a", p.kappa_a, get_num);
  take(j, "physics", "rho_b", p.rho_b, get_num);
  take(j, "physics", "C_b", p.C_b, get_num);
  take(j, "physics", "W", p.W, get_num);
  take(j, "physics", "theta_a", p.theta_a, get_num);
  take(j, "physics", "reduced_model", reduced, get_bool);
}

void parse_medium(const json& j, MediumConfig& m) {
  check_keys(j, "medium", {"c_poly", "theta_range"});
  take(j, "medium", "c_poly", m.c_poly, get_vec_num);
  if (auto it = j.find("theta_range"); it != j.end()) {
    std::vector<double> r = get_vec_num(*it, "medium.theta_range");
    if (r.size() != 2) bad("medium.theta_range", "expected [lo, hi]");
    m.theta_range = {r[0], r[1]};
  }
}

void parse_data(const json& j, DataConfig& d) {
  check_keys(j, "data",
             {"preset", "p0_amplitude", "p0_mode", "p1_amplitude", "p1_mode",
              "theta0_amplitude", "theta0_mode", "center", "width", "p0", "p1",
              "theta0", "p2"});
  take(j, "data", "preset", d.preset, get_str);
  take(j, "data", "p0_amplitude", d.p0_amplitude, get_num);
  take(j, "data", "p0_mode", d.p0_mode, get_vec_int);
  take(j, "data", "p1_amplitude", d.p1_amplitude, get_num);
  take(j, "data", "p1_mode", d.p1_mode, get_vec_int);
  take(j, "data", "theta0_amplitude", d.theta0_amplitude, get_num);
  take(j, "data", "theta0_mode", d.theta0_mode, get_vec_int);
  take(j, "data", "center", d.center, get_vec_num);
  take(j, "data", "width", d.width, get_num);
  take(j, "data", "p0", d.p0_modes, get_mode_list);
  take(j, "data", "p1", d.p1_modes, get_mode_list);
  take(j, "data", "theta0", d.theta0_modes, get_mode_list);
  if (auto it = j.find("p2"); it != j.end()) {
    if (it->is_string())
      d.p2 = get_str(*it, "data.p2");
    else {
      d.p2_modes = get_mode_list(*it, "data.p2");
      d.p2 = "modes";
    }
  }
}

void parse_solve(const json& j, SolveConfig& s) {
  check_keys(j, "solve",
             {"T", "dt", "tol", "max_iter", "eta0", "ball", "degeneracy_floor",
              "solve_tol", "solve_max_iter"});
  take(j, "solve", "T", s.T, get_num);
  take(j, "solve", "dt", s.dt, get_num);
  take(j, "solve", "tol", s.tol, get_num);
  take(j, "solve", "max_iter", s.max_iter, get_int);
  take(j, "solve", "eta0", s.eta0, get_num);
  take(j, "solve", "degeneracy_floor", s.degeneracy_floor, get_num);
  take(j, "solve", "solve_tol", s.solve_tol, get_num);
  take(j, "solve", "solve_max_iter", s.solve_max_iter, get_int);
  if (auto it = j.find("ball"); it != j.end()) {
    if (it->is_string()) {
      if (get_str(*it, "solve.ball") != "auto")
        bad("solve.ball", "expected \"auto\" or {eta, R1, R2}");
      s.ball_auto = true;
    } else {
      check_keys(*it, "solve.ball", {"eta", "R1", "R2"});
      s.ball_auto = false;
      take(*it, "solve.ball", "eta", s.ball.eta, get_num);
      take(*it, "solve.ball", "R1", s.ball.R1, get_num);
      take(*it, "solve.ball", "R2", s.ball.R2, get_num);
    }
  }
}

void parse_output(const json& j, OutputConfig& o) {
  check_keys(j, "output",
             {"directory", "sample_stride", "fields_stride", "envelope_c0",
              "envelope_c1"});
  take(j, "output", "directory", o.directory, get_str);
  take(j, "output", "sample_stride", o.sample_stride, get_int);
  take(j, "output", "fields_stride", o.fields_stride, get_int);
  take(j, "output", "envelope_c0", o.envelope_c0, get_num);
  take(j, "output", "envelope_c1", o.envelope_c1, get_num);
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  check_keys(j, "",
             {"name", "grid", "physics", "medium", "data", "solve", "output"});
  RunConfig cfg;
  take(j, "", "name", cfg.name, get_str);
  if (auto it = j.find("grid"); it != j.end()) parse_grid(*it, cfg.grid);
  if (auto it = j.find("physics"); it != j.end())
    parse_physics(*it, cfg.physics, cfg.reduced_model);
  if (auto it = j.find("medium"); it != j.end()) parse_medium(*it, cfg.medium);
  if (auto it = j.find("data"); it != j.end()) parse_data(*it, cfg.data);
  if (auto it = j.find("solve"); it != j.end()) parse_solve(*it, cfg.solve);
  if (auto it = j.find("output"); it != j.end()) parse_output(*it, cfg.output);
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& c) {
  json j;
  j["name"] = c.name;
  json& g = j["grid"];
  g["dims"] = c.grid.dims;
  g["lengths"] = c.grid.lengths;
  g["modes"] = c.grid.modes;
  if (!c.grid.quad_interior.empty()) g["quad_interior"] = c.grid.quad_interior;
  json& p = j["physics"];
  p["tau"] = c.physics.tau;
  p["rho"] = c.physics.rho;
  p["beta_acous"] = c.physics.beta_acous;
  p["alpha"] = c.physics.alpha;
  p["omega"] = c.physics.omega;
  p["rho_a"] = c.physics.rho_a;
  p["C_a"] = c.physics.C_a;
  p["kappa_a"] = c.physics.kappa_a;
  p["rho_b"] = c.physics.rho_b;
  p["C_b"] = c.physics.C_b;
  p["W"] = c.physics.W;
  p["theta_a"] = c.physics.theta_a;
  p["reduced_model"] = c.reduced_model;
  json& m = j["medium"];
  m["c_poly"] = c.medium.c_poly;
  m["theta_range"] = c.medium.theta_range;
  json& d = j["data"];
  d["preset"] = c.data.preset;
  if (c.data.preset == "mode_list") {
    d["p0"] = mode_list_json(c.data.p0_modes);
    d["p1"] = mode_list_json(c.data.p1_modes);
    d["theta0"] = mode_list_json(c.data.theta0_modes);
    if (c.data.p2 == "modes")
      d["p2"] = mode_list_json(c.data.p2_modes);
    else
      d["p2"] = c.data.p2;
  } else {
    d["p0_amplitude"] = c.data.p0_amplitude;
    d["p0_mode"] = c.data.p0_mode;
    d["p1_amplitude"] = c.data.p1_amplitude;
    d["p1_mode"] = c.data.p1_mode;
    d["theta0_amplitude"] = c.data.theta0_amplitude;
    d["theta0_mode"] = c.data.theta0_mode;
    if (c.data.preset == "gaussian_bump_projected") {
      if (!c.data.center.empty()) d["center"] = c.data.center;
      d["width"] = c.data.width;
    }
    d["p2"] = c.data.p2;
  }
  json& s = j["solve"];
  s["T"] = c.solve.T;
  s["dt"] = c.solve.dt;
  s["tol"] = c.solve.tol;
  s["max_iter"] = c.solve.max_iter;
  s["eta0"] = c.solve.eta0;
  if (c.solve.ball_auto)
    s["ball"] = "auto";
  else
    s["ball"] = {{"eta", c.solve.ball.eta}, {"R1", c.solve.ball.R1}, {"R2", c.solve.ball.R2}};
  s["degeneracy_floor"] = c.solve.degeneracy_floor;
  s["solve_tol"] = c.solve.solve_tol;
  s["solve_max_iter"] = c.solve.solve_max_iter;
  json& o = j["output"];
  if (!c.output.directory.empty()) o["directory"] = c.output.directory;
  o["sample_stride"] = c.output.sample_stride;
  o["fields_stride"] = c.output.fields_stride;
  o["envelope_c0"] = c.output.envelope_c0;
  o["envelope_c1"] = c.output.envelope_c1;
  return j.dump(2) + "\n";
}

bool operator==(const RunConfig& a, const RunConfig& b) {
  return serialize_config(a) == serialize_config(b);
}

void RunConfig::validate() const {
  if (grid.dims < 1 || grid.dims > 3) throw ConfigError("must be 1, 2 or 3", "grid.dims");
  auto dim_sized = [&](std::size_t n) { return n == static_cast<std::size_t>(grid.dims); };
  if (!dim_sized(grid.lengths.size()))
    throw ConfigError("needs one entry per dimension", "grid.lengths");
  if (!dim_sized(grid.modes.size()))
    throw ConfigError("needs one entry per dimension", "grid.modes");
  if (!grid.quad_interior.empty() && !dim_sized(grid.quad_interior.size()))
    throw ConfigError("needs one entry per dimension (or omit)", "grid.quad_interior");
  for (std::size_t i = 0; i < grid.lengths.size(); ++i)
    if (!(grid.lengths[i] > 0.0) || !std::isfinite(grid.lengths[i]))
      throw ConfigError("must be positive", "grid.lengths[" + std::to_string(i) + "]");
  for (std::size_t i = 0; i < grid.modes.size(); ++i)
    if (grid.modes[i] < 1)
      throw ConfigError("must be >= 1", "grid.modes[" + std::to_string(i) + "]");

  physics.validate();
  if (reduced_model) {
    if (physics.tau != 0.0)
      throw ConfigError("must be 0 when physics.reduced_model is set", "physics.tau");
  } else if (!(physics.tau > 0.0)) {
    throw ConfigError("must be > 0 (set physics.reduced_model for the tau = 0 branch)",
                      "physics.tau");
  }

  if (data.preset != "single_mode" && data.preset != "gaussian_bump_projected" &&
      data.preset != "mode_list")
    throw ConfigError("unknown preset \"" + data.preset + "\"", "data.preset");
  if (data.p2 != "consistent" && data.p2 != "zero" && data.p2 != "modes")
    throw ConfigError("expected \"consistent\", \"zero\" or a mode list", "data.p2");
  if (data.p2 == "modes" && data.preset != "mode_list")
    throw ConfigError("explicit p2 modes require the mode_list preset", "data.p2");
  if (data.preset == "gaussian_bump_projected") {
    if (!(data.width > 0.0)) throw ConfigError("must be positive", "data.width");
    if (!data.center.empty() && !dim_sized(data.center.size()))
      throw ConfigError("needs one entry per dimension (or omit)", "data.center");
  }

  if (!(solve.T > 0.0) || !std::isfinite(solve.T))
    throw ConfigError("must be positive", "solve.T");
  if (!(solve.dt > 0.0) || solve.dt > solve.T)
    throw ConfigError("must satisfy 0 < dt <= T", "solve.dt");
  if (!(solve.tol > 0.0)) throw ConfigError("must be positive", "solve.tol");
  if (solve.max_iter < 1) throw ConfigError("must be >= 1", "solve.max_iter");
  if (!(solve.eta0 > 0.0)) throw ConfigError("must be positive", "solve.eta0");
  if (!(solve.solve_tol > 0.0)) throw ConfigError("must be positive", "solve.solve_tol");
  if (solve.solve_max_iter < 1) throw ConfigError("must be >= 1", "solve.solve_max_iter");
  if (solve.degeneracy_floor < 0.0 || solve.degeneracy_floor >= 1.0)
    throw ConfigError("must lie in [0, 1)", "solve.degeneracy_floor");

  if (output.sample_stride < 1) throw ConfigError("must be >= 1", "output.sample_stride");
  if (output.fields_stride < 0) throw ConfigError("must be >= 0", "output.fields_stride");
  if (!(output.envelope_c0 > 0.0)) throw ConfigError("must be positive", "output.envelope_c0");
  if (!(output.envelope_c1 > 0.0)) throw ConfigError("must be positive", "output.envelope_c1");
}

std::shared_ptr<const BoxGrid> RunConfig::make_grid() const {
  return BoxGrid::make(grid.dims, grid.lengths, grid.modes, grid.quad_interior);
}

CoefficientModel RunConfig::make_model() const {
  return CoefficientModel(medium.c_poly, medium.theta_range, physics);
}

namespace {

// Flat index of the multi-index k (1-based per axis, axis 0 slowest).
Eigen::Index flat_mode(const BoxGrid& g, const std::vector<int>& k,
                       const std::string& path) {
  if (static_cast<int>(k.size()) != g.dims())
    throw ConfigError("mode needs one index per dimension", path);
  Eigen::Index flat = 0;
  for (int a = 0; a < g.dims(); ++a) {
    if (k[a] < 1 || k[a] > g.modes(a))
      throw ConfigError("mode index out of range [1, modes]", path);
    flat = flat * g.modes(a) + (k[a] - 1);
  }
  return flat;
}

SpectralField from_mode_list(const std::shared_ptr<const BoxGrid>& g, const ModeList& m,
                             const std::string& path) {
  Eigen::VectorXd coef = Eigen::VectorXd::Zero(g->num_modes());
  for (std::size_t i = 0; i < m.size(); ++i)
    coef[flat_mode(*g, m[i].first, path + "[" + std::to_string(i) + "]")] += m[i].second;
  return SpectralField(g, std::move(coef));
}

SpectralField single_mode_field(const std::shared_ptr<const BoxGrid>& g, double amp,
                                const std::vector<int>& mode, const std::string& path) {
  Eigen::VectorXd coef = Eigen::VectorXd::Zero(g->num_modes());
  std::vector<int> k(mode.begin(), mode.begin() + g->dims());
  coef[flat_mode(*g, k, path)] = amp;
  return SpectralField(g, std::move(coef));
}

}  // namespace

CoupledData RunConfig::make_data(const std::shared_ptr<const BoxGrid>& g,
                                 const CoefficientModel&) const {
  CoupledData out;
  if (data.preset == "single_mode") {
    out.p0 = single_mode_field(g, data.p0_amplitude, data.p0_mode, "data.p0_mode");
    out.p1 = single_mode_field(g, data.p1_amplitude, data.p1_mode, "data.p1_mode");
    out.theta0 =
        single_mode_field(g, data.theta0_amplitude, data.theta0_mode, "data.theta0_mode");
  } else if (data.preset == "gaussian_bump_projected") {
    std::array<double, 3> c{};
    for (int a = 0; a < g->dims(); ++a)
      c[a] = data.center.empty() ? 0.5 * g->length(a) : data.center[a];
    double w2 = 2.0 * data.width * data.width;
    auto bump = [&](const std::array<double, 3>& x) {
      double s = 0;
      for (int a = 0; a < g->dims(); ++a) s += (x[a] - c[a]) * (x[a] - c[a]);
      return std::exp(-s / w2);
    };
    SpectralField shape = project(g, bump);
    out.p0 = shape * data.p0_amplitude;
    out.p1 = shape * data.p1_amplitude;
    out.theta0 = shape * data.theta0_amplitude;
  } else {  // mode_list
    out.p0 = from_mode_list(g, data.p0_modes, "data.p0");
    out.p1 = from_mode_list(g, data.p1_modes, "data.p1");
    out.theta0 = from_mode_list(g, data.theta0_modes, "data.theta0");
  }
  if (data.p2 == "zero")
    out.p2 = SpectralField(g, Eigen::VectorXd::Zero(g->num_modes()));
  else if (data.p2 == "modes")
    out.p2 = from_mode_list(g, data.p2_modes, "data.p2");
  // "consistent": leave empty; the coupler fills the implied value.
  return out;
}

FixedPointControls RunConfig::make_controls() const {
  FixedPointControls ctl;
  ctl.tol = solve.tol;
  ctl.max_iter = solve.max_iter;
  ctl.eta0 = solve.eta0;
  if (!solve.ball_auto) ctl.ball = solve.ball;
  ctl.degeneracy_floor = solve.degeneracy_floor;
  ctl.inner.solve_tol = solve.solve_tol;
  ctl.inner.solve_max_iter = solve.solve_max_iter;
  return ctl;
}

}  // namespace jps
