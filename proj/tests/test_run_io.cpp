#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "jps/config.hpp"
#include "jps/errors.hpp"
#include "jps/run_io.hpp"

using namespace jps;
namespace fs = std::filesystem;

namespace {

RunConfig decoupled_config(const std::string& name) {
  RunConfig c;
  c.name = name;
  c.grid.dims = 1;
  c.grid.lengths = {1.0};
  c.grid.modes = {4};
  c.physics.tau = 1e-6;
  c.physics.alpha = 0.0;
  c.physics.beta_acous = 0.0;
  c.physics.omega = 2.0 * 3.14159265358979323846 * 1e6;
  c.medium.c_poly = {1500.0};
  c.data.p0_amplitude = 1e-6;
  c.solve.T = 1e-5;
  c.solve.dt = 1e-7;
  c.solve.tol = 1e-10;
  c.solve.eta0 = 0.5;
  c.output.sample_stride = 10;
  return c;
}

RunConfig coupled_config(const std::string& name) {
  RunConfig c = decoupled_config(name);
  c.physics.alpha = 10.0;
  c.physics.beta_acous = 5.0;
  c.grid.lengths = {0.1};
  c.data.p0_amplitude = 1e-8;
  c.solve.T = 2e-6;
  c.solve.dt = 2e-8;
  c.solve.tol = 1e-9;
  c.solve.eta0 = 0.1;
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& leaf) {
  const fs::path d = fs::temp_directory_path() / "jps_test" / leaf;
  fs::remove_all(d);
  return d;
}

}  // namespace

TEST_CASE("a run emits the full artifact set with verifiable hashes") {
  const fs::path dir = fresh_dir("artifacts");
  const auto [traj, art] = run_single(decoupled_config("unit"), dir.string());

  for (const char* f :
       {"config.json", "manifest.json", "acoustic.csv", "thermal.csv", "energy.csv",
        "envelope.csv", "iteration.csv", "residuals.json", "SCHEMA.md",
        "checkpoint.bin", "fields/final_p.csv", "fields/final_theta.csv"})
    CHECK(fs::exists(dir / f));

  // Every emitted file is listed in the manifest with its content hash.
  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest["name"] == "unit");
  CHECK(manifest["floors"]["h1"].get<double>() > 0.0);
  CHECK(manifest["fixed_point"]["iterations"].get<int>() == 2);
  const auto& files = manifest["files"];
  std::size_t on_disk = 0;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string rel = fs::relative(entry.path(), dir).generic_string();
    if (rel == "manifest.json") continue;  // written last, cannot list itself
    ++on_disk;
    REQUIRE(files.contains(rel));
    CHECK(files[rel].get<std::string>() == fnv1a_hex(slurp(entry.path())));
  }
  CHECK(on_disk == files.size());

  // iteration.csv: header plus exactly two sweeps for the decoupled medium.
  std::istringstream it(slurp(dir / "iteration.csv"));
  std::string line;
  int rows = 0;
  std::getline(it, line);
  CHECK(line == "iter,ydiff,ratio,xp1,xp2,xtheta2,margin,in_ball");
  while (std::getline(it, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 2);

  // The checkpoint restores the final state bit for bit.
  auto g = decoupled_config("unit").make_grid();
  const auto [ac, th] = read_checkpoint((dir / "checkpoint.bin").string(), g);
  CHECK(ac.t == traj.ac.states.back().t);
  CHECK((ac.p.coef() - traj.ac.states.back().p.coef()).norm() == 0.0);
  CHECK((ac.ptt.coef() - traj.ac.states.back().ptt.coef()).norm() == 0.0);
  CHECK((th.theta.coef() - traj.th.states.back().theta.coef()).norm() == 0.0);

  auto wrong = BoxGrid::make(1, {1.0}, {8});
  CHECK_THROWS_AS(read_checkpoint((dir / "checkpoint.bin").string(), wrong),
                  GridMismatch);
}

TEST_CASE("reruns of one configuration are bit identical") {
  const fs::path d1 = fresh_dir("rerun_a");
  const fs::path d2 = fresh_dir("rerun_b");
  run_single(coupled_config("twin"), d1.string());
  run_single(coupled_config("twin"), d2.string());
  for (const char* f : {"manifest.json", "acoustic.csv", "energy.csv", "envelope.csv",
                        "iteration.csv", "residuals.json", "checkpoint.bin"})
    CHECK(slurp(d1 / f) == slurp(d2 / f));
}

TEST_CASE("output directory resolution order") {
  RunConfig c = decoupled_config("resolver");
  CHECK(resolve_output_dir(c) == "runs/resolver");
  c.output.directory = "elsewhere/x";
  CHECK(resolve_output_dir(c) == "elsewhere/x");
  setenv("JPS_OUTPUT_DIR", "/tmp/jps_env", 1);
  CHECK(resolve_output_dir(c) == "/tmp/jps_env/resolver");
  unsetenv("JPS_OUTPUT_DIR");
  CHECK(resolve_output_dir(c) == "elsewhere/x");
}

TEST_CASE("relaxation sweep decreases the distance to the reduced model") {
  const fs::path dir = fresh_dir("sweep");
  const RunConfig base = coupled_config("sweep");
  const std::vector<double> taus{1e-5, 1e-6, 1e-7};
  const auto rows = sweep_tau(base, taus, dir.string());

  REQUIRE(rows.size() == 3);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].tau == taus[i]);
    CHECK(rows[i].p_diff > 0.0);
    CHECK(fs::exists(fs::path(rows[i].directory) / "manifest.json"));
  }
  CHECK(rows[1].p_diff < rows[0].p_diff);
  CHECK(rows[2].p_diff < rows[1].p_diff);
  CHECK(fs::exists(dir / "sweep.csv"));
  CHECK(fs::exists(dir / "tau_ref" / "manifest.json"));

  CHECK_THROWS_AS(sweep_tau(base, {1e-6, 1e-5}, (dir / "bad").string()), ConfigError);
  CHECK_THROWS_AS(sweep_tau(base, {}, (dir / "bad").string()), ConfigError);
}

TEST_CASE("self-convergence study reports second order") {
  const fs::path dir = fresh_dir("converge");
  RunConfig base = decoupled_config("converge");
  base.grid.modes = {2};
  const auto rows = convergence_study(base, {1e-6, 5e-7, 2.5e-7}, dir.string());

  // One row per coarse/fine pair; the order column starts on the second row.
  REQUIRE(rows.size() == 2);
  CHECK_FALSE(rows[0].has_order);
  CHECK(rows[0].err > rows[1].err);
  CHECK(rows[1].has_order);
  CHECK(rows[1].order == doctest::Approx(2.0).epsilon(0.3));
  CHECK(fs::exists(dir / "converge.csv"));

  // Not a halving chain.
  CHECK_THROWS_AS(convergence_study(base, {8e-7, 3e-7, 2e-7}, (dir / "x").string()),
                  ConfigError);

  // Zero data: differences vanish identically and are flagged as exact.
  RunConfig zero = base;
  zero.name = "converge_zero";
  zero.data.p0_amplitude = 0.0;
  const auto zrows = convergence_study(zero, {1e-6, 5e-7, 2.5e-7},
                                       (dir / "zero").string());
  CHECK(zrows[0].exact);
  CHECK(zrows[0].err == 0.0);
}

TEST_CASE("built-in oracle suite passes") {
  std::ostringstream os;
  CHECK(verify_suite(os));
  CHECK(os.str().find("FAIL") == std::string::npos);
  CHECK(os.str().find("PASS") != std::string::npos);
}

TEST_CASE("formatting and hashing primitives") {
  CHECK(fmt17(0.1) == "0.10000000000000001");
  CHECK(fmt17(1.0) == "1");
  // FNV-1a 64 reference vectors.
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}
