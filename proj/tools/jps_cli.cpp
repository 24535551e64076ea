// Command-line front end: run / sweep-tau / converge / verify.
// Exit codes: 0 success, 2 configuration, 3 degeneracy, 4 no contraction,
// 5 any other numeric failure.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "jps/run_io.hpp"

namespace {

int dispatch(const std::function<void()>& body) {
  try {
    body();
    return 0;
  } catch (const jps::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const jps::DegeneracyLost& e) {
    std::cerr << "degeneracy lost: " << e.what() << "\n";
    return 3;
  } catch (const jps::NoContraction& e) {
    std::cerr << "no contraction: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 5;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral solver for coupled nonlinear acoustics and bioheat transport"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::vector<double> taus, dts;

  CLI::App* cmd_run = app.add_subcommand("run", "Coupled fixed-point run from a config");
  cmd_run->add_option("config", config_path, "JSON config path")->required();
  cmd_run->add_option("--output-dir", out_dir, "override the artifact directory");

  CLI::App* cmd_sweep =
      app.add_subcommand("sweep-tau", "Relaxation-time sweep against the tau=0 reference");
  cmd_sweep->add_option("config", config_path, "JSON config path")->required();
  cmd_sweep->add_option("--taus", taus, "strictly decreasing positive tau values")
      ->required()
      ->expected(-1);
  cmd_sweep->add_option("--output-dir", out_dir, "override the artifact directory");

  CLI::App* cmd_conv =
      app.add_subcommand("converge", "Self-convergence study over a halving dt list");
  cmd_conv->add_option("config", config_path, "JSON config path")->required();
  cmd_conv->add_option("--dts", dts, "halving dt sequence (>= 3 entries)")
      ->required()
      ->expected(-1);
  cmd_conv->add_option("--output-dir", out_dir, "override the artifact directory");

  CLI::App* cmd_verify = app.add_subcommand("verify", "Run the built-in oracle suite");

  CLI11_PARSE(app, argc, argv);

  if (cmd_run->parsed()) {
    return dispatch([&] {
      jps::RunConfig cfg = jps::load_config(config_path);
      auto [traj, art] = jps::run_single(cfg, out_dir);
      std::cout << "run complete: " << art.directory << "\n"
                << "  iterations " << art.report.iterations << ", ynorm "
                << jps::fmt17(art.report.ynorm_final) << ", margin "
                << jps::fmt17(art.report.margin) << "\n"
                << "  residual rel acoustic "
                << jps::fmt17(art.report.residuals.acoustic_rel) << ", thermal "
                << jps::fmt17(art.report.residuals.thermal_rel) << "\n";
    });
  }
  if (cmd_sweep->parsed()) {
    return dispatch([&] {
      jps::RunConfig cfg = jps::load_config(config_path);
      auto rows = jps::sweep_tau(cfg, taus, out_dir);
      std::cout << "tau,p_diff_linf_l2,theta_diff_linf_l2\n";
      for (const auto& r : rows)
        std::cout << jps::fmt17(r.tau) << "," << jps::fmt17(r.p_diff) << ","
                  << jps::fmt17(r.theta_diff) << "\n";
    });
  }
  if (cmd_conv->parsed()) {
    return dispatch([&] {
      jps::RunConfig cfg = jps::load_config(config_path);
      auto rows = jps::convergence_study(cfg, dts, out_dir);
      std::cout << "dt,err_vs_half,order\n";
      for (const auto& r : rows) {
        std::cout << jps::fmt17(r.dt) << "," << jps::fmt17(r.err) << ",";
        if (r.exact && !r.has_order)
          std::cout << "exact";
        else if (r.has_order)
          std::cout << jps::fmt17(r.order);
        std::cout << "\n";
      }
    });
  }
  if (cmd_verify->parsed()) {
    return dispatch([&] {
      if (!jps::verify_suite(std::cout)) throw jps::Error("oracle suite failed");
    });
  }
  return 0;
}
