// Microbenchmarks for the hot kernels: spectral transforms, node-space
// products, and the two per-step solvers.

#include <benchmark/benchmark.h>

#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "jps/diagnostics.hpp"
#include "jps/jmgt.hpp"
#include "jps/pennes.hpp"
#include "jps/spectral.hpp"

using namespace jps;

namespace {

std::shared_ptr<const BoxGrid> grid_1d(int modes) {
  return BoxGrid::make(1, {1.0}, {modes});
}

Eigen::VectorXd random_coef(Eigen::Index n, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  Eigen::VectorXd c(n);
  for (Eigen::Index i = 0; i < n; ++i) c[i] = dist(gen);
  return c;
}

void BM_to_physical(benchmark::State& state) {
  auto g = grid_1d(static_cast<int>(state.range(0)));
  const Eigen::VectorXd c = random_coef(g->num_modes(), 7);
  for (auto _ : state) benchmark::DoNotOptimize(g->to_physical(c));
  state.SetItemsProcessed(state.iterations() * g->num_modes());
}
BENCHMARK(BM_to_physical)->Arg(16)->Arg(64)->Arg(256);

void BM_to_spectral(benchmark::State& state) {
  auto g = grid_1d(static_cast<int>(state.range(0)));
  const Eigen::VectorXd v = g->to_physical(random_coef(g->num_modes(), 8));
  for (auto _ : state) benchmark::DoNotOptimize(g->to_spectral(v));
  state.SetItemsProcessed(state.iterations() * g->num_modes());
}
BENCHMARK(BM_to_spectral)->Arg(16)->Arg(64)->Arg(256);

void BM_transform_3d(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  auto g = BoxGrid::make(3, {1.0, 1.0, 1.0}, {m, m, m});
  const Eigen::VectorXd c = random_coef(g->num_modes(), 9);
  for (auto _ : state) benchmark::DoNotOptimize(g->to_physical(c));
  state.SetItemsProcessed(state.iterations() * g->num_modes());
}
BENCHMARK(BM_transform_3d)->Arg(8)->Arg(16);

void BM_pointwise_product(benchmark::State& state) {
  auto g = grid_1d(static_cast<int>(state.range(0)));
  const SpectralField u(g, random_coef(g->num_modes(), 10));
  const Eigen::VectorXd mult =
      Eigen::VectorXd::Constant(g->num_nodes(), 1.0) + 0.1 * g->node_weights();
  for (auto _ : state) benchmark::DoNotOptimize(pointwise_product(mult, u));
  state.SetItemsProcessed(state.iterations() * g->num_modes());
}
BENCHMARK(BM_pointwise_product)->Arg(16)->Arg(64)->Arg(256);

AcousticState acoustic_init(const std::shared_ptr<const BoxGrid>& g,
                            const CoefficientTrack& track) {
  AcousticState s;
  Eigen::VectorXd c = random_coef(g->num_modes(), 11);
  for (Eigen::Index k = 0; k < c.size(); ++k) c[k] /= double((k + 1) * (k + 1));
  s.p = SpectralField(g, 1e-3 * c);
  s.pt = SpectralField(g, Eigen::VectorXd::Zero(g->num_modes()));
  s.ptt = consistent_p2(s.p, s.pt, track, {});
  return s;
}

// Uniform coefficients take the mode-diagonal branch.
void BM_jmgt_step_diagonal(benchmark::State& state) {
  auto g = grid_1d(static_cast<int>(state.range(0)));
  const auto track = CoefficientTrack::constants(4.0, 0.5);
  const AcousticState init = acoustic_init(g, track);
  for (auto _ : state)
    benchmark::DoNotOptimize(jmgt_step(init, 1e-2, track, {}, 1e-3, {}));
  state.SetItemsProcessed(state.iterations() * g->num_modes());
}
BENCHMARK(BM_jmgt_step_diagonal)->Arg(16)->Arg(64)->Arg(256);

// Space-varying coefficients force the preconditioned iterative branch.
void BM_jmgt_step_iterative(benchmark::State& state) {
  auto g = grid_1d(static_cast<int>(state.range(0)));
  const auto track = CoefficientTrack::varying(
      [g](double, Eigen::VectorXd& r, Eigen::VectorXd& b) {
        r.resize(g->num_nodes());
        b.resize(g->num_nodes());
        for (int j = 0; j < g->nodes(0); ++j) {
          const double x = g->node_coord(0, j);
          r[j] = 4.0 + std::sin(3.14159265358979323846 * x);
          b[j] = 0.5 + 0.1 * x;
        }
      },
      {4.0, 5.0, 0.5, 0.6});
  const AcousticState init = acoustic_init(g, track);
  for (auto _ : state)
    benchmark::DoNotOptimize(jmgt_step(init, 1e-2, track, {}, 1e-3, {}));
  state.SetItemsProcessed(state.iterations() * g->num_modes());
}
BENCHMARK(BM_jmgt_step_iterative)->Arg(16)->Arg(64)->Arg(256);

void BM_pennes_step(benchmark::State& state) {
  auto g = grid_1d(static_cast<int>(state.range(0)));
  const PennesCoeffs c{1.0, 0.1, 0.3};
  ThermalState init;
  init.theta = SpectralField(g, random_coef(g->num_modes(), 12));
  init.theta_t = compat_theta1(init.theta, Eigen::VectorXd(), c);
  const SourceFn gsrc = [g](double t) {
    return Eigen::VectorXd::Constant(g->num_nodes(), std::cos(t)).eval();
  };
  for (auto _ : state)
    benchmark::DoNotOptimize(pennes_step(init, c, gsrc, 1e-3));
  state.SetItemsProcessed(state.iterations() * g->num_modes());
}
BENCHMARK(BM_pennes_step)->Arg(16)->Arg(64)->Arg(256);

void BM_acoustic_energies(benchmark::State& state) {
  auto g = grid_1d(static_cast<int>(state.range(0)));
  const auto track = CoefficientTrack::constants(4.0, 0.5);
  const AcousticState s = acoustic_init(g, track);
  const Eigen::VectorXd r = Eigen::VectorXd::Constant(g->num_nodes(), 4.0);
  const Eigen::VectorXd b = Eigen::VectorXd::Constant(g->num_nodes(), 0.5);
  for (auto _ : state)
    benchmark::DoNotOptimize(acoustic_energies(s, 1e-2, r, b));
  state.SetItemsProcessed(state.iterations() * g->num_modes());
}
BENCHMARK(BM_acoustic_energies)->Arg(64)->Arg(256);

}  // namespace

BENCHMARK_MAIN();
