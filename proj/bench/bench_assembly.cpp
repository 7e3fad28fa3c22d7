// Serial reference against the OpenMP kernels. Run with OMP_NUM_THREADS set.
#include <benchmark/benchmark.h>

#include "fracot/assembly.hpp"

using namespace fracot;

namespace {

Mesh line_mesh(int cells_per_unit) {
  const double h = 1.0 / cells_per_unit;
  const std::vector<Region> regs = {{kOmega, Shape::interval(-1, 1)}, {kW1, Shape::interval(1.3, 1.9)}};
  return build_mesh(enclosing_box(regs, 2.0, h), h, regs);
}

Mesh square_mesh(int cells_per_unit) {
  const double h = 1.0 / cells_per_unit;
  const std::vector<Region> regs = {{kOmega, Shape::rect(-1, -1, 1, 1)}, {kW1, Shape::rect(1.25, -0.25, 1.75, 0.25)}};
  return build_mesh(enclosing_box(regs, 1.0, h), h, regs);
}

void run_gagliardo(benchmark::State& state, const Mesh& mesh, Execution exec) {
  const PairQuadrature quad(mesh, KernelParams::standard(mesh.dim, 0.25));
  for (auto _ : state) benchmark::DoNotOptimize(gagliardo_form(quad, exec).entries.data());
  state.counters["nodes"] = mesh.num_nodes();
}

void run_conductivity(benchmark::State& state, const Mesh& mesh, Execution exec) {
  const PairQuadrature quad(mesh, KernelParams::standard(mesh.dim, 0.25));
  Eigen::VectorXd gamma(mesh.num_nodes());
  for (int i = 0; i < mesh.num_nodes(); ++i) gamma(i) = 1.0 + 0.5 * std::exp(-mesh.nodes[i][0] * mesh.nodes[i][0]);
  const Coefficients c = Coefficients::from_nodal(gamma, Eigen::VectorXd::Zero(mesh.num_nodes()));
  for (auto _ : state) benchmark::DoNotOptimize(conductivity_form(quad, c, exec).entries.data());
  state.counters["nodes"] = mesh.num_nodes();
}

void BM_Gagliardo1D(benchmark::State& state, Execution exec) {
  run_gagliardo(state, line_mesh(static_cast<int>(state.range(0))), exec);
}
void BM_Gagliardo2D(benchmark::State& state, Execution exec) {
  run_gagliardo(state, square_mesh(static_cast<int>(state.range(0))), exec);
}
void BM_Conductivity1D(benchmark::State& state, Execution exec) {
  run_conductivity(state, line_mesh(static_cast<int>(state.range(0))), exec);
}

}  // namespace

BENCHMARK_CAPTURE(BM_Gagliardo1D, serial, Execution::Serial)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Gagliardo1D, parallel, Execution::Parallel)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Gagliardo2D, serial, Execution::Serial)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Gagliardo2D, parallel, Execution::Parallel)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Conductivity1D, serial, Execution::Serial)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Conductivity1D, parallel, Execution::Parallel)->Arg(64)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
