// Parallel kernels against the serial reference.  The thread count comes
// from the OpenMP runtime.

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "gllab/field.hpp"
#include "gllab/kernels.hpp"

using namespace gllab;

namespace {

VectorField3 make_field(int n) {
  VectorField3 u(Grid3(n, 2.0 / (n - 1)));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (double& x : u.values()) x = d(rng);
  field::freeze_faces(u);
  return u;
}

void set_counters(benchmark::State& st, int n) {
  st.counters["nodes"] = static_cast<double>(n) * n * n;
  st.counters["nodes/s"] =
      benchmark::Counter(static_cast<double>(n) * n * n, benchmark::Counter::kIsIterationInvariantRate);
}

template <bool Parallel>
void BM_Energy(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  const VectorField3 u = make_field(n);
  for (auto _ : st) {
    const auto e = Parallel ? kernels::energy(u, 10.0) : kernels::reference::energy(u, 10.0);
    benchmark::DoNotOptimize(e);
  }
  set_counters(st, n);
}

template <bool Parallel>
void BM_Gradient(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  const VectorField3 u = make_field(n);
  std::vector<double> g(3 * u.grid().node_count());
  for (auto _ : st) {
    const double e = Parallel ? kernels::energy_gradient(u, 10.0, g) : kernels::reference::energy_gradient(u, 10.0, g);
    benchmark::DoNotOptimize(e);
    benchmark::ClobberMemory();
  }
  set_counters(st, n);
}

template <bool Parallel>
void BM_Residual(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  const VectorField3 u = make_field(n);
  std::vector<double> r(3 * u.grid().node_count());
  for (auto _ : st) {
    if (Parallel)
      kernels::gl_residual(u, 10.0, r);
    else
      kernels::reference::gl_residual(u, 10.0, r);
    benchmark::ClobberMemory();
  }
  set_counters(st, n);
}

}  // namespace

BENCHMARK(BM_Energy<true>)->Name("energy/parallel")->Arg(45)->Arg(85)->Arg(129)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Energy<false>)->Name("energy/reference")->Arg(45)->Arg(85)->Arg(129)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Gradient<true>)->Name("gradient/parallel")->Arg(45)->Arg(85)->Arg(129)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Gradient<false>)->Name("gradient/reference")->Arg(45)->Arg(85)->Arg(129)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Residual<true>)->Name("residual/parallel")->Arg(45)->Arg(85)->Arg(129)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Residual<false>)->Name("residual/reference")->Arg(45)->Arg(85)->Arg(129)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
