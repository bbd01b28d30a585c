// Serial reference loops against the OpenMP kernels, plus raw simulator throughput.

#include <benchmark/benchmark.h>

#include <omp.h>

#include <vector>

#include "gk/dynamics.hpp"
#include "gk/ensemble.hpp"
#include "gk/profile.hpp"
#include "gk/rng.hpp"

using namespace gk;

namespace {

struct Fixture {
  PotentialParams pot = PotentialParams::from_gamma(0.75);
  ProfileGrid grid = solve_rho_K(pot, 64.0, 4096);
  LatticeProfile u = discrete_profile(grid, 256, 1);
  std::vector<FieldKernel> kernels;
  std::vector<Configuration> snaps;
  std::vector<const Configuration*> ptr;

  Fixture() {
    for (double a : {-0.8, -0.4, 0.0, 0.4, 0.8}) kernels.emplace_back(TestFunction::gaussian(a, 0.15), u);
    kernels.emplace_back(TestFunction::bump(0.0, 2.0), u);
    for (std::uint64_t i = 0; i < 2000; ++i) snaps.push_back(sample_nu_N(u, splitmix64(i)));
    for (const auto& s : snaps) ptr.push_back(&s);
  }

  EnsembleSpec spec(std::size_t replicas) const {
    EnsembleSpec s;
    s.N = 256;
    s.K = 64.0;
    s.pot = pot;
    s.profile = u;
    s.times = {0.0, 0.002};
    s.replicas = replicas;
    s.master_seed = 3;
    return s;
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

void BM_EnsembleSerial(benchmark::State& st) {
  const auto& f = fixture();
  const auto spec = f.spec(32);
  for (auto _ : st) benchmark::DoNotOptimize(run_ensemble_serial(spec, f.kernels).events);
  st.SetItemsProcessed(st.iterations() * 32);
}

void BM_EnsembleParallel(benchmark::State& st) {
  const auto& f = fixture();
  const auto spec = f.spec(32);
  const int threads = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(run_ensemble(spec, f.kernels, threads).events);
  st.SetItemsProcessed(st.iterations() * 32);
}

void BM_FieldsSerial(benchmark::State& st) {
  const auto& f = fixture();
  for (auto _ : st) benchmark::DoNotOptimize(evaluate_fields_serial(f.ptr, f.kernels).data());
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(f.ptr.size() * f.kernels.size()));
}

void BM_FieldsParallel(benchmark::State& st) {
  const auto& f = fixture();
  const int threads = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(evaluate_fields(f.ptr, f.kernels, threads).data());
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(f.ptr.size() * f.kernels.size()));
}

void BM_SimulatorEvents(benchmark::State& st) {
  const auto& f = fixture();
  SimParams p;
  p.N = 256;
  p.K = 64.0;
  p.t_end = 0.01;
  std::uint64_t events = 0, seed = 0;
  for (auto _ : st) {
    p.seed = ++seed;
    const auto tr = simulate(sample_nu_N(f.u, seed), p, f.pot);
    events += tr.stats.events;
  }
  st.SetItemsProcessed(static_cast<std::int64_t>(events));
}

void thread_counts(benchmark::internal::Benchmark* b) {
  for (int t = 1; t <= omp_get_num_procs(); t *= 2) b->Arg(t);
}

}  // namespace

BENCHMARK(BM_EnsembleSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EnsembleParallel)->Apply(thread_counts)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_FieldsSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FieldsParallel)->Apply(thread_counts)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SimulatorEvents)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
