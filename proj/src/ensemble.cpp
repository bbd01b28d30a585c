#include "gk/ensemble.hpp"

#include <omp.h>

#include <chrono>

#include "gk/errors.hpp"
#include "gk/rng.hpp"

namespace gk {

std::vector<double> EnsembleResult::column(std::size_t i, std::size_t j) const {
  std::vector<double> out;
  out.reserve(replicas.size());
  for (const auto& r : replicas) {
    if (!r.dropped) out.push_back(r.fields[i][j]);
  }
  return out;
}

ReplicaResult run_replica(const EnsembleSpec& spec, const std::vector<FieldKernel>& kernels, std::size_t index) {
  const std::uint64_t seed = replica_seed(spec.master_seed, index);
  ReplicaResult r;
  Configuration c = sample_nu_N(spec.profile, splitmix64(seed ^ 0x1ULL));
  auto record = [&](const Configuration& s) {
    std::vector<double> row(kernels.size());
    for (std::size_t j = 0; j < kernels.size(); ++j) row[j] = kernels[j].evaluate(s);
    r.fields.push_back(std::move(row));
    if (spec.keep_snapshots) r.snapshots.push_back(s);
  };
  std::vector<double> positive;
  for (double t : spec.times) {
    if (t > 0.0) positive.push_back(t);
  }
  const std::size_t zeros = spec.times.size() - positive.size();
  for (std::size_t i = 0; i < zeros; ++i) record(c);
  if (positive.empty()) return r;

  SimParams p;
  p.N = spec.N;
  p.d = spec.d;
  p.K = spec.K;
  p.t_end = positive.back();
  p.snapshot_times = positive;
  p.seed = splitmix64(seed ^ 0x2ULL);
  p.event_budget = spec.event_budget;
  try {
    const auto tr = simulate(std::move(c), p, spec.pot);
    for (const auto& s : tr.snapshots) record(s.config);
    r.stats = tr.stats;
  } catch (const BudgetExceeded& e) {
    r.dropped = true;
    r.stats.events = e.events;
  }
  return r;
}

namespace {

void finalize(EnsembleResult& out) {
  for (const auto& r : out.replicas) {
    if (r.dropped) ++out.dropped;
    out.events += r.stats.events;
  }
}

void check(const EnsembleSpec& spec) {
  if (spec.replicas < 2) throw ParameterError("ensemble: need at least 2 replicas");
  for (std::size_t i = 1; i < spec.times.size(); ++i) {
    if (spec.times[i] < spec.times[i - 1]) throw ParameterError("ensemble: times must be sorted");
  }
}

}  // namespace

EnsembleResult run_ensemble_serial(const EnsembleSpec& spec, const std::vector<FieldKernel>& kernels) {
  check(spec);
  const auto start = std::chrono::steady_clock::now();
  EnsembleResult out;
  out.replicas.resize(spec.replicas);
  for (std::size_t i = 0; i < spec.replicas; ++i) out.replicas[i] = run_replica(spec, kernels, i);
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  finalize(out);
  return out;
}

EnsembleResult run_ensemble(const EnsembleSpec& spec, const std::vector<FieldKernel>& kernels, int threads) {
  check(spec);
  const auto start = std::chrono::steady_clock::now();
  EnsembleResult out;
  out.replicas.resize(spec.replicas);
  const int nt = threads > 0 ? threads : omp_get_max_threads();
  const auto M = static_cast<long long>(spec.replicas);
#pragma omp parallel for schedule(dynamic, 1) num_threads(nt)
  for (long long i = 0; i < M; ++i) {
    out.replicas[static_cast<std::size_t>(i)] = run_replica(spec, kernels, static_cast<std::size_t>(i));
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  finalize(out);
  return out;
}

std::vector<double> evaluate_fields_serial(const std::vector<const Configuration*>& snaps,
                                           const std::vector<FieldKernel>& kernels) {
  std::vector<double> out(snaps.size() * kernels.size());
  for (std::size_t s = 0; s < snaps.size(); ++s) {
    for (std::size_t j = 0; j < kernels.size(); ++j) out[s * kernels.size() + j] = kernels[j].evaluate(*snaps[s]);
  }
  return out;
}

std::vector<double> evaluate_fields(const std::vector<const Configuration*>& snaps,
                                    const std::vector<FieldKernel>& kernels, int threads) {
  std::vector<double> out(snaps.size() * kernels.size());
  const int nt = threads > 0 ? threads : omp_get_max_threads();
  const auto total = static_cast<long long>(out.size());
  const std::size_t nk = kernels.size();
#pragma omp parallel for schedule(static) num_threads(nt)
  for (long long q = 0; q < total; ++q) {
    const auto i = static_cast<std::size_t>(q);
    out[i] = kernels[i % nk].evaluate(*snaps[i / nk]);
  }
  return out;
}

}  // namespace gk
