#pragma once

// Replica ensembles: independent runs from nu^N with fields evaluated at the
// observation times. The OpenMP schedule and the serial loop produce the same
// per-replica results because every replica draws from its own seed.

#include <cstdint>
#include <vector>

#include "gk/dynamics.hpp"
#include "gk/fields.hpp"

namespace gk {

struct EnsembleSpec {
  int N = 0;
  int d = 1;
  double K = 0.0;
  PotentialParams pot;
  LatticeProfile profile;
  std::vector<double> times;  // sorted, may start at 0
  std::size_t replicas = 0;
  std::uint64_t master_seed = 0;
  std::uint64_t event_budget = 0;
  bool keep_snapshots = false;
};

struct ReplicaResult {
  bool dropped = false;
  /// fields[i][j] = X_{t_i}(F_j)
  std::vector<std::vector<double>> fields;
  std::vector<Configuration> snapshots;  // only with keep_snapshots
  EventStats stats;
};

struct EnsembleResult {
  std::vector<ReplicaResult> replicas;
  std::size_t dropped = 0;
  double seconds = 0.0;
  std::uint64_t events = 0;

  /// Field values of the kept replicas at time index i for function j.
  std::vector<double> column(std::size_t i, std::size_t j) const;
};

ReplicaResult run_replica(const EnsembleSpec& spec, const std::vector<FieldKernel>& kernels, std::size_t index);

/// Reference loop over replicas on the calling thread.
EnsembleResult run_ensemble_serial(const EnsembleSpec& spec, const std::vector<FieldKernel>& kernels);
/// Replicas distributed over `threads` OpenMP workers (0 = runtime default) with dynamic scheduling.
EnsembleResult run_ensemble(const EnsembleSpec& spec, const std::vector<FieldKernel>& kernels, int threads = 0);

/// Field values for every (snapshot, kernel) pair; serial and parallel versions.
std::vector<double> evaluate_fields_serial(const std::vector<const Configuration*>& snaps,
                                           const std::vector<FieldKernel>& kernels);
std::vector<double> evaluate_fields(const std::vector<const Configuration*>& snaps,
                                    const std::vector<FieldKernel>& kernels, int threads = 0);

}  // namespace gk
