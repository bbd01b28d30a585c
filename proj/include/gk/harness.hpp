#pragma once

// Experiment configuration, ensemble covariance reports against the limit
// theory, persistence, and the shape and normality report.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gk/ensemble.hpp"
#include "gk/fields.hpp"
#include "json.hpp"

namespace gk {

struct ExperimentConfig {
  static constexpr int kSchemaVersion = 1;
  int schema_version = kSchemaVersion;
  std::string name = "experiment";
  double gamma = 0.75;
  int N = 512;
  int d = 1;
  double K = 64.0;
  std::size_t profile_grid = 8192;
  std::vector<TestFunction> functions;
  std::vector<double> times;
  std::size_t replicas = 400;
  std::uint64_t seed = 1;
  std::uint64_t event_budget = 0;
  int threads = 0;
  std::string output_dir;

  void validate() const;
  std::string to_yaml() const;
  static ExperimentConfig from_yaml(const std::string& text);
  static ExperimentConfig load(const std::string& path);
  void save(const std::string& path) const;
};

/// The directory reports are written to: `output_dir`, placed under
/// $GK_OUTPUT_ROOT when that is set and `output_dir` is relative.
std::string resolve_output_dir(const std::string& output_dir);

struct CovarianceEntry {
  std::string F, G;
  double s = 0.0, t = 0.0;
  double empirical = 0.0;
  double se = 0.0;
  double theory = 0.0;
  /// "product" for the exact nu^N value at s = t = 0, "limit" otherwise.
  std::string theory_kind;
  double z = 0.0;
};

struct MeanEntry {
  std::string F;
  double t = 0.0;
  double mean = 0.0;
  double se = 0.0;
  double z = 0.0;
};

struct CovarianceReport {
  std::string name;
  std::vector<CovarianceEntry> entries;
  std::vector<MeanEntry> means;
  std::size_t replicas = 0;
  std::size_t dropped = 0;
  bool drop_flag = false;  // more than 5% of the replicas dropped
  double seconds = 0.0;
  double events_per_second = 0.0;
  double varpi = 0.0;

  /// Fraction of the t = 0 diagonal entries with |z| <= 3.
  double initial_pass_fraction() const;
  /// Fraction of the mean entries with |z| <= 3.
  double mean_pass_fraction() const;
  nlohmann::json to_json(bool with_timestamp = true) const;
  void write_csv(const std::string& path) const;
};

struct ExperimentResult {
  CovarianceReport report;
  EnsembleResult ensemble;
  LatticeProfile profile;
  std::vector<FieldKernel> kernels;
};

/// Runs the ensemble and compares covariances with the theory. All entries
/// (F, G, s, t) with s <= t are reported, F <= G when s = t.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Writes report.json, covariance.csv, fields.csv and config.yaml to the resolved output directory.
void persist(const ExperimentConfig& cfg, const ExperimentResult& r);

struct ShapeReport {
  std::vector<double> centers;
  std::vector<double> measured;   // Cov(X(F_a), X(F_0))
  std::vector<double> predicted;  // varpi t <F_a, e> <F_0, e>
  double correlation = 0.0;
  double ci_lo = 0.0, ci_hi = 0.0;
  /// D'Agostino K^2 on the values of the reference field.
  double normality_p = 0.0;
  /// Var(null) / Var(aligned), if a null function was given.
  std::optional<double> null_ratio;
};

/// `family[k]` holds the replica values of X_t(F_{a_k}); `reference` selects F_0.
ShapeReport normality_and_shape_report(const std::vector<std::vector<double>>& family,
                                       const std::vector<double>& centers, const std::vector<double>& predicted,
                                       std::size_t reference, const std::vector<double>* null_values = nullptr,
                                       const std::vector<double>* aligned_values = nullptr);

struct SuiteCheck {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// The exact-identity suite: generator adjoint, cylinder expansions, flows,
/// two-block decomposition and the l_N sequences.
std::vector<SuiteCheck> identity_suite(std::uint64_t seed = 20240917);
nlohmann::json suite_json(const std::vector<SuiteCheck>& checks);

}  // namespace gk
