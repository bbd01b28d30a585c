#pragma once

// Exact event-driven simulation of N^2 (exchange) + K (Glauber) dynamics.

#include <array>
#include <cstdint>
#include <string>
#include <stdexcept>
#include <vector>

#include "gk/lattice.hpp"
#include "gk/potential.hpp"
#include "gk/rng.hpp"

namespace gk {

struct SimParams {
  int N = 0;
  int d = 1;
  double K = 0.0;
  /// Rate per disagreeing bond; negative means N^2. Zero disables exchanges.
  double exchange_rate = -1.0;
  double t_end = 0.0;
  std::vector<double> snapshot_times;
  std::uint64_t seed = 0;
  /// Maximum number of events; 0 means unlimited.
  std::uint64_t event_budget = 0;

  double bond_rate() const { return exchange_rate < 0 ? static_cast<double>(N) * N : exchange_rate; }
  void validate() const;
};

struct EventStats {
  std::uint64_t events = 0;
  std::uint64_t exchanges = 0;
  std::uint64_t flips = 0;
  double seconds = 0.0;
  double events_per_second() const { return seconds > 0 ? static_cast<double>(events) / seconds : 0.0; }
};

struct BudgetExceeded : std::runtime_error {
  BudgetExceeded(const std::string& what, double t, std::uint64_t ev)
      : std::runtime_error(what), time_reached(t), events(ev) {}
  double time_reached;
  std::uint64_t events;
};

/// Set of integer ids with O(1) insert, erase and uniform access.
class IndexedSet {
 public:
  explicit IndexedSet(std::size_t universe = 0) : pos_(universe, -1) {}
  bool contains(std::uint32_t v) const { return pos_[v] >= 0; }
  void insert(std::uint32_t v) {
    pos_[v] = static_cast<std::int32_t>(items_.size());
    items_.push_back(v);
  }
  void erase(std::uint32_t v) {
    const auto p = static_cast<std::size_t>(pos_[v]);
    const std::uint32_t last = items_.back();
    items_[p] = last;
    pos_[last] = static_cast<std::int32_t>(p);
    items_.pop_back();
    pos_[v] = -1;
  }
  void toggle(std::uint32_t v) {
    if (contains(v)) {
      erase(v);
    } else {
      insert(v);
    }
  }
  std::size_t size() const { return items_.size(); }
  std::uint32_t operator[](std::size_t i) const { return items_[i]; }

 private:
  std::vector<std::int32_t> pos_;
  std::vector<std::uint32_t> items_;
};

enum class EventKind { Exchange, Flip, Rejected };

/// Exact simulator. Exchanges are drawn without rejection from the set of
/// disagreeing bonds. Flips are drawn by thinning: proposals arrive at the
/// uniform dominating rate K c_max per site and are accepted with
/// probability c0(window) / c_max.
class Simulator {
 public:
  Simulator(Configuration c, const SimParams& p, double gamma);

  const Configuration& state() const { return c_; }
  long double time() const { return time_; }
  const EventStats& stats() const { return stats_; }
  std::uint64_t rejected() const { return rejected_; }

  /// Apply every event with time <= t; the state afterwards is the state at time t.
  void advance_to(long double t);
  /// Perform the next clock ring (possibly a rejected flip proposal).
  EventKind step(long double* when = nullptr);

  /// Rate of the clock driving the simulation (exchanges plus flip proposals).
  double clock_rate() const { return clock_rate_; }
  /// Exact total jump rate N^2 |B| + K sum_x c0(tau_x eta) of the current state.
  double total_rate() const;
  /// Recount of the disagreeing bonds from the bits.
  double recomputed_exchange_rate() const;
  double cached_exchange_rate() const { return bond_rate_ * static_cast<double>(bonds_.size()); }
  std::size_t disagreeing_bonds() const { return bonds_.size(); }

 private:
  std::size_t nb(std::size_t x, int j, int s) const {
    return nbr_[x * nstride_ + 2 * static_cast<std::size_t>(j) + (s > 0 ? 1 : 0)];
  }
  unsigned window(std::size_t x) const;
  void flip_site(std::size_t x);
  void draw_next();

  Configuration c_;
  Torus t_;
  double bond_rate_;
  double K_;
  std::array<double, 8> accept_{};
  std::array<double, 8> rates_{};
  double proposal_rate_;
  double clock_rate_ = 0.0;
  std::uint64_t budget_;
  Rng rng_;
  IndexedSet bonds_;
  std::vector<std::uint32_t> nbr_;
  std::size_t nstride_;
  long double time_ = 0.0L;
  long double next_ = 0.0L;
  EventStats stats_;
  std::uint64_t rejected_ = 0;
};

struct Snapshot {
  double time = 0.0;
  Configuration config;
};

struct Trajectory {
  std::vector<Snapshot> snapshots;
  Configuration final_state;
  EventStats stats;
};

/// Runs one replica and records the state at each snapshot time.
Trajectory simulate(Configuration c, const SimParams& p, const PotentialParams& pot);

struct InvariantMeasureReport {
  double rho = 0.0;
  double density = 0.0, density_band = 0.0;
  double two_point = 0.0, two_point_band = 0.0;
  double variance = 0.0, variance_band = 0.0;
  std::size_t samples = 0;
  bool within_bands = false;
};

/// Pure exchange dynamics from nu_rho, sampled at `samples` equally spaced times over [0, t_end].
/// Bands are 4 standard errors computed from the batch spread of the time series.
InvariantMeasureReport invariant_measure_check(const SimParams& p, double rho, std::size_t samples);

}  // namespace gk
