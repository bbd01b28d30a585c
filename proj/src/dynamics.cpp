#include "gk/dynamics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "gk/errors.hpp"

namespace gk {

void SimParams::validate() const {
  if (N < 1 || d < 1 || d > 2) throw ParameterError("SimParams: need N >= 1 and d in {1,2}");
  if (K < 0) throw ParameterError("SimParams: K must be nonnegative");
  if (!(t_end > 0)) throw ParameterError("SimParams: t_end must be positive");
  for (std::size_t i = 0; i < snapshot_times.size(); ++i) {
    const double s = snapshot_times[i];
    if (s < 0 || s > t_end) throw ParameterError("SimParams: snapshot time outside [0, t_end]");
    if (i > 0 && s < snapshot_times[i - 1]) throw ParameterError("SimParams: snapshot times must be sorted");
  }
}

Simulator::Simulator(Configuration c, const SimParams& p, double gamma)
    : c_(std::move(c)),
      t_(c_.torus()),
      bond_rate_(p.bond_rate()),
      K_(p.K),
      budget_(p.event_budget),
      rng_(p.seed),
      bonds_(c_.sites() * static_cast<std::size_t>(t_.d)),
      nstride_(2 * static_cast<std::size_t>(t_.d)) {
  if (c_.sites() > std::numeric_limits<std::int32_t>::max() / 4) throw SizeError("Simulator: lattice too large");
  const auto table = c0_rate_table(gamma);
  const double cmax = *std::max_element(table.begin(), table.end());
  for (unsigned w = 0; w < 8; ++w) {
    rates_[w] = K_ * table[w];
    accept_[w] = cmax > 0 ? table[w] / cmax : 0.0;
  }
  proposal_rate_ = K_ * cmax * static_cast<double>(c_.sites());
  nbr_.resize(c_.sites() * nstride_);
  const auto d = static_cast<std::size_t>(t_.d);
  for (std::size_t x = 0; x < c_.sites(); ++x) {
    for (int j = 0; j < t_.d; ++j) {
      const auto jj = static_cast<std::size_t>(j);
      nbr_[x * nstride_ + 2 * jj] = static_cast<std::uint32_t>(t_.neighbor(x, j, -1));
      nbr_[x * nstride_ + 2 * jj + 1] = static_cast<std::uint32_t>(t_.neighbor(x, j, +1));
    }
  }
  for (std::size_t x = 0; x < c_.sites(); ++x) {
    for (int j = 0; j < t_.d; ++j) {
      if (c_.occupied(x) != c_.occupied(nb(x, j, +1))) {
        bonds_.insert(static_cast<std::uint32_t>(x * d + static_cast<std::size_t>(j)));
      }
    }
  }
  draw_next();
}

unsigned Simulator::window(std::size_t x) const {
  const unsigned l = c_.occupied(nb(x, 0, -1)) ? 4U : 0U;
  const unsigned m = c_.occupied(x) ? 2U : 0U;
  const unsigned r = c_.occupied(nb(x, 0, +1)) ? 1U : 0U;
  return l | m | r;
}

void Simulator::flip_site(std::size_t x) {
  c_.flip(x);
  const auto d = static_cast<std::size_t>(t_.d);
  for (int j = 0; j < t_.d; ++j) {
    const auto jj = static_cast<std::size_t>(j);
    bonds_.toggle(static_cast<std::uint32_t>(x * d + jj));
    bonds_.toggle(static_cast<std::uint32_t>(nb(x, j, -1) * d + jj));
  }
}

double Simulator::total_rate() const {
  double g = 0.0;
  for (std::size_t x = 0; x < c_.sites(); ++x) g += rates_[window(x)];
  return cached_exchange_rate() + g;
}

double Simulator::recomputed_exchange_rate() const {
  std::size_t n = 0;
  for (std::size_t x = 0; x < c_.sites(); ++x) {
    for (int j = 0; j < t_.d; ++j) n += c_.occupied(x) != c_.occupied(t_.neighbor(x, j, +1));
  }
  return bond_rate_ * static_cast<double>(n);
}

void Simulator::draw_next() {
  clock_rate_ = cached_exchange_rate() + proposal_rate_;
  next_ = (clock_rate_ > 0) ? time_ + static_cast<long double>(rng_.exponential(clock_rate_))
                            : std::numeric_limits<long double>::infinity();
}

EventKind Simulator::step(long double* when) {
  if (std::isinf(next_)) throw std::runtime_error("Simulator::step: absorbing state, no events");
  time_ = next_;
  if (when) *when = time_;
  const double ex = cached_exchange_rate();
  const double u = rng_.uniform() * clock_rate_;
  EventKind kind;
  if (u < ex) {
    const std::uint32_t b = bonds_[rng_.below(bonds_.size())];
    const auto d = static_cast<std::uint32_t>(t_.d);
    const std::size_t x = b / d;
    const int j = static_cast<int>(b % d);
    const std::size_t y = nb(x, j, +1);
    // Toggle every bond incident to x or y once per incidence, skipping the
    // bond b itself (incident twice, so its status is unchanged).
    c_.flip(x);
    c_.flip(y);
    const auto dd = static_cast<std::size_t>(t_.d);
    for (int k = 0; k < t_.d; ++k) {
      const auto kk = static_cast<std::size_t>(k);
      if (k != j) {
        bonds_.toggle(static_cast<std::uint32_t>(x * dd + kk));
        bonds_.toggle(static_cast<std::uint32_t>(nb(y, k, -1) * dd + kk));
      }
      bonds_.toggle(static_cast<std::uint32_t>(nb(x, k, -1) * dd + kk));
      bonds_.toggle(static_cast<std::uint32_t>(y * dd + kk));
    }
    ++stats_.exchanges;
    kind = EventKind::Exchange;
  } else {
    const std::size_t x = rng_.below(c_.sites());
    if (rng_.uniform() < accept_[window(x)]) {
      flip_site(x);
      ++stats_.flips;
      kind = EventKind::Flip;
    } else {
      ++rejected_;
      kind = EventKind::Rejected;
    }
  }
  if (kind != EventKind::Rejected) ++stats_.events;
  draw_next();
  return kind;
}

void Simulator::advance_to(long double t) {
  while (next_ <= t) {
    if (budget_ && stats_.events >= budget_) {
      std::ostringstream os;
      os << "event budget of " << budget_ << " exhausted at t = " << static_cast<double>(time_)
         << " (target " << static_cast<double>(t) << ")";
      throw BudgetExceeded(os.str(), static_cast<double>(time_), stats_.events);
    }
    step();
  }
  if (t > time_) time_ = t;
}

Trajectory simulate(Configuration c, const SimParams& p, const PotentialParams& pot) {
  p.validate();
  if (c.torus().N != p.N || c.torus().d != p.d) throw ParameterError("simulate: configuration does not match N, d");
  const auto start = std::chrono::steady_clock::now();
  Simulator sim(std::move(c), p, pot.gamma);
  Trajectory tr;
  tr.snapshots.reserve(p.snapshot_times.size());
  for (double s : p.snapshot_times) {
    sim.advance_to(s);
    tr.snapshots.push_back({s, sim.state()});
  }
  sim.advance_to(p.t_end);
  tr.final_state = sim.state();
  tr.stats = sim.stats();
  tr.stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return tr;
}

InvariantMeasureReport invariant_measure_check(const SimParams& pin, double rho, std::size_t samples) {
  if (pin.K != 0.0) throw ParameterError("invariant_measure_check: requires K = 0");
  if (samples < 2) throw ParameterError("invariant_measure_check: need at least 2 samples");
  SimParams p = pin;
  p.snapshot_times.clear();
  p.validate();
  const Torus t(p.N, p.d);
  const auto u = LatticeProfile::constant(p.N, p.d, rho);
  Simulator sim(sample_nu_N(u, p.seed ^ 0x5bd1e995ULL), p, 0.0);
  const std::size_t S = t.sites();
  std::vector<double> s1(S, 0.0), s2(S, 0.0);
  double dens = 0.0, two = 0.0;
  for (std::size_t k = 0; k < samples; ++k) {
    sim.advance_to(static_cast<long double>(p.t_end) * static_cast<long double>(k) / (samples - 1));
    const auto& c = sim.state();
    dens += static_cast<double>(c.count()) / static_cast<double>(S);
    double tp = 0.0;
    for (std::size_t x = 0; x < S; ++x) {
      const int e = c.eta(x);
      tp += e * c.eta(t.neighbor(x, 0, +1));
      s1[x] += e;
      s2[x] += e;
    }
    two += tp / static_cast<double>(S);
  }
  const double T = static_cast<double>(samples);
  double var = 0.0;
  for (std::size_t x = 0; x < S; ++x) {
    const double m = s1[x] / T;
    var += (s2[x] - T * m * m) / (T - 1);
  }
  InvariantMeasureReport r;
  r.rho = rho;
  r.samples = samples;
  r.density = dens / T;
  r.two_point = two / T;
  r.variance = var / static_cast<double>(S);
  const double c = chi(rho);
  const double Sd = static_cast<double>(S);
  r.density_band = 4.0 * std::sqrt(c / Sd);
  r.two_point_band = 4.0 * std::sqrt((rho * rho * (1 - rho * rho) + 2 * rho * rho * rho * (1 - rho)) / Sd);
  r.variance_band = 4.0 * std::sqrt(c / Sd) + 1.0 / T;
  r.within_bands = std::abs(r.density - rho) <= r.density_band &&
                   std::abs(r.two_point - rho * rho) <= r.two_point_band &&
                   std::abs(r.variance - c) <= r.variance_band;
  return r;
}

}  // namespace gk
