#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <map>
#include <numbers>
#include <vector>

#include "gk/dynamics.hpp"
#include "gk/errors.hpp"
#include "gk/generator.hpp"
#include "gk/rng.hpp"
#include "gk/stats.hpp"

using namespace gk;

namespace {

const PotentialParams P75 = PotentialParams::from_gamma(0.75);

SimParams params(int N, int d, double K, double t_end, std::uint64_t seed) {
  SimParams p;
  p.N = N;
  p.d = d;
  p.K = K;
  p.t_end = t_end;
  p.seed = seed;
  return p;
}

LatticeProfile wave_profile(int N) {
  std::vector<double> v(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i) v[static_cast<std::size_t>(i)] = 0.5 + 0.35 * std::cos(2 * std::numbers::pi * i / N + 0.3);
  return LatticeProfile(N, 1, 4.0, v);
}

// Pearson chi-squared of empirical counts against a law; cells with expected count < 5 are pooled.
double chi2_p_value(const std::vector<double>& counts, const Eigen::VectorXd& law, double total) {
  double stat = 0.0, pooled_obs = 0.0, pooled_exp = 0.0;
  int cells = 0;
  for (Eigen::Index s = 0; s < law.size(); ++s) {
    const double e = law(s) * total;
    if (e < 5.0) {
      pooled_obs += counts[static_cast<std::size_t>(s)];
      pooled_exp += e;
      continue;
    }
    stat += (counts[static_cast<std::size_t>(s)] - e) * (counts[static_cast<std::size_t>(s)] - e) / e;
    ++cells;
  }
  if (pooled_exp > 0) {
    stat += (pooled_obs - pooled_exp) * (pooled_obs - pooled_exp) / pooled_exp;
    ++cells;
  }
  boost::math::chi_squared dist(cells - 1);
  return boost::math::cdf(boost::math::complement(dist, stat));
}

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("parameter validation") {
  auto p = params(8, 1, 1.0, 1.0, 1);
  CHECK_NOTHROW(p.validate());
  p.t_end = 0.0;
  CHECK_THROWS_AS(p.validate(), ParameterError);
  p = params(8, 3, 1.0, 1.0, 1);
  CHECK_THROWS_AS(p.validate(), ParameterError);
  p = params(8, 1, -1.0, 1.0, 1);
  CHECK_THROWS_AS(p.validate(), ParameterError);
  p = params(8, 1, 1.0, 1.0, 1);
  p.snapshot_times = {0.5, 0.2};
  CHECK_THROWS_AS(p.validate(), ParameterError);
  p.snapshot_times = {0.5, 1.5};
  CHECK_THROWS_AS(p.validate(), ParameterError);
  const auto c = sample_nu_N(LatticeProfile::constant(8, 1, 0.5), 1);
  CHECK_THROWS_AS(simulate(c, params(9, 1, 1.0, 1.0, 1), P75), ParameterError);
  CHECK(params(8, 1, 1, 1, 1).bond_rate() == 64.0);
}

TEST_CASE("pure exchange conserves the particle number") {
  for (int d : {1, 2}) {
    const int N = d == 1 ? 128 : 24;
    const auto u = LatticeProfile::constant(N, d, 0.4);
    auto p = params(N, d, 0.0, 0.2, 5);
    p.snapshot_times = {0.05, 0.1, 0.15};
    const auto c = sample_nu_N(u, 2);
    const auto tr = simulate(c, p, P75);
    for (const auto& s : tr.snapshots) CHECK(s.config.count() == c.count());
    CHECK(tr.final_state.count() == c.count());
    CHECK(tr.final_state.recount() == c.count());
    CHECK(tr.stats.flips == 0);
    CHECK(tr.stats.exchanges > 1000);
  }
}

TEST_CASE("single-site flips form a Poisson process") {
  const double K = 3.0;
  auto p = params(1, 1, K, 1.0, 99);
  p.exchange_rate = 0.0;
  Configuration c(Torus(1, 1));
  Simulator sim(c, p, 0.0);
  std::vector<double> gaps;
  long double last = 0.0L;
  while (gaps.size() < 10000) {
    long double when = 0.0L;
    const auto kind = sim.step(&when);
    REQUIRE(kind == EventKind::Flip);
    gaps.push_back(static_cast<double>(when - last));
    last = when;
  }
  const auto r = ks_test(gaps, [K](double x) { return 1.0 - std::exp(-K * x); });
  CHECK(r.p_value > 0.01);
  CHECK(sim.stats().flips == 10000);
}

TEST_CASE("jump chain of the N = 4 lattice matches the generator") {
  const Torus t(4, 1);
  const double bond = 3.0, K = 2.0;
  const auto Q = dense_generator(t, bond, K, 0.75);
  auto p = params(4, 1, K, 1.0, 2024);
  p.exchange_rate = bond;
  Simulator sim(sample_nu_N(wave_profile(4), 8), p, 0.75);
  std::map<std::pair<std::uint64_t, std::uint64_t>, double> moves;
  std::vector<double> visits(16, 0.0);
  std::uint64_t prev = sim.state().state_index();
  std::uint64_t events = 0;
  while (events < 1000000) {
    if (sim.step() == EventKind::Rejected) continue;
    ++events;
    const std::uint64_t now = sim.state().state_index();
    moves[{prev, now}] += 1.0;
    visits[prev] += 1.0;
    prev = now;
  }
  int cells = 0, outside = 0;
  for (Eigen::Index s = 0; s < 16; ++s) {
    const double out = -Q(s, s);
    const double n = visits[static_cast<std::size_t>(s)];
    REQUIRE(n > 1000);
    for (Eigen::Index r = 0; r < 16; ++r) {
      if (r == s) continue;
      const double pr = Q(s, r) / out;
      const double obs = moves[{static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(r)}];
      if (pr == 0.0) {
        CHECK(obs == 0.0);
        continue;
      }
      ++cells;
      if (std::abs(obs - n * pr) > 3 * std::sqrt(n * pr * (1 - pr))) ++outside;
    }
  }
  MESSAGE("jump-chain cells outside 3 sigma: " << outside << " of " << cells);
  CHECK(outside == 0);
}

TEST_CASE("cached rates agree with a recount after a long run") {
  for (int d : {1, 2}) {
    const int N = d == 1 ? 256 : 20;
    std::vector<double> v(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i) v[static_cast<std::size_t>(i)] = i < N / 2 ? 0.9 : 0.1;
    const LatticeProfile u(N, d, 64.0, v);
    auto p = params(N, d, 64.0, 1e9, 3);
    Simulator sim(sample_nu_N(u, 4), p, 0.75);
    while (sim.stats().events < 1000000) sim.step();
    CHECK(std::abs(sim.cached_exchange_rate() - sim.recomputed_exchange_rate()) <=
          1e-9 * std::max(1.0, sim.recomputed_exchange_rate()));
    CHECK(sim.state().count() == sim.state().recount());
    double g = 0.0;
    const auto& c = sim.state();
    for (std::size_t x = 0; x < c.sites(); ++x) {
      const int sm = c.occupied(c.torus().neighbor(x, 0, -1)) ? 1 : -1;
      const int s0 = c.occupied(x) ? 1 : -1;
      const int sp = c.occupied(c.torus().neighbor(x, 0, +1)) ? 1 : -1;
      g += 64.0 * c0_rate(sm, s0, sp, 0.75);
    }
    CHECK(sim.total_rate() == doctest::Approx(sim.recomputed_exchange_rate() + g).epsilon(1e-9));
  }
}

TEST_CASE("exact law at a fixed time on small lattices") {
  struct Case {
    int N, d;
  };
  for (const Case cs : {Case{3, 1}, Case{5, 1}, Case{3, 2}}) {
    const Torus t(cs.N, cs.d);
    const double bond = 4.0, K = 2.0, T = 0.3;
    const auto Q = dense_generator(t, bond, K, 0.75);
    std::vector<double> v(static_cast<std::size_t>(cs.N));
    for (int i = 0; i < cs.N; ++i) v[static_cast<std::size_t>(i)] = 0.2 + 0.6 * i / (cs.N - 1.0);
    const LatticeProfile u(cs.N, cs.d, 4.0, v);
    const auto p0 = product_weights(t, u);
    const auto law = transient_law(Q, p0, T);
    CHECK(law.sum() == doctest::Approx(1.0).epsilon(1e-12));
    const int M = 40000;
    std::vector<double> counts(static_cast<std::size_t>(law.size()), 0.0);
    auto p = params(cs.N, cs.d, K, T, 0);
    p.exchange_rate = bond;
    for (int m = 0; m < M; ++m) {
      p.seed = replica_seed(77, static_cast<std::uint64_t>(m));
      const auto tr = simulate(sample_nu_N(u, splitmix64(p.seed)), p, P75);
      counts[tr.final_state.state_index()] += 1.0;
    }
    const double pv = chi2_p_value(counts, law, M);
    MESSAGE("N=" << cs.N << " d=" << cs.d << " chi-squared p = " << pv);
    CHECK(pv > 0.01);
  }
}

TEST_CASE("determinism and the event budget") {
  const auto u = wave_profile(64);
  auto p = params(64, 1, 4.0, 0.2, 31);
  p.snapshot_times = {0.05, 0.1};
  const auto c = sample_nu_N(u, 1);
  const auto a = simulate(c, p, P75), b = simulate(c, p, P75);
  REQUIRE(a.snapshots.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) CHECK(a.snapshots[i].config == b.snapshots[i].config);
  CHECK(a.final_state == b.final_state);
  CHECK(a.stats.events == b.stats.events);
  p.seed = 32;
  CHECK_FALSE(simulate(c, p, P75).final_state == a.final_state);
  p.event_budget = 100;
  CHECK_THROWS_AS(simulate(c, p, P75), BudgetExceeded);
  try {
    simulate(c, p, P75);
  } catch (const BudgetExceeded& e) {
    CHECK(e.events == 100);
    CHECK(e.time_reached < 0.2);
  }
}

TEST_CASE("the state at a snapshot time is the state after the last earlier event") {
  const auto u = wave_profile(16);
  auto p = params(16, 1, 4.0, 1.0, 8);
  Simulator sim(sample_nu_N(u, 2), p, 0.75);
  for (int k = 0; k < 200; ++k) {
    long double when = 0.0L;
    Simulator probe = sim;
    probe.step(&when);
    const auto before = sim.state();
    sim.advance_to(when - 1e-12L);
    REQUIRE(sim.state() == before);
    sim.advance_to(when);
    CHECK(sim.time() == when);
    REQUIRE(sim.state() == probe.state());
  }
}

TEST_CASE("pure exchange keeps the Bernoulli measure") {
  for (int d : {1, 2}) {
    auto p = params(d == 1 ? 256 : 16, d, 0.0, 2.0, 13);
    const auto r = invariant_measure_check(p, 0.3, 400);
    CHECK(r.within_bands);
    CHECK(std::abs(r.density - 0.3) <= r.density_band);
    CHECK(std::abs(r.two_point - 0.09) <= r.two_point_band);
    CHECK(std::abs(r.variance - 0.21) <= r.variance_band);
  }
  CHECK_THROWS_AS(invariant_measure_check(params(16, 1, 1.0, 1.0, 1), 0.3, 10), ParameterError);
}

}  // TEST_SUITE
