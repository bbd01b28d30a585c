#include <doctest.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <vector>

#include "gk/errors.hpp"
#include "gk/profile.hpp"
#include "json.hpp"
#include "oracles.hpp"

using namespace gk;

namespace {

const PotentialParams P75 = PotentialParams::from_gamma(0.75);

const ProfileGrid& grid(double K) {
  static std::vector<std::pair<double, ProfileGrid>> cache;
  for (auto& [k, g] : cache)
    if (k == K) return g;
  cache.emplace_back(K, solve_rho_K(P75, K, 8192));
  return cache.back().second;
}

double h0_expectation(double rm, double r0, double rp, double g) {
  double s = 0.0;
  for (unsigned w = 0; w < 8; ++w) {
    const int em = (w >> 2) & 1, e0 = (w >> 1) & 1, ep = w & 1;
    const double pr = (em ? rm : 1 - rm) * (e0 ? r0 : 1 - r0) * (ep ? rp : 1 - rp);
    const int sm = 2 * em - 1, s0 = 2 * e0 - 1, sp = 2 * ep - 1;
    s += pr * (1 - 2 * e0) * (1.0 - g * s0 * (sm + sp) + g * g * sm * sp);
  }
  return s;
}

}  // namespace

TEST_SUITE("profile") {

TEST_CASE("minimal period and guards") {
  const double Kmin = minimal_two_layer_K(P75);
  CHECK(Kmin == doctest::Approx(2 * std::numbers::pi * std::numbers::pi / 0.5).epsilon(1e-14));
  // small oscillations have the linearized period; large ones take longer
  CHECK(orbit_period(P75, 1e-4) == doctest::Approx(std::sqrt(Kmin)).epsilon(1e-7));
  double prev = 0.0;
  for (double M : {0.1, 0.3, 0.6, 0.9, 0.94}) {
    const double T = orbit_period(P75, M);
    CHECK(T > prev);
    prev = T;
  }
  CHECK_THROWS_AS(solve_rho_K(P75, 3.0, 1024), ParameterError);
  CHECK_THROWS_AS(solve_rho_K(P75, 64.0, 256), ParameterError);
  CHECK_THROWS_AS(solve_rho_K(P75, 16.0, 1024), NoSolutionError);
  CHECK_THROWS_AS(solve_rho_K(P75, 0.99 * Kmin, 1024), NoSolutionError);
  CHECK_NOTHROW(solve_rho_K(P75, 1.05 * Kmin, 1024));
}

TEST_CASE("orbit period against the shooting half period") {
  for (double M : {0.3, 0.8}) {
    // slope at rho = 1/2 from the first integral with turning points 1/2 +- M/2
    const double E = -v(0.5 + 0.5 * M, P75);
    const double s = -std::sqrt(2 * (E + v(0.5, P75)));
    CHECK(2 * oracle::half_period(0.75, s) == doctest::Approx(orbit_period(P75, M)).epsilon(1e-8));
  }
}

TEST_CASE("two-layer profile: residual, normalization, bounds") {
  for (double K : {64.0, 256.0, 1024.0}) {
    const auto& g = grid(K);
    CHECK(g.period == doctest::Approx(std::sqrt(K)));
    CHECK(g.fd_residual() <= 1e-6);
    CHECK(g.energy_drift() <= 1e-8);
    CHECK(g(0.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(g.derivative(0.0) < 0.0);
    CHECK(g.min_value() > P75.rho_minus);
    CHECK(g.max_value() < P75.rho_plus);
    int crossings = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double a = g.rho[i] - 0.5, b = g.rho[(i + 1) % g.size()] - 0.5;
      if ((a < 0) != (b < 0)) ++crossings;
    }
    CHECK(crossings == 2);
  }
  // extremes move out toward the wells along the ladder
  CHECK(grid(64).max_value() < grid(256).max_value());
  CHECK(grid(256).max_value() < grid(1024).max_value());
  CHECK(grid(64).min_value() > grid(256).min_value());
  CHECK(P75.rho_plus - grid(1024).max_value() < 1e-4);
}

TEST_CASE("two-layer profile against an independent shooting solve") {
  for (double K : {64.0, 256.0}) {
    const auto& g = grid(K);
    const double s = oracle::shoot_profile_slope(0.75, K);
    CHECK(s == doctest::Approx(g.derivative(0.0)).epsilon(1e-9));
    std::vector<double> times;
    for (int i = 0; i <= 40; ++i) times.push_back(i * 0.5 * g.period / 40);
    const auto st = oracle::integrate(0.75, {0.5, g.derivative(0.0)}, times);
    double sup = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) sup = std::max(sup, std::abs(st[i][0] - g(times[i])));
    CHECK(sup <= 1e-7);
  }
}

TEST_CASE("reflection symmetry about the extremes") {
  const auto& g = grid(256);
  const double P = g.period;
  for (double m : {g.m1 * P, g.m2 * P}) {
    double worst = 0.0;
    for (double s = 0.0; s <= P / 2; s += P / 97) worst = std::max(worst, std::abs(g(m + s) - g(m - s)));
    CHECK(worst <= 1e-10);
  }
  CHECK(g.h2 == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("derivative bounds are uniform in K") {
  // the sup of |d^j rho^K| increases toward the standing-wave value, which bounds it for every K
  const StandingWave w(P75);
  std::array<double, 4> wave{};
  for (double t = -12.0; t <= 12.0; t += 1e-3) {
    const double h = 1e-3;
    wave[0] = std::max(wave[0], std::abs(w.dphi(t)));
    wave[1] = std::max(wave[1], std::abs(w.d2phi(t)));
    wave[2] = std::max(wave[2], std::abs(w.d3phi(t)));
    wave[3] = std::max(wave[3], std::abs((w.d3phi(t + h) - w.d3phi(t - h)) / (2 * h)));
  }
  for (double K : {64.0, 256.0, 1024.0}) {
    const auto b = grid(K).derivative_bounds();
    for (std::size_t j = 0; j < 4; ++j) CHECK(b[j] <= wave[j] * (1 + 1e-5));
  }
  const auto b1024 = grid(1024).derivative_bounds();
  for (std::size_t j = 0; j < 4; ++j) CHECK(b1024[j] >= 0.99 * wave[j]);
}

TEST_CASE("glued standing wave approaches the profile") {
  const double d64 = glued_distance(grid(64)), d256 = glued_distance(grid(256)), d1024 = glued_distance(grid(1024));
  CHECK(d256 < d64);
  CHECK(d1024 < d256);
  for (double K : {64.0, 256.0, 1024.0}) CHECK(glued_distance(grid(K)) <= std::pow(K, -0.25));
}

TEST_CASE("lattice samples") {
  const auto& g = grid(256);
  CHECK_THROWS_AS(discrete_profile(g, 4, 1), ParameterError);
  for (int N : {64, 256}) {
    const auto u = discrete_profile(g, N, 2);
    CHECK(u.N() == N);
    CHECK(u.d() == 2);
    CHECK(u.at(0) == 0.5);
    for (std::size_t s = 0; s < static_cast<std::size_t>(N) * N; s += 37) CHECK(u.at_site(s) == u.at(static_cast<int>(s % N)));
    double jump = 0.0;
    for (int x = 0; x < N; ++x) jump = std::max(jump, std::abs(u.at(x + 1) - u.at(x)));
    CHECK(jump <= g.derivative_bounds()[0] * g.period / N * 1.0001);
    CHECK(u.at(-1) == u.at(N - 1));
    CHECK(u.at(N / 4) == doctest::Approx(g(0.25 * g.period)).epsilon(1e-14));
  }
  const auto c = LatticeProfile::constant(16, 1, 0.3);
  for (int x = 0; x < 16; ++x) CHECK(c.at(x) == 0.3);
}

TEST_CASE("stationarity residual") {
  for (double r : {0.1, 0.4, 0.5, 0.85})
    for (double rm : {0.2, 0.7})
      for (double rp : {0.05, 0.6})
        CHECK(g0_polynomial(rm, r, rp, 0.75) == doctest::Approx(h0_expectation(rm, r, rp, 0.75)).epsilon(1e-13).scale(1));
  const auto& g = grid(256);
  const auto u = discrete_profile(g, 128, 1);
  double two_ways = 0.0;
  for (int x = 0; x < 128; ++x) {
    const double a = g0_polynomial(u.at(x - 1), u.at(x), u.at(x + 1), 0.75);
    const double b = h0_expectation(u.at(x - 1), u.at(x), u.at(x + 1), 0.75);
    two_ways = std::max(two_ways, std::abs(a - b));
  }
  CHECK(two_ways <= 1e-12);
  CHECK(stationarity_residual(LatticeProfile::constant(64, 1, P75.rho_plus), 0.75) < 1e-13);
  CHECK(stationarity_residual(LatticeProfile::constant(64, 1, 0.5), 0.75) < 1e-13);
  std::vector<double> lx, ly;
  for (int N : {64, 128, 256, 512}) {
    lx.push_back(std::log(N));
    ly.push_back(std::log(stationarity_residual(grid(64), N)));
  }
  const double slope = (ly.back() - ly.front()) / (lx.back() - lx.front());
  CHECK(slope >= -2.3);
  CHECK(slope <= -1.7);
}

TEST_CASE("metadata and csv export") {
  const auto& g = grid(64);
  const auto j = nlohmann::json::parse(g.metadata_json());
  CHECK(j.at("gamma").get<double>() == 0.75);
  CHECK(j.at("K").get<double>() == 64.0);
  CHECK(j.contains("E"));
  CHECK(j.at("residuals").contains("finite_difference"));
  const std::string path = "/tmp/gk_unit_profile.csv";
  g.write_csv(path);
  std::ifstream in(path);
  std::string header, line;
  std::getline(in, header);
  CHECK(header == "theta,rho_K,drho_K");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == g.size());
  std::remove(path.c_str());
}

}  // TEST_SUITE
