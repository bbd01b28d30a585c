#include <doctest.h>

#include <bit>
#include <cmath>
#include <numbers>
#include <vector>

#include "gk/errors.hpp"
#include "gk/identities.hpp"
#include "gk/rng.hpp"

using namespace gk;

namespace {

const PotentialParams P75 = PotentialParams::from_gamma(0.75);

LatticeProfile cosine(int N, int d = 1) {
  std::vector<double> v(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i) v[static_cast<std::size_t>(i)] = 0.5 + 0.35 * std::cos(2 * std::numbers::pi * i / N + 0.3);
  return LatticeProfile(N, d, 4.0, v);
}

double nu(const Configuration& c, const LatticeProfile& u) {
  double p = 1.0;
  for (std::size_t x = 0; x < c.sites(); ++x) p *= c.eta(x) ? u.at_site(x) : 1 - u.at_site(x);
  return p;
}

std::vector<double> window_rho(const CylinderFunction& f, const LatticeProfile& u, int x) {
  std::vector<double> r;
  for (int o : f.window) r.push_back(u.at(x + o));
  return r;
}

double window_weight(const std::vector<double>& rho, unsigned s) {
  double p = 1.0;
  for (std::size_t i = 0; i < rho.size(); ++i) p *= ((s >> i) & 1U) ? rho[i] : 1 - rho[i];
  return p;
}

CylinderFunction random_function(std::vector<int> window, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(std::size_t{1} << window.size());
  for (auto& x : v) x = rng.uniform() * 2 - 1;
  return CylinderFunction::from_values(std::move(window), v);
}

}  // namespace

TEST_SUITE("identities") {

TEST_CASE("adjoint of the generator against the explicit move sums") {
  for (int N : {3, 4, 5}) {
    const Torus t(N, 1);
    for (const auto& u : {LatticeProfile::constant(N, 1, 0.3), cosine(N)}) {
      for (double K : {1.0, 4.0}) {
        const auto bf = brute_force_adjoint(t, u, 0.75, K);
        const auto terms = adjoint_terms(t, u, 0.75, K);
        double worst = 0.0, mean = 0.0;
        for (std::size_t s = 0; s < bf.size(); ++s) {
          const auto c = Configuration::from_state_index(t, s);
          worst = std::max(worst, std::abs(adjoint_one(c, terms) - bf[s]));
          mean += nu(c, u) * adjoint_one(c, terms);
        }
        CHECK(worst <= 1e-10);
        CHECK(std::abs(mean) <= 1e-12);
      }
    }
  }
  CHECK_THROWS_AS(brute_force_adjoint(Torus(6, 1), LatticeProfile::constant(6, 1, 0.3), 0.75, 1.0), SizeError);
}

TEST_CASE("dense generator agrees with the move sums") {
  for (int N : {3, 4, 5}) {
    const Torus t(N, 1);
    const auto u = cosine(N);
    const auto a = brute_force_adjoint(t, u, 0.75, 2.0), b = matrix_adjoint_one(t, u, 0.75, 2.0);
    for (std::size_t s = 0; s < a.size(); ++s) CHECK(a[s] == doctest::Approx(b[s]).epsilon(1e-12).scale(1));
  }
  // in d = 2 the dense route checks the coefficient tables
  const Torus t(3, 2);
  const auto u = cosine(3, 2);
  const auto m = matrix_adjoint_one(t, u, 0.75, 1.5);
  const auto terms = adjoint_terms(t, u, 0.75, 1.5);
  double worst = 0.0;
  for (std::size_t s = 0; s < m.size(); ++s)
    worst = std::max(worst, std::abs(adjoint_one(Configuration::from_state_index(t, s), terms) - m[s]));
  CHECK(worst <= 1e-10);
}

TEST_CASE("flat profiles") {
  const Torus t(5, 1);
  // reversibility: no exchange contribution without a gradient
  for (double r : {0.2, 0.5, 0.81}) {
    const auto bf = brute_force_adjoint(t, LatticeProfile::constant(5, 1, r), 0.75, 0.0);
    for (double v : bf) CHECK(std::abs(v) <= 1e-12);
  }
  // all sites occupied at rho_+: only flips out of the full state
  const double rp = P75.rho_plus, g = 0.75;
  const auto u = LatticeProfile::constant(3, 1, rp);
  const auto terms = adjoint_terms(Torus(3, 1), u, g, 2.0);
  Configuration full(Torus(3, 1));
  for (std::size_t x = 0; x < 3; ++x) full.set(x, true);
  full.refresh_count();
  const double beta = 2 * rp - 1;
  CHECK(terms.G2[1] == doctest::Approx(-4 * g * g * beta / (rp * (1 - rp))).epsilon(1e-14));
  CHECK(std::abs(terms.G0[1]) <= 1e-14);
  const double w = 1 - rp;
  const double g3 = 2 * g * 2 / (rp * (1 - rp)) - 2 * g * g * 2 * beta * beta / (rp * (1 - rp));
  CHECK(terms.Upsilon(full) == doctest::Approx(3 * (g3 * w * w - 4 * g * g * beta * w * w * w / (rp * (1 - rp)))).epsilon(1e-13));
  const double hand = 2.0 * 3 * ((1 - rp) / rp * (1 + g) * (1 + g) - (1 - g) * (1 - g));
  CHECK(adjoint_one(full, terms) == doctest::Approx(hand).epsilon(1e-13));
}

TEST_CASE("transverse coefficients vanish for profiles constant across") {
  const auto u = cosine(6, 2);
  const auto terms = adjoint_terms(Torus(6, 2), u, 0.75, 3.0);
  for (double v : terms.G1[1]) CHECK(v == 0.0);
  bool nonzero = false;
  for (double v : terms.G1[0]) nonzero = nonzero || v != 0.0;
  CHECK(nonzero);
  CHECK_THROWS_AS(adjoint_terms(Torus(6, 1), LatticeProfile::constant(6, 1, 1.0), 0.75, 1.0), DomainError);
}

TEST_CASE("cylinder functions and the Mobius basis") {
  std::vector<double> v(16);
  for (unsigned s = 0; s < 16; ++s) v[s] = std::sin(1.0 + s);
  const auto g = CylinderFunction::from_values({0, 1, 2, 3}, v);
  for (unsigned s = 0; s < 16; ++s) CHECK(g(s) == doctest::Approx(v[s]).epsilon(1e-14));
  CHECK_THROWS_AS(CylinderFunction::from_values({0, 1, 2, 3, 4}, std::vector<double>(32)), SizeError);
  const auto h0 = h0_function(0.75);
  for (unsigned s = 0; s < 8; ++s) {
    const int sm = (s & 1U) ? 1 : -1, s0 = (s & 2U) ? 1 : -1, sp = (s & 4U) ? 1 : -1;
    CHECK(h0(s) == doctest::Approx(-s0 * c0_rate(sm, s0, sp, 0.75)));
  }
}

TEST_CASE("degree-two remainder of cylinder functions") {
  const auto u = cosine(8);
  // degree one: nothing left
  const auto lin = CylinderFunction::monomial({0}, 1);
  const auto el = xi_expansion(lin, u, 2);
  for (unsigned s = 0; s < 2; ++s) CHECK(el.xi(s) == 0.0);
  CHECK(el.min_degree() == 0);
  // a pair becomes the product of the centered variables
  const auto pair = CylinderFunction::monomial({0, 1}, 3);
  for (int x : {0, 3, 7}) {
    const auto e = xi_expansion(pair, u, x);
    for (unsigned s = 0; s < 4; ++s) {
      const double w0 = (s & 1U) - u.at(x), w1 = ((s >> 1) & 1U) - u.at(x + 1);
      CHECK(e.xi(s) == doctest::Approx(w0 * w1).epsilon(1e-14).scale(1e-14));
      CHECK(xi_direct(pair, u, x, s) == doctest::Approx(w0 * w1).epsilon(1e-13).scale(1e-14));
    }
  }
  // orthogonality to constants and to every linear variable
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    const auto f = random_function({-1, 0, 1, 2}, seed);
    for (int x : {0, 5}) {
      const auto e = xi_expansion(f, u, x);
      const auto rho = window_rho(f, u, x);
      double mean = 0.0, full = 0.0;
      std::vector<double> cross(4, 0.0);
      for (unsigned s = 0; s < 16; ++s) {
        const double p = window_weight(rho, s);
        mean += p * e.xi(s);
        full = std::max(full, std::abs(e.full(s) - f(s)));
        CHECK(e.xi(s) == doctest::Approx(xi_direct(f, u, x, s)).epsilon(1e-12).scale(1e-12));
        for (std::size_t i = 0; i < 4; ++i) cross[i] += p * e.xi(s) * (((s >> i) & 1U) - rho[i]) / (rho[i] * (1 - rho[i]));
      }
      CHECK(std::abs(mean) <= 1e-13);
      CHECK(full <= 1e-13);
      for (double c : cross) CHECK(std::abs(c) <= 1e-13);
    }
  }
  CHECK(xi_expansion(h0_function(0.75), u, 1).min_degree() == 2);
}

TEST_CASE("centered coefficient of h0") {
  for (double r : {0.15, 0.4, 0.5, P75.rho_plus}) {
    const auto u = LatticeProfile::constant(8, 1, r);
    const auto c = xi_centered_h0(u, 3, 0.75);
    CHECK(c.xi_c == doctest::Approx(-v_double_prime(r, P75)).epsilon(1e-13).scale(1e-13));
    const double h = 1e-5;
    const auto h0 = h0_function(0.75);
    const double fd = (window_expectation(h0, LatticeProfile::constant(8, 1, r + h), 0) -
                       window_expectation(h0, LatticeProfile::constant(8, 1, r - h), 0)) /
                      (2 * h);
    CHECK(c.xi_c == doctest::Approx(fd).epsilon(1e-8).scale(1e-8));
    CHECK(c.minus_vpp == doctest::Approx(-v_double_prime(r, P75)));
  }
  // without the reaction smoothing the expansion is linear
  const auto c0 = xi_centered_h0(cosine(8), 2, 0.0);
  CHECK(c0.xi_c == doctest::Approx(-2.0).epsilon(1e-14));
  CHECK(xi_centered_deviation(LatticeProfile::constant(16, 1, 0.37), 0.75) <= 1e-13);
  // along a smooth interface the deviation is below c sqrt(K) / N; the window is
  // symmetric, so the first-order gradient terms cancel and the decay is quadratic
  const auto g = solve_rho_K(P75, 64.0, 8192);
  std::vector<double> lx, ly;
  for (int N : {64, 128, 256, 512}) {
    lx.push_back(std::log(N));
    ly.push_back(std::log(xi_centered_deviation(discrete_profile(g, N, 1), 0.75)));
  }
  const double c = std::exp(ly.front()) * 64 / 8.0;
  for (std::size_t i = 0; i < lx.size(); ++i) CHECK(std::exp(ly[i]) <= c * 8.0 / std::exp(lx[i]) * (1 + 1e-12));
  const double slope = (ly.back() - ly.front()) / (lx.back() - lx.front());
  MESSAGE("centered coefficient deviation slope " << slope << ", constant " << c);
  CHECK(slope >= -2.3);
  CHECK(slope <= -1.7);
}

TEST_CASE("decomposition around the reaction coefficient") {
  const auto g = solve_rho_K(P75, 64.0, 8192);
  const auto u = discrete_profile(g, 64, 1);
  CHECK(decomposition_residual(h0_function(0.75), u, 0.75) <= 1e-12);
  CHECK(decomposition_residual(random_function({-2, 0, 1}, 9), u, 0.75) <= 1e-12);
  CHECK(decomposition_residual(random_function({-1, 0, 1, 3}, 10), cosine(16), 0.75) <= 1e-12);
  CHECK_THROWS_AS(decomposition_residual(random_function({1, 2}, 3), u, 0.75), ParameterError);
}

}  // TEST_SUITE
